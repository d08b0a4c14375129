// Copyright 2026 The szilard-tls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Stabilize the qubit in e, reset it to g, and watch the bath hand the
// inversion back: deterministic curve next to a small jump ensemble.

#include <cmath>
#include <cstdio>
#include <string>

#include "szilard/szilard.hpp"

int main() {
  using namespace szilard;
  using namespace szilard::literals;

  const SystemParams params = reference_parameters();
  std::printf("Gamma_1 = %.1f 1/s (T1 = %.2f us), p_th = %.4f\n", relaxation_rate(params),
              1e6 / relaxation_rate(params), params.qubit.p_th);

  Experiment exp;
  exp.steps = {Stabilize{QubitState::excited, 10000, 2.0_us}, Initialize{QubitState::ground},
               Monitor{1.0_ms, 2.0_us}};

  const std::vector<double> times{0.0, 10.0_us, 50.0_us, 100.0_us, 300.0_us, 1.0_ms};
  const auto det = run_deterministic(exp, params, times);

  TrajectoryOptions opt;
  opt.threads = 1;
  const auto ensemble = run_ensemble(exp, params, ReadoutModel{}, 7, 200, opt);
  const auto pops = population_series(ensemble);

  std::printf("%10s %10s %10s %12s\n", "t (us)", "p_q det", "p_eq det", "p_q jumps");
  for (std::size_t i = 0; i < times.size(); ++i) {
    double jump = -1.0;
    for (std::size_t s = 0; s < pops.times.size(); ++s)
      if (std::abs(pops.times[s] - times[i]) < 1e-9) jump = pops.p_q[s];
    std::printf("%10.1f %10.4f %10.4f %12s\n", times[i] * 1e6, det.states[i].p_q, det.p_eq[i],
                jump < 0 ? "-" : std::to_string(jump).c_str());
  }
}
