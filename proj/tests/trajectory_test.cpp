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

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "szilard/dynamics.hpp"
#include "szilard/estimator.hpp"
#include "szilard/trajectory.hpp"

using namespace szilard;

namespace {

SystemParams frozen(int n_tls) {
  SystemParams p;
  p.qubit = QubitParams{1.2e9, 0.0, 0.0};
  p.ladder = LadderParams{0.0, 1.0, 0.0, n_tls, 0.0};
  return p;
}

double fraction_excited(const std::vector<JumpTrace>& ens, std::size_t strobe) {
  double s = 0.0;
  for (const auto& t : ens) s += t.true_states[strobe];
  return s / static_cast<double>(ens.size());
}

TrajectoryOptions serial() {
  TrajectoryOptions o;
  o.threads = 1;
  return o;
}

}  // namespace

TEST(StepCtmc, NoRatesNoChange) {
  Rng rng(1);
  MicroState s{true, {1, 0, 1}, 0.0};
  const auto out = step_ctmc(s, frozen(3), 1.0, rng);
  EXPECT_EQ(out.qubit, true);
  EXPECT_EQ(out.tls, s.tls);
  EXPECT_DOUBLE_EQ(out.t, 1.0);
}

TEST(StepCtmc, SymmetricExchangeClosedForm) {
  SystemParams p = frozen(1);
  p.ladder.a = 1e4;  // b = 1, single TLS at k = 0: exchange rate 1e4
  const double dt = 50e-6;
  const int n = 100000;
  Rng rng(2024);
  int excited = 0;
  for (int i = 0; i < n; ++i) excited += step_ctmc(MicroState{true, {0}, 0.0}, p, dt, rng).qubit;
  const double want = 0.5 * (1.0 + std::exp(-2.0 * 1e4 * dt));
  const double sigma = std::sqrt(want * (1.0 - want) / n);
  EXPECT_NEAR(excited / static_cast<double>(n), want, 3 * sigma);
}

TEST(StepCtmc, DetailedBalanceWithoutCoupling) {
  SystemParams p = reference_parameters();
  p.ladder.a = 0.0;
  p.ladder.n_tls = 5;
  p.ladder.gamma_t = 1e4;
  JumpSimulator sim(p, MicroState{true, std::vector<std::uint8_t>(5, 1), 0.0});
  Rng rng(99);
  const int samples = 200000;
  std::vector<double> occ(6, 0.0);
  for (int i = 0; i < samples; ++i) {
    sim.evolve(200e-6, rng);
    occ[0] += sim.qubit();
    for (int k = 0; k < 5; ++k) occ[k + 1] += sim.state().tls[k];
  }
  // Samples are close to independent: 200 us exceeds both correlation times.
  const double sigma = std::sqrt(p.qubit.p_th * (1 - p.qubit.p_th) / samples);
  for (double o : occ) EXPECT_NEAR(o / samples, p.qubit.p_th, 4 * sigma);
}

TEST(Measure, MisassignmentAtSeparation) {
  ReadoutModel r;
  r.separation_sigma = 5.6;
  Rng rng(5);
  const int n = 1000000;
  int wrong = 0;
  const MicroState g{false, {}, 0.0};
  for (int i = 0; i < n; ++i) wrong += measure(g, r, rng).assigned;
  const double want = oracle::normal_cdf(-2.8);
  EXPECT_NEAR(want, 2.555e-3, 1e-6);
  EXPECT_NEAR(wrong / static_cast<double>(n), want, 3 * std::sqrt(want / n));
}

TEST(Measure, DemolitionPrecedesReadout) {
  ReadoutModel r = ReadoutModel::ideal();
  r.demolition_down = 0.04;
  Rng rng(8);
  const int n = 200000;
  int flipped = 0, consistent = 0;
  const MicroState e{true, {}, 0.0};
  for (int i = 0; i < n; ++i) {
    const auto m = measure(e, r, rng);
    flipped += !m.post_state.qubit;
    consistent += m.assigned == m.post_state.qubit;
  }
  EXPECT_EQ(consistent, n);
  EXPECT_NEAR(flipped / static_cast<double>(n), 0.04, 3 * std::sqrt(0.04 * 0.96 / n));
  EXPECT_NEAR(-std::log(1 - 0.04) / 2e-6, 20e3, 0.05 * 20e3);
}

TEST(Measure, IdealReadoutIsTruthful) {
  Rng rng(3);
  for (bool q : {false, true}) {
    const auto m = measure(MicroState{q, {}, 0.0}, ReadoutModel::ideal(), rng);
    EXPECT_EQ(m.assigned, q);
    EXPECT_EQ(m.post_state.qubit, q);
  }
  ReadoutModel bad;
  bad.demolition_down = 1.0;
  EXPECT_THROW(measure(MicroState{}, bad, rng), std::invalid_argument);
}

TEST(RunTrajectory, StabilizationFiresOnceWithoutDynamics) {
  Experiment exp{{Stabilize{QubitState::ground, 50, 2e-6}}, PopulationState::uniform(1.0, 3)};
  const auto tr = run_trajectory(exp, frozen(3), ReadoutModel::ideal(), 11);
  ASSERT_EQ(tr.size(), 50u);
  EXPECT_EQ(tr.pi_fired[0], 1);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_EQ(tr.pi_fired[i], 0) << i;
}

TEST(RunTrajectory, ListsShareLength) {
  Experiment exp{{Stabilize{QubitState::excited, 20, 2e-6}, Initialize{QubitState::ground}, Monitor{40e-6, 2e-6},
                  PiPulseTrain{2, 10e-6}, Wait{1e-5}},
                 std::nullopt};
  TrajectoryOptions opt;
  opt.record_iq = true;
  const auto tr = run_trajectory(exp, reference_parameters(), ReadoutModel{}, 4, opt);
  EXPECT_EQ(tr.size(), 41u);
  EXPECT_EQ(tr.pi_fired.size(), tr.size());
  EXPECT_EQ(tr.true_states.size(), tr.size());
  EXPECT_EQ(tr.iq.size(), tr.size());
  EXPECT_EQ(tr.schedule->size(), tr.size());
}

TEST(RunTrajectory, PulseProbabilityTracksExcitationRate) {
  const auto p = reference_parameters();
  Experiment exp{{Stabilize{QubitState::ground, 10000, 2e-6}}, std::nullopt};
  const auto ens = run_ensemble(exp, p, ReadoutModel::ideal(), 21, 400);
  const auto pi = pi_pulse_probability(ens);
  auto window_mean = [&](std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) s += pi.p_q[i];
    return s / static_cast<double>(to - from);
  };
  const double early = window_mean(1, 200), late = window_mean(8000, 10000);
  EXPECT_GT(early, 2 * late);

  // Clamped deterministic Gamma_up over the same late window.
  Experiment clamp{{Stabilize{QubitState::ground, 10000, 2e-6}}, std::nullopt};
  const auto det = run_deterministic(clamp, p, linear_time_grid(16e-3, 19.99e-3, 0.1e-3));
  double up = 0.0;
  for (std::size_t i = 0; i < det.times.size(); ++i) up += det.gamma_up[i];
  up /= static_cast<double>(det.times.size());
  EXPECT_NEAR(pi_probability_to_rate(late, 2e-6), up, 0.1 * up);
}

TEST(RunTrajectory, LongWaitRestoresThermalPopulation) {
  const auto p = reference_parameters();
  Experiment exp{{Stabilize{QubitState::excited, 1000, 2e-6}, Wait{50e-3}, Monitor{2e-6, 2e-6}}, std::nullopt};
  const auto ens = run_ensemble(exp, p, ReadoutModel{}, 17, 10000);
  const double frac = fraction_excited(ens, 1000);
  const auto det = run_deterministic(exp, p, std::vector<double>{exp.end_time()});
  const double sigma = std::sqrt(frac * (1 - frac) / 10000);
  EXPECT_NEAR(frac, det.states[0].p_q, 3 * sigma);
  EXPECT_NEAR(frac, p.qubit.p_th, 0.012);
}

TEST(RunTrajectory, GroundStabilizationFidelity) {
  Experiment exp{{Stabilize{QubitState::ground, 10000, 2e-6}, Initialize{QubitState::ground}, Monitor{2e-6, 2e-6}},
                 std::nullopt};
  const auto ens = run_ensemble(exp, reference_parameters(), ReadoutModel{}, 31, 1000);
  EXPECT_LT(fraction_excited(ens, 10001), 0.02);
}

TEST(RunTrajectory, MeanFieldMatchesRateEquations) {
  const auto p = reference_parameters();
  Experiment exp{{PiPulseTrain{10, 20e-6}, Initialize{QubitState::excited}, Monitor{400e-6, 20e-6}}, std::nullopt};
  const int n = 10000;
  const auto ens = run_ensemble(exp, p, ReadoutModel::ideal(), 77, n);
  const auto& sched = *ens.front().schedule;
  const auto det = run_deterministic(exp, p, sched.times);
  for (std::size_t i = 0; i < sched.size(); ++i) {
    // The initialize strobe reads the pre-feedback bit; the rate equations give the post-reset state.
    if (sched.phases[i] != StrobePhase::monitor) continue;
    const double want = det.states[i].p_q;
    const double sigma = std::sqrt(std::max(want * (1 - want), 1.0 / n) / n);
    EXPECT_NEAR(fraction_excited(ens, i), want, 3 * sigma) << "t=" << sched.times[i];
  }
}

TEST(RunEnsemble, DeterministicAcrossThreadCounts) {
  Experiment exp{{Stabilize{QubitState::excited, 200, 2e-6}, Initialize{QubitState::ground}, Monitor{200e-6, 2e-6}},
                 std::nullopt};
  TrajectoryOptions one, four;
  one.threads = 1;
  four.threads = 4;
  one.record_iq = four.record_iq = true;
  const auto a = run_ensemble(exp, reference_parameters(), ReadoutModel{}, 123, 64, one);
  const auto b = run_ensemble(exp, reference_parameters(), ReadoutModel{}, 123, 64, four);
  const auto c = run_ensemble(exp, reference_parameters(), ReadoutModel{}, 123, 64, four);
  ASSERT_EQ(a.size(), 64u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i] == b[i]) << i;
    EXPECT_TRUE(b[i] == c[i]) << i;
  }
  EXPECT_EQ(run_ensemble(exp, reference_parameters(), ReadoutModel{}, 123, 1, one).size(), 1u);
  EXPECT_TRUE(run_ensemble(exp, reference_parameters(), ReadoutModel{}, 123, 1, one)[0] == a[0]);
  EXPECT_THROW(run_ensemble(exp, reference_parameters(), ReadoutModel{}, 123, 0, one), std::invalid_argument);
}

TEST(RunEnsemble, SeedsAgreeStatistically) {
  const auto p = reference_parameters();
  Experiment exp{{Stabilize{QubitState::excited, 1000, 2e-6}, Initialize{QubitState::ground}, Monitor{100e-6, 2e-6}},
                 std::nullopt};
  const auto a = population_series(run_ensemble(exp, p, ReadoutModel{}, 1, 4000, serial()));
  const auto b = population_series(run_ensemble(exp, p, ReadoutModel{}, 2, 4000, serial()));
  for (std::size_t i : {std::size_t{1005}, std::size_t{1025}, std::size_t{1050}}) {
    const double s = std::hypot(a.stderr_[i], b.stderr_[i]);
    EXPECT_NEAR(a.p_q[i], b.p_q[i], 3 * s);
  }
  EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(2, 0));
  EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(1, 1));
}
