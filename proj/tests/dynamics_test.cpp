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
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "szilard/dynamics.hpp"

using namespace szilard;

namespace {

oracle::Affine reference_generator(const SystemParams& p) {
  return oracle::generator(p.ladder.a, p.ladder.b, p.ladder.c, p.ladder.n_tls, p.qubit.gamma_q, p.ladder.gamma_t,
                           p.qubit.p_th);
}

PopulationState skewed_state(int n) {
  PopulationState s;
  s.p_q = 0.83;
  for (int k = 0; k < n; ++k) s.p_t.push_back(0.05 + 0.9 * std::abs(std::sin(1.7 * k)));
  return s;
}

Experiment protocol(std::vector<ProtocolStep> steps) { return Experiment{std::move(steps), std::nullopt}; }

}  // namespace

TEST(Propagator, GeneratorStructure) {
  const auto p = reference_parameters();
  const Propagator prop(p);
  const auto ref = reference_generator(p);
  EXPECT_LT((prop.generator() - ref.m).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((prop.drive() - ref.v).cwiseAbs().maxCoeff(), 1e-12);
  for (int i = 1; i <= 51; ++i)
    for (int j = 1; j <= 51; ++j)
      if (i != j) {
        EXPECT_EQ(prop.generator()(i, j), 0.0);
      }
}

TEST(Propagator, SpectrumHasNPlusOneDecayingModes) {
  const Propagator prop(reference_parameters());
  ASSERT_EQ(prop.eigenvalues().size(), 52);
  for (int i = 0; i < 52; ++i) EXPECT_LT(prop.eigenvalues()(i), 0.0);
}

TEST(Propagate, MatchesMatrixExponentialOracle) {
  const auto p = reference_parameters();
  const auto ref = reference_generator(p);
  const auto s0 = skewed_state(51);
  for (double dt : {0.0, 1e-7, 3e-6, 21.5e-6, 1e-4, 2e-3, 0.05}) {
    const auto s = propagate(s0, p, dt);
    const Eigen::VectorXd want = oracle::flow(ref, to_vector(s0), dt);
    EXPECT_LT((to_vector(s) - want).cwiseAbs().maxCoeff(), 1e-10) << "dt=" << dt;
  }
}

TEST(Propagate, ShiftedLadderMatchesOracle) {
  auto p = reference_parameters();
  p.ladder.c = 0.37;
  p.ladder.n_tls = 21;
  const auto s0 = skewed_state(21);
  const auto s = propagate(s0, p, 7e-5);
  EXPECT_LT((to_vector(s) - oracle::flow(reference_generator(p), to_vector(s0), 7e-5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Propagate, SemigroupProperty) {
  const auto p = reference_parameters();
  const auto s0 = skewed_state(51);
  for (auto [a, b] : {std::pair{1e-6, 3e-6}, std::pair{2e-5, 7e-4}, std::pair{1e-3, 4e-2}}) {
    const auto once = propagate(s0, p, a + b);
    const auto twice = propagate(propagate(s0, p, a), p, b);
    EXPECT_LT((to_vector(once) - to_vector(twice)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(once.t, a + b, 1e-18);
  }
}

TEST(Propagate, UncoupledQubitDecays) {
  SystemParams p;
  p.qubit = QubitParams{1.2e9, 46.5e3, 0.0};
  p.ladder.n_tls = 0;
  PopulationState s{1.0, {}, 0.0};
  for (double t : {1e-6, 1e-5, 5e-5}) EXPECT_NEAR(propagate(s, p, t).p_q, std::exp(-46.5e3 * t), 1e-12);
  p.ladder.n_tls = 5;
  p.ladder.a = 0.0;
  s = PopulationState::uniform(0.0, 5);
  s.p_q = 1.0;
  EXPECT_NEAR(propagate(s, p, 2e-5).p_q, std::exp(-46.5e3 * 2e-5), 1e-12);
}

TEST(Propagate, ThermalStateIsStationary) {
  const auto p = reference_parameters();
  const auto s0 = PopulationState::uniform(p.qubit.p_th, 51);
  for (double dt : {1e-6, 1e-3, 1.0}) {
    const auto s = propagate(s0, p, dt);
    EXPECT_LT((to_vector(s) - to_vector(s0)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Propagate, LongTimeLimitIsBathPopulation) {
  const auto p = reference_parameters();
  const auto s = propagate(skewed_state(51), p, 10.0);
  EXPECT_LT((to_vector(s).array() - p.qubit.p_th).abs().maxCoeff(), 1e-10);
}

TEST(Propagate, PopulationsStayInUnitInterval) {
  const auto p = reference_parameters();
  PopulationState s = PopulationState::uniform(1.0, 51);
  s.p_q = 0.0;
  for (double t = 1e-7; t < 1.0; t *= 1.3) {
    const auto x = to_vector(propagate(s, p, t));
    EXPECT_GE(x.minCoeff(), 0.0);
    EXPECT_LE(x.maxCoeff(), 1.0);
  }
}

TEST(PropagateClamped, ClosedFormAgainstFrozenOracle) {
  const auto p = reference_parameters();
  const auto s0 = skewed_state(51);
  for (int clamp : {0, 1}) {
    for (double dt : {5e-6, 46e-6, 1e-3, 20e-3}) {
      const auto s = propagate_clamped(s0, p, dt, clamp);
      Eigen::VectorXd x0 = to_vector(s0);
      x0(0) = clamp;
      const Eigen::VectorXd want = oracle::clamped_flow(reference_generator(p), x0, dt);
      EXPECT_EQ(s.p_q, clamp);
      EXPECT_LT((to_vector(s) - want).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(PropagateClamped, CenterTlsTimeConstant) {
  const auto p = reference_parameters();
  const auto s0 = PopulationState::uniform(p.qubit.p_th, 51);
  const double r0 = build_coupling_ladder(p.ladder)[25];
  const double tau = 1.0 / (p.ladder.gamma_t + r0);
  EXPECT_NEAR(tau, 46e-6, 0.5e-6);
  const double p_inf = p.ladder.gamma_t * p.qubit.p_th / (p.ladder.gamma_t + r0);
  const auto s = propagate_clamped(s0, p, tau, 0);
  EXPECT_NEAR((s.p_t[25] - p_inf) / (p.qubit.p_th - p_inf), std::exp(-1.0), 1e-12);
}

TEST(PropagateClamped, FullClampWithoutTlsRelaxation) {
  auto p = reference_parameters();
  p.ladder.gamma_t = 0.0;
  const auto rates = build_coupling_ladder(p.ladder);
  const auto s = propagate_clamped(PopulationState::uniform(0.0, 51), p, 1e-4, 1);
  for (int k = 0; k < 51; ++k) EXPECT_NEAR(s.p_t[k], 1.0 - std::exp(-rates[k] * 1e-4), 1e-14);
}

TEST(PropagateClamped, StationaryAtBathPopulation) {
  for (double p_th : {0.0, 1.0}) {
    auto p = reference_parameters();
    p.qubit.p_th = p_th;
    const auto s0 = PopulationState::uniform(p_th, 51);
    const auto s = propagate_clamped(s0, p, 1e-3, static_cast<int>(p_th));
    EXPECT_LT((to_vector(s) - to_vector(s0)).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_THROW(propagate_clamped(PopulationState::uniform(0.1, 51), reference_parameters(), 1e-3, 2),
               std::invalid_argument);
}

TEST(RunDeterministic, StabilizedExcitedGivesInvertedBath) {
  const auto p = reference_parameters();
  const auto exp = protocol({Stabilize{QubitState::excited, 10000, 2e-6}, Initialize{QubitState::ground},
                             Monitor{50e-3, 2e-6}});
  const auto res = run_deterministic(exp, p, std::vector<double>{0.0});
  EXPECT_NEAR(res.p_eq[0], 0.76, 0.03);
  EXPECT_EQ(res.states[0].p_q, 0.0);
}

TEST(RunDeterministic, StabilizedGroundGivesColdBath) {
  const auto p = reference_parameters();
  const auto exp = protocol({Stabilize{QubitState::ground, 10000, 2e-6}, Initialize{QubitState::excited},
                             FreeDecay{1e-3}});
  const double t1 = 1.0 / relaxation_rate(p);
  const auto res = run_deterministic(exp, p, std::vector<double>{0.0, t1});
  EXPECT_NEAR(res.p_eq[0], 0.029, 0.005);
  EXPECT_NEAR(population_to_temperature(res.p_eq[0], p.qubit.f01), 16e-3, 1e-3);
  EXPECT_EQ(res.states[0].p_q, 1.0);
  EXPECT_GT(res.states[1].p_q, p.qubit.p_th);
}

TEST(RunDeterministic, InitialDecayRateIsGammaOne) {
  const auto p = reference_parameters();
  const auto exp = protocol({Initialize{QubitState::excited}, FreeDecay{1e-3}});
  const double h = 1e-9;
  const auto res = run_deterministic(exp, p, std::vector<double>{0.0, h});
  const double slope = (res.states[1].p_q - res.states[0].p_q) / h;
  EXPECT_NEAR(-slope / (1.0 - res.p_eq[0]), relaxation_rate(p), 1e-4 * relaxation_rate(p));
  EXPECT_NEAR(1.0 / relaxation_rate(p), 21.5e-6, 0.02 * 21.5e-6);
}

TEST(RunDeterministic, PeqIdentityAtEverySample) {
  const auto p = reference_parameters();
  const auto exp = protocol({Stabilize{QubitState::excited, 1000, 2e-6}, Initialize{QubitState::ground},
                             Monitor{10e-3, 2e-6}});
  const auto res = run_deterministic(exp, p);
  const auto rates = build_coupling_ladder(p.ladder);
  const double g1 = relaxation_rate(p);
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    double up = p.qubit.gamma_q * p.qubit.p_th;
    for (int k = 0; k < 51; ++k) up += rates[k] * res.states[i].p_t[k];
    EXPECT_NEAR(res.p_eq[i], up / g1, 1e-12);
    EXPECT_NEAR(res.gamma_up[i] + res.gamma_down[i], g1, 1e-9 * g1);
    if (i > 0) {
      EXPECT_GT(res.times[i], res.times[i - 1]);
    }
  }
}

TEST(RunDeterministic, ProtocolWalkMatchesStepwiseOracle) {
  const auto p = reference_parameters();
  const auto ref = reference_generator(p);
  const auto exp = protocol({Wait{1e-3}, Stabilize{QubitState::excited, 500, 2e-6}, Initialize{QubitState::ground},
                             PiPulseTrain{3, 40e-6}, FreeDecay{300e-6}});
  Eigen::VectorXd x = Eigen::VectorXd::Constant(52, p.qubit.p_th);
  x = oracle::flow(ref, x, 1e-3);
  x(0) = 1.0;
  x = oracle::clamped_flow(ref, x, 1e-3);
  x(0) = 0.0;
  for (int i = 0; i < 3; ++i) {
    x(0) = 1.0 - x(0);
    x = oracle::flow(ref, x, 40e-6);
  }
  const Eigen::VectorXd at_end = oracle::flow(ref, x, 300e-6);
  const auto res = run_deterministic(exp, p, std::vector<double>{120e-6, 420e-6});
  EXPECT_LT((to_vector(res.states[0]) - x).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((to_vector(res.states[1]) - at_end).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RunDeterministic, ClockOriginAndSampleRange) {
  const auto p = reference_parameters();
  const auto exp = protocol({Stabilize{QubitState::ground, 100, 2e-6}, Initialize{QubitState::excited}, Wait{1e-4}});
  EXPECT_DOUBLE_EQ(exp.origin(), 200e-6);
  const auto res = run_deterministic(exp, p, std::vector<double>{-200e-6, -100e-6, 0.0});
  EXPECT_EQ(res.states[1].p_q, 0.0);
  EXPECT_EQ(res.states[2].p_q, 1.0);
  EXPECT_THROW(run_deterministic(exp, p, std::vector<double>{2e-4}), std::invalid_argument);
  EXPECT_THROW(run_deterministic(exp, p, std::vector<double>{-3e-4}), std::invalid_argument);
  EXPECT_THROW(run_deterministic(exp, p, std::vector<double>{1e-5, 0.0}), std::invalid_argument);
}

TEST(RunDeterministic, FastQubitPathAgrees) {
  const auto p = reference_parameters();
  const auto exp = protocol({Stabilize{QubitState::excited, 1000, 2e-6}, Initialize{QubitState::ground},
                             Monitor{1e-3, 2e-6}});
  const auto grid = linear_time_grid(0.0, 1e-3, 7e-6);
  const Propagator prop(p);
  const auto fast = sample_qubit_population(exp, prop, grid);
  const auto full = run_deterministic(exp, prop, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(fast[i], full.states[i].p_q, 1e-12);
}

TEST(RunDeterministic, ConvergesInLadderSize) {
  const auto exp = protocol({Stabilize{QubitState::excited, 10000, 2e-6}, Initialize{QubitState::ground},
                             Monitor{50e-3, 2e-6}});
  auto p31 = reference_parameters();
  p31.ladder.n_tls = 31;
  const auto grid = log_time_grid(1e-6, 50e-3);
  const auto a = run_deterministic(exp, reference_parameters(), grid).qubit_population();
  const auto b = run_deterministic(exp, p31, grid).qubit_population();
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_LT(std::abs(a[i] - b[i]), 0.01) << "t=" << grid[i];
}

TEST(RunDeterministic, PeqHasMemory) {
  // Two histories reaching the same p_eq at different times relax at different speeds.
  const auto p = reference_parameters();
  const Propagator prop(p);
  const auto long_stab = protocol({Stabilize{QubitState::excited, 10000, 2e-6}, Initialize{QubitState::ground},
                                   FreeDecay{50e-3}});
  const auto short_stab = protocol({Stabilize{QubitState::excited, 300, 2e-6}, Initialize{QubitState::ground},
                                    FreeDecay{50e-3}});
  const auto grid = log_time_grid(1e-6, 40e-3, 400);
  const auto a = run_deterministic(long_stab, prop, grid);
  const auto b = run_deterministic(short_stab, prop, grid);
  const double target = b.p_eq[0] - 0.05;
  auto crossing = [&](const DeterministicResult& r) {
    for (std::size_t i = 1; i < r.times.size(); ++i)
      if (r.p_eq[i] <= target && r.p_eq[i - 1] > target) return i;
    return std::size_t{0};
  };
  const std::size_t ia = crossing(a), ib = crossing(b);
  ASSERT_GT(ia, 0u);
  ASSERT_GT(ib, 0u);
  auto slope = [](const DeterministicResult& r, std::size_t i) {
    return (r.p_eq[i + 1] - r.p_eq[i - 1]) / (r.times[i + 1] - r.times[i - 1]);
  };
  EXPECT_GT(std::abs(slope(a, ia) - slope(b, ib)), 0.2 * std::abs(slope(b, ib)));
}

TEST(HeatExtraction, PeakLocation) {
  const auto h = heat_extraction_curve(reference_parameters(), kIdleTemperature);
  EXPECT_EQ(h.delta_q.front(), 0.0);
  EXPECT_NEAR(h.peak_time, 68e-6, 10e-6);
  EXPECT_GT(h.peak, 0.0);
}

TEST(HeatExtraction, NoCouplingNoHeat) {
  auto p = reference_parameters();
  p.ladder.a = 0.0;
  const auto h = heat_extraction_curve(p, kIdleTemperature);
  for (double q : h.delta_q) EXPECT_NEAR(q, 0.0, 1e-14);
  EXPECT_THROW(heat_extraction_curve(p, 0.0), std::invalid_argument);
}

TEST(HeatExtraction, Rethermalizes) {
  const auto h = heat_extraction_curve(reference_parameters(), kIdleTemperature, 2.0, 11);
  EXPECT_NEAR(h.delta_q.back(), 0.0, 1e-8);
}
