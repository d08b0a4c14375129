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
#include "szilard/thermo.hpp"

using namespace szilard;

namespace {

// Boltzmann distribution over {g, d degenerate excited levels}.
std::vector<double> gibbs(int d, double x) {
  const double z = 1.0 + d * std::exp(-x);
  std::vector<double> p{1.0 / z};
  for (int i = 0; i < d; ++i) p.push_back(std::exp(-x) / z);
  return p;
}

}  // namespace

TEST(InternalEnergy, Limits) {
  EXPECT_DOUBLE_EQ(internal_energy(1, 0.0), 0.5);
  EXPECT_NEAR(internal_energy(3, 0.0), 0.75, 1e-15);
  EXPECT_LT(internal_energy(1, 50.0), 1e-21);
  EXPECT_NEAR(internal_energy(2, -50.0), 1.0, 1e-15);
}

TEST(InternalEnergy, InvertsPopulation) {
  for (double p : {0.01, 0.12, 0.3, 0.49}) EXPECT_NEAR(excited_population(1, beta_eps_from_population(p)), p, 1e-14);
  EXPECT_THROW(beta_eps_from_population(0.0), std::invalid_argument);
  EXPECT_THROW(beta_eps_from_population(1.0), std::invalid_argument);
}

TEST(Entropy, EqualPopulationsGiveLogTwo) {
  const auto s = entropy_split(1, 0.0);
  EXPECT_DOUBLE_EQ(s.s_rev, 0.0);
  EXPECT_NEAR(s.s, std::log(2.0), 1e-15);
}

TEST(Entropy, MatchesShannonOnGrid) {
  for (int d = 1; d <= 3; ++d) {
    for (double x = -5.0; x <= 20.0; x += 0.25) {
      const auto s = entropy_split(d, x);
      EXPECT_NEAR(s.s, oracle::shannon(gibbs(d, x)), 1e-10) << "d=" << d << " x=" << x;
      EXPECT_NEAR(s.s_rev + s.s_irr, s.s, 1e-15);
      EXPECT_GE(s.s_irr, 0.0);
    }
  }
}

TEST(Entropy, MeasurementReductionIsBinaryEntropy) {
  for (int d = 1; d <= 4; ++d) {
    for (double x = -3.0; x <= 10.0; x += 0.5) {
      const double p = excited_population(d, x);
      EXPECT_NEAR(measurement_entropy_reduction(d, x), oracle::shannon({p, 1.0 - p}), 1e-12);
    }
  }
}

TEST(Entropy, ReductionPeaksAtLogDegeneracy) {
  for (int d = 1; d <= 5; ++d) {
    const double peak = std::log(static_cast<double>(d));
    const double at = measurement_entropy_reduction(d, peak);
    EXPECT_NEAR(at, std::log(2.0), 1e-14);
    for (double off : {-0.3, -0.01, 0.01, 0.3}) EXPECT_LT(measurement_entropy_reduction(d, peak + off), at);
  }
}

TEST(Entropy, ReferencePopulation) {
  const double x = beta_eps_from_population(0.12);
  EXPECT_NEAR(internal_energy(1, x) * x, 0.239, 5e-4);
  EXPECT_NEAR(measurement_entropy_reduction(1, x), 0.367, 5e-4);
}

TEST(IrrRevRatio, AgreesWithDirectForm) {
  for (int d = 1; d <= 3; ++d) {
    for (double x : {0.1, 1.0, 2.0, 5.0, 12.0}) {
      const auto s = entropy_split(d, x);
      EXPECT_NEAR(irr_rev_ratio(d, x), s.s_irr / s.s_rev, 1e-12 * (1 + s.s_irr / s.s_rev));
    }
  }
  EXPECT_THROW(irr_rev_ratio(1, 0.0), std::invalid_argument);
  EXPECT_NEAR(irr_rev_ratio(1, 800.0), 1.0 / 800.0, 1e-15);
}

TEST(Cop, CarnotAndBounds) {
  EXPECT_DOUBLE_EQ(carnot_cop(0.2, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(cop(0.2, 0.1, 0.0), 1.0);
  EXPECT_NEAR(carnot_cop(0.3, 0.1), 0.5, 1e-15);
  for (double x : {0.5, 2.0, 5.0}) EXPECT_LT(cop(0.3, 0.1, irr_rev_ratio(1, x)), carnot_cop(0.3, 0.1));
  EXPECT_LT(irr_rev_ratio(1, 30.0), 0.04);
  EXPECT_NEAR(cop(0.3, 0.1, irr_rev_ratio(1, 30.0)), carnot_cop(0.3, 0.1), 0.04);
  EXPECT_THROW(cop(0.1, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(cop(0.2, 0.1, -1.0), std::invalid_argument);
  EXPECT_THROW(cop(0.2, 0.0, 0.0), std::invalid_argument);
}

TEST(CycleSummary, ConsistentWithParts) {
  auto p = reference_parameters();
  const double t_r = population_to_temperature(0.12, p.qubit.f01);
  p.qubit.p_th = 0.12;
  const auto c = cycle_summary(p, 0.1, t_r, 1, false);
  EXPECT_NEAR(c.p_excited, 0.12, 1e-12);
  EXPECT_NEAR(c.delta_u, 0.239, 5e-4);
  EXPECT_NEAR(c.delta_s, 0.367, 5e-4);
  EXPECT_NEAR(c.dq_r_joule, -c.w_q_joule, 1e-40);
  EXPECT_NEAR(c.w_m_joule, constants::kBoltzmann * 0.1 * c.delta_s, 1e-35);
  EXPECT_NEAR(c.cop_denominator, 0.1 - t_r + 0.1 * c.irr_rev, 1e-15);
  EXPECT_EQ(c.dynamic_dq_r, 0.0);
  EXPECT_THROW(cycle_summary(p, 0.0, t_r), std::invalid_argument);
}

TEST(CycleSummary, FiniteReservoirHeatStaysBelowIdeal) {
  auto p = reference_parameters();
  const double t_r = population_to_temperature(0.12, p.qubit.f01);
  const auto c = cycle_summary(p, 0.1, t_r);
  EXPECT_GT(c.dynamic_dq_r, 0.0);
  EXPECT_LT(c.dynamic_dq_r, c.delta_u);
  EXPECT_GT(c.dynamic_peak_time, 10e-6);
  EXPECT_LT(c.dynamic_peak_time, 300e-6);
}
