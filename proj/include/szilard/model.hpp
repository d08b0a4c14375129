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

/**
 * @file model.hpp
 * @brief Qubit and TLS-ladder parameters, the Lorentzian coupling ladder and
 *        thermal-population conversions.
 */

#ifndef SZILARD_MODEL_HPP_
#define SZILARD_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "constants.hpp"

namespace szilard {

/// Qubit transition frequency (Hz), intrinsic relaxation rate (1/s) and the
/// excited population of its intrinsic bath.
struct QubitParams {
  double f01 = 1.2e9;
  double gamma_q = 10.9e3;
  double p_th = 0.0;

  void validate() const {
    if (!(f01 > 0.0)) throw std::invalid_argument("qubit f01 must be > 0");
    if (!(gamma_q >= 0.0)) throw std::invalid_argument("qubit gamma_q must be >= 0");
    // p_th >= 0.5 is allowed: it models an inverted bath.
    if (!(p_th >= 0.0 && p_th <= 1.0)) throw std::invalid_argument("qubit p_th must lie in [0, 1]");
  }
};

/// Equally spaced TLS ladder with couplings a / (b^2 + (k - c)^2).
struct LadderParams {
  double a = 5.0e3;   // 1/s
  double b = 0.48;
  double c = 0.0;     // ladder shift in units of the spacing
  int n_tls = 51;     // odd, or 0 for "no ladder"
  double gamma_t = 20.0;  // 1/s, intrinsic TLS relaxation

  void validate() const {
    if (!(a >= 0.0)) throw std::invalid_argument("ladder a must be >= 0");
    if (!(b > 0.0)) throw std::invalid_argument("ladder b must be > 0 (singular Lorentzian)");
    if (!(c >= 0.0 && c <= 0.5)) throw std::invalid_argument("ladder c must lie in [0, 0.5]");
    if (n_tls < 0) throw std::invalid_argument("ladder n_tls must be >= 0");
    if (n_tls > 0 && n_tls % 2 == 0)
      throw std::invalid_argument("ladder n_tls must be odd so the ladder is symmetric around the qubit");
    if (!(gamma_t >= 0.0)) throw std::invalid_argument("ladder gamma_t must be >= 0");
  }

  /// Ladder index of the i-th TLS, i in [0, n_tls).
  int index(std::size_t i) const { return static_cast<int>(i) - (n_tls - 1) / 2; }
};

struct SystemParams {
  QubitParams qubit;
  LadderParams ladder;

  void validate() const {
    qubit.validate();
    ladder.validate();
  }
};

/// Occupation probabilities of the qubit and each TLS at absolute time t.
struct PopulationState {
  double p_q = 0.0;
  std::vector<double> p_t;
  double t = 0.0;

  void validate(int n_tls) const {
    if (!(p_q >= 0.0 && p_q <= 1.0)) throw std::invalid_argument("population p_q outside [0, 1]");
    if (p_t.size() != static_cast<std::size_t>(n_tls))
      throw std::invalid_argument("population p_t length " + std::to_string(p_t.size()) +
                                  " does not match n_tls " + std::to_string(n_tls));
    for (double p : p_t)
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("population p_t entry outside [0, 1]");
  }

  /// Every degree of freedom at the same population p.
  static PopulationState uniform(double p, int n_tls, double t = 0.0) {
    return PopulationState{p, std::vector<double>(static_cast<std::size_t>(n_tls), p), t};
  }
};

/// Coupling rates Gamma_qt^k for k = -(n-1)/2 .. (n-1)/2, in 1/s.
inline std::vector<double> build_coupling_ladder(const LadderParams& ladder) {
  ladder.validate();
  std::vector<double> rates(static_cast<std::size_t>(ladder.n_tls));
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double detuning = ladder.index(i) - ladder.c;
    rates[i] = ladder.a / (ladder.b * ladder.b + detuning * detuning);
  }
  return rates;
}

inline double total_coupling(const LadderParams& ladder) {
  const auto rates = build_coupling_ladder(ladder);
  return std::accumulate(rates.begin(), rates.end(), 0.0);
}

/// Relaxation rate Gamma_1 = Gamma_q + sum_k Gamma_qt^k.
inline double relaxation_rate(const SystemParams& params) {
  return params.qubit.gamma_q + total_coupling(params.ladder);
}

/// Transverse coupling g and ladder spacing Delta recovered from (a, b) for an
/// assumed dephasing rate. Both come out in angular units (rad/s); divide by
/// 2*pi for display.
struct CouplingAndSpacing {
  double g = 0.0;
  double delta = 0.0;
};

inline CouplingAndSpacing derive_g_delta(const LadderParams& ladder, double gamma_phi) {
  ladder.validate();
  if (!(gamma_phi > 0.0)) throw std::invalid_argument("gamma_phi must be > 0");
  return {std::sqrt(ladder.a * gamma_phi / (2.0 * ladder.b * ladder.b)), gamma_phi / ladder.b};
}

/// Excited population of a two-level system with splitting f at temperature T.
inline double thermal_population(double f, double temperature) {
  if (!(f > 0.0)) throw std::invalid_argument("thermal_population: f must be > 0");
  if (!(temperature > 0.0))
    throw std::invalid_argument("thermal_population: T must be > 0 (use population_to_temperature for inversion)");
  const double beta_eps = constants::kPlanckOverBoltzmann * f / temperature;
  return 1.0 / (1.0 + std::exp(beta_eps));
}

/// Inverse of thermal_population; negative for inverted populations (p > 0.5).
inline double population_to_temperature(double p, double f) {
  if (!(f > 0.0)) throw std::invalid_argument("population_to_temperature: f must be > 0");
  if (!(p > 0.0 && p < 1.0) || p == 0.5)
    throw std::invalid_argument("population_to_temperature: p must lie in (0, 1) and differ from 0.5");
  return constants::kPlanckOverBoltzmann * f / std::log((1.0 - p) / p);
}

/// Normalized Boltzmann weights of the given level energies (Hz) at temperature T.
inline std::vector<double> multilevel_thermal(std::span<const double> levels, double temperature) {
  if (levels.empty()) throw std::invalid_argument("multilevel_thermal: empty level list");
  if (!(temperature > 0.0)) throw std::invalid_argument("multilevel_thermal: T must be > 0");
  double lowest = levels[0];
  for (double e : levels) lowest = std::min(lowest, e);
  std::vector<double> weights;
  weights.reserve(levels.size());
  for (double e : levels)
    weights.push_back(std::exp(-constants::kPlanckOverBoltzmann * (e - lowest) / temperature));
  const double z = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= z;
  return weights;
}

/// Effective temperature of the idle qubit population.
inline constexpr double kIdleTemperature = 28.3e-3;

/// Fitted device parameters: a = 5.0 kHz, b = 0.48, c = 0, Gamma_q = 10.9 kHz,
/// 1/Gamma_t = 50 ms, 51 TLSs, idle population at kIdleTemperature.
inline SystemParams reference_parameters() {
  SystemParams p;
  p.qubit.f01 = 1.2e9;
  p.qubit.gamma_q = 10.9e3;
  p.qubit.p_th = thermal_population(p.qubit.f01, kIdleTemperature);
  p.ladder = LadderParams{5.0e3, 0.48, 0.0, 51, 20.0};
  return p;
}

}  // namespace szilard

#endif  // SZILARD_MODEL_HPP_
