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
 * @file thermo.hpp
 * @brief Szilard-engine bookkeeping for a ground state plus a d-fold
 *        degenerate excited level at splitting eps. Everything is expressed
 *        through beta_eps; energies in units of eps or k_B T, entropies in k_B.
 */

#ifndef SZILARD_THERMO_HPP_
#define SZILARD_THERMO_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "constants.hpp"
#include "dynamics.hpp"
#include "model.hpp"

namespace szilard {

namespace detail {

inline void check_degeneracy(int d) {
  if (d < 1) throw std::invalid_argument("degeneracy d must be >= 1");
}

/// ln(d + e^x) - x without overflow.
inline double log_partition_excess(int d, double x) {
  return x > 0.0 ? std::log1p(d * std::exp(-x)) : std::log(d + std::exp(x)) - x;
}

}  // namespace detail

/// Excited-manifold population d / (d + e^{beta eps}).
inline double excited_population(int d, double beta_eps) {
  detail::check_degeneracy(d);
  return beta_eps > 0.0 ? d * std::exp(-beta_eps) / (1.0 + d * std::exp(-beta_eps)) : d / (d + std::exp(beta_eps));
}

/// U / eps.
inline double internal_energy(int d, double beta_eps) { return excited_population(d, beta_eps); }

/// beta_eps of a d = 1 system with excited population p.
inline double beta_eps_from_population(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("population must lie in (0, 1)");
  return std::log(1.0 / p - 1.0);
}

struct EntropySplit {
  double s_rev = 0.0;  // beta U
  double s_irr = 0.0;  // ln(d + e^{beta eps}) - beta eps
  double s = 0.0;
};

inline EntropySplit entropy_split(int d, double beta_eps) {
  detail::check_degeneracy(d);
  EntropySplit out;
  out.s_rev = beta_eps * internal_energy(d, beta_eps);
  out.s_irr = detail::log_partition_excess(d, beta_eps);
  out.s = out.s_rev + out.s_irr;
  return out;
}

/// Average entropy removed by a projective g / excited-manifold measurement:
/// the post-measurement entropy is 0 in g and ln d in the excited manifold.
inline double measurement_entropy_reduction(int d, double beta_eps) {
  const double p_e = excited_population(d, beta_eps);
  return entropy_split(d, beta_eps).s - p_e * std::log(static_cast<double>(d));
}

/// S_irr / S_rev, evaluated as (1 + y) ln(1 + y) / (y beta_eps) with y = d e^{-beta_eps}.
inline double irr_rev_ratio(int d, double beta_eps) {
  detail::check_degeneracy(d);
  if (beta_eps == 0.0) throw std::invalid_argument("irr_rev_ratio: S_rev vanishes at beta_eps = 0");
  const double y = d * std::exp(-beta_eps);
  if (y == 0.0) return 1.0 / beta_eps;
  return (1.0 + y) * std::log1p(y) / (y * beta_eps);
}

/// Coefficient of performance T_R / (T_A - T_R + T_A * ratio).
inline double cop(double t_a, double t_r, double irr_rev) {
  if (!(t_r > 0.0)) throw std::invalid_argument("cop: T_R must be > 0");
  if (!(t_a > t_r)) throw std::invalid_argument("cop: T_A must exceed T_R");
  if (!(irr_rev >= 0.0)) throw std::invalid_argument("cop: irr/rev ratio must be >= 0");
  return t_r / (t_a - t_r + t_a * irr_rev);
}

inline double carnot_cop(double t_a, double t_r) { return cop(t_a, t_r, 0.0); }

/// One measurement-and-reset cycle of the refrigerator. Dimensionless fields
/// are in k_B T_R (energies) or k_B (entropies); *_joule fields are SI.
struct CycleSummary {
  int d = 1;
  double beta_eps = 0.0;
  double p_excited = 0.0;
  double delta_u = 0.0;  // beta_R U, energy removed from the qubit
  double delta_s = 0.0;  // measurement entropy reduction
  double s_rev = 0.0;
  double s_irr = 0.0;
  double irr_rev = 0.0;
  double w_m_joule = 0.0;     // k_B T_A delta_s
  double w_q_joule = 0.0;     // -U
  double dq_r_joule = 0.0;    // T_R s_rev = U
  double cop_denominator = 0.0;  // T_A - T_R + T_A ratio, K
  double dynamic_dq_r = 0.0;     // peak of the finite-reservoir heat curve, k_B T_R
  double dynamic_peak_time = 0.0;
};

inline CycleSummary cycle_summary(const SystemParams& params, double t_a, double t_r, int d = 1,
                                  bool with_dynamics = true) {
  if (!(t_a > 0.0) || !(t_r > 0.0)) throw std::invalid_argument("cycle_summary: temperatures must be > 0");
  detail::check_degeneracy(d);
  CycleSummary out;
  out.d = d;
  out.beta_eps = constants::kPlanckOverBoltzmann * params.qubit.f01 / t_r;
  out.p_excited = excited_population(d, out.beta_eps);
  const auto split = entropy_split(d, out.beta_eps);
  out.s_rev = split.s_rev;
  out.s_irr = split.s_irr;
  out.delta_u = split.s_rev;
  out.delta_s = measurement_entropy_reduction(d, out.beta_eps);
  out.irr_rev = irr_rev_ratio(d, out.beta_eps);
  const double kt_r = constants::kBoltzmann * t_r;
  out.w_m_joule = constants::kBoltzmann * t_a * out.delta_s;
  out.w_q_joule = -out.delta_u * kt_r;
  out.dq_r_joule = out.delta_u * kt_r;
  out.cop_denominator = t_a - t_r + t_a * out.irr_rev;
  if (with_dynamics) {
    const auto heat = heat_extraction_curve(params, t_r);
    out.dynamic_dq_r = heat.peak;
    out.dynamic_peak_time = heat.peak_time;
  }
  return out;
}

}  // namespace szilard

#endif  // SZILARD_THERMO_HPP_
