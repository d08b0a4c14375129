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

// Flux algebra of a fluxonium whose junction is an asymmetric SQUID.

#ifndef SZILARD_DEVICE_HPP_
#define SZILARD_DEVICE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace szilard {

namespace device {
inline constexpr double kCapacitance = 6.9e-15;     // F
inline constexpr double kInductance = 231e-9;       // H
inline constexpr double kEffectiveEj = 5.6e9;       // Hz
inline constexpr double kAreaRatio = 50.0;
inline constexpr double kFluxBias = 21.48;          // flux quanta
}  // namespace device

struct SquidParams {
  double ej1 = 0.0;
  double ej2 = 0.0;
  double v_ratio = device::kAreaRatio;
  double phi_ext = device::kFluxBias;

  void validate() const {
    if (!(ej1 >= 0.0) || !(ej2 >= 0.0)) throw std::invalid_argument("Josephson energies must be >= 0");
    if (!(v_ratio > 0.0)) throw std::invalid_argument("area ratio V must be > 0");
  }
};

struct EffectiveJunction {
  double ej_eff = 0.0;        // Hz, carries the sign of E_sigma
  double phase_offset = 0.0;  // rad
};

/// E1 cos(x) + E2 cos(x - phi_s) == ej_eff cos(x - phi_s/2 - offset) for all x.
inline EffectiveJunction effective_junction(double ej1, double ej2, double phi_s) {
  if (!(ej1 >= 0.0) || !(ej2 >= 0.0)) throw std::invalid_argument("Josephson energies must be >= 0");
  const double sigma = (ej1 + ej2) * std::cos(phi_s / 2.0);
  const double delta = (ej2 - ej1) * std::sin(phi_s / 2.0);
  if (sigma == 0.0 && delta == 0.0) return {0.0, 0.0};
  if (sigma == 0.0) return {std::abs(delta), std::atan2(delta, 0.0)};
  const double sign = sigma > 0.0 ? 1.0 : -1.0;
  return {sign * std::hypot(sigma, delta), std::atan(delta / sigma)};
}

/// Loop phases, all in flux quanta.
struct FluxPartition {
  double phi_s = 0.0;
  double phi_l = 0.0;
  double phi_l_plus_s = 0.0;
};

inline FluxPartition flux_partition(double v_ratio, double phi_ext) {
  if (!(v_ratio > 0.0)) throw std::invalid_argument("area ratio V must be > 0");
  const double share = 1.0 / (2.0 * v_ratio + 1.0);
  FluxPartition out;
  out.phi_s = 2.0 * share * phi_ext;
  out.phi_l = (1.0 - share) * phi_ext;
  out.phi_l_plus_s = (1.0 + share) * phi_ext;
  return out;
}

struct InterferenceWitness {
  std::int64_t m = 0;
  std::int64_t k = 0;
};

/// Searches V = (2k - 1) / (2m) over 1 <= m, k <= bound. Integer V has no
/// solution since 2mV is even while 2k - 1 is odd.
inline std::optional<InterferenceWitness> interference_condition(double v_ratio, std::int64_t bound = 1000) {
  if (bound < 1) throw std::invalid_argument("interference search bound must be >= 1");
  if (!(v_ratio > 0.0)) throw std::invalid_argument("area ratio V must be > 0");
  for (std::int64_t m = 1; m <= bound; ++m) {
    const double twice_k = 2.0 * static_cast<double>(m) * v_ratio + 1.0;
    const double k = std::round(twice_k / 2.0);
    if (k < 1.0 || k > static_cast<double>(bound)) continue;
    const double v = (2.0 * k - 1.0) / (2.0 * static_cast<double>(m));
    if (std::abs(v - v_ratio) <= 1e-9 * std::max(1.0, v_ratio))
      return InterferenceWitness{m, static_cast<std::int64_t>(k)};
  }
  return std::nullopt;
}

}  // namespace szilard

#endif  // SZILARD_DEVICE_HPP_
