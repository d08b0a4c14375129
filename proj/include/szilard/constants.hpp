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

#ifndef SZILARD_CONSTANTS_HPP_
#define SZILARD_CONSTANTS_HPP_

#include <numbers>
#include <stdexcept>
#include <string>

namespace szilard {

/// Physical constants. Every temperature conversion goes through kPlanckOverBoltzmann.
namespace constants {
inline constexpr double kPlanckOverBoltzmann = 4.799243e-11;  // h / k_B in s*K
inline constexpr double kBoltzmann = 1.380649e-23;            // J / K
inline constexpr double kPlanck = 6.62607015e-34;             // J * s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Unit literals. Internally every quantity is SI: rates in 1/s, times in s,
/// frequencies in Hz, temperatures in K. "kHz" on a rate means 1e3 1/s.
namespace literals {
constexpr double operator""_Hz(long double v) { return static_cast<double>(v); }
constexpr double operator""_kHz(long double v) { return static_cast<double>(v) * 1e3; }
constexpr double operator""_MHz(long double v) { return static_cast<double>(v) * 1e6; }
constexpr double operator""_GHz(long double v) { return static_cast<double>(v) * 1e9; }
constexpr double operator""_s(long double v) { return static_cast<double>(v); }
constexpr double operator""_ms(long double v) { return static_cast<double>(v) * 1e-3; }
constexpr double operator""_us(long double v) { return static_cast<double>(v) * 1e-6; }
constexpr double operator""_ns(long double v) { return static_cast<double>(v) * 1e-9; }
constexpr double operator""_K(long double v) { return static_cast<double>(v); }
constexpr double operator""_mK(long double v) { return static_cast<double>(v) * 1e-3; }
}  // namespace literals

/// Raised when a numerical routine fails (eigensolver, non-converging fit).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace szilard

#endif  // SZILARD_CONSTANTS_HPP_
