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
 * @file dynamics.hpp
 * @brief Deterministic propagation of the coupled qubit/TLS rate equations.
 *
 * The populations x = (p_q, p_t^1 .. p_t^n) obey dx/dt = M x + v with
 *
 *   M_00 = -(Gamma_q + sum_k Gamma_qt^k),  M_0k = M_k0 = Gamma_qt^k,
 *   M_kk = -(Gamma_t + Gamma_qt^k),        v = p_th (Gamma_q, Gamma_t, ..., Gamma_t).
 *
 * M is symmetric and negative semi-definite, so one eigendecomposition gives
 * the exact solution for any step length.
 */

#ifndef SZILARD_DYNAMICS_HPP_
#define SZILARD_DYNAMICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "constants.hpp"
#include "experiment.hpp"
#include "model.hpp"

namespace szilard {

namespace detail {

inline double clip_population(double p) {
  constexpr double kSlack = 1e-9;
  if (!(p >= -kSlack && p <= 1.0 + kSlack))
    throw NumericalError("propagated population " + std::to_string(p) + " left [0, 1]");
  return std::clamp(p, 0.0, 1.0);
}

// (e^{lambda t} - 1) / lambda, continuous at lambda = 0.
inline double phi1(double lambda, double t) {
  if (lambda == 0.0) return t;
  return std::expm1(lambda * t) / lambda;
}

}  // namespace detail

inline Eigen::VectorXd to_vector(const PopulationState& s) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(s.p_t.size() + 1));
  x(0) = s.p_q;
  for (std::size_t k = 0; k < s.p_t.size(); ++k) x(static_cast<Eigen::Index>(k + 1)) = s.p_t[k];
  return x;
}

inline PopulationState to_state(const Eigen::VectorXd& x, double t) {
  PopulationState s;
  s.p_q = detail::clip_population(x(0));
  s.p_t.resize(static_cast<std::size_t>(x.size() - 1));
  for (std::size_t k = 0; k < s.p_t.size(); ++k)
    s.p_t[k] = detail::clip_population(x(static_cast<Eigen::Index>(k + 1)));
  s.t = t;
  return s;
}

/// Rate matrix, drive vector and their cached spectral decomposition.
/// Immutable after construction.
class Propagator {
 public:
  explicit Propagator(const SystemParams& params) : params_(params) {
    params_.validate();
    rates_ = build_coupling_ladder(params_.ladder);
    const auto n = static_cast<Eigen::Index>(rates_.size());
    const double p_th = params_.qubit.p_th;
    const double gamma_t = params_.ladder.gamma_t;

    generator_ = Eigen::MatrixXd::Zero(n + 1, n + 1);
    drive_ = Eigen::VectorXd::Constant(n + 1, gamma_t * p_th);
    drive_(0) = params_.qubit.gamma_q * p_th;
    double coupling_sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double g = rates_[static_cast<std::size_t>(k)];
      generator_(0, k + 1) = g;
      generator_(k + 1, 0) = g;
      generator_(k + 1, k + 1) = -(gamma_t + g);
      coupling_sum += g;
    }
    generator_(0, 0) = -(params_.qubit.gamma_q + coupling_sum);
    gamma_1_ = params_.qubit.gamma_q + coupling_sum;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(generator_);
    if (solver.info() != Eigen::Success)
      throw NumericalError("eigendecomposition of the rate matrix failed");
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    drive_modes_ = eigenvectors_.transpose() * drive_;
    qubit_row_ = eigenvectors_.row(0);
  }

  const SystemParams& params() const { return params_; }
  const std::vector<double>& coupling_rates() const { return rates_; }
  double gamma_1() const { return gamma_1_; }
  int n_tls() const { return static_cast<int>(rates_.size()); }
  const Eigen::MatrixXd& generator() const { return generator_; }
  const Eigen::VectorXd& drive() const { return drive_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  /// First row of the eigenvector matrix: projects modes onto p_q.
  const Eigen::RowVectorXd& qubit_row() const { return qubit_row_; }

  /// Modal coordinates of a population vector.
  Eigen::VectorXd modes(const Eigen::VectorXd& x) const { return eigenvectors_.transpose() * x; }

  /// Modal coordinates after dt, starting from modal coordinates c0.
  Eigen::VectorXd evolve_modes(const Eigen::VectorXd& c0, double dt) const {
    Eigen::VectorXd c(c0.size());
    for (Eigen::Index j = 0; j < c0.size(); ++j) {
      const double lambda = eigenvalues_(j);
      c(j) = std::exp(lambda * dt) * c0(j) + detail::phi1(lambda, dt) * drive_modes_(j);
    }
    return c;
  }

  Eigen::VectorXd advance(const Eigen::VectorXd& x, double dt) const {
    if (!(dt >= 0.0)) throw std::invalid_argument("propagation step must be >= 0");
    return eigenvectors_ * evolve_modes(modes(x), dt);
  }

  PopulationState advance(const PopulationState& s, double dt) const {
    s.validate(n_tls());
    return to_state(advance(to_vector(s), dt), s.t + dt);
  }

  /// w^T x(dt) in O(n) for a weight row already projected with project().
  double observe(const Eigen::RowVectorXd& projected, const Eigen::VectorXd& c0, double dt) const {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < c0.size(); ++j) {
      const double lambda = eigenvalues_(j);
      acc += projected(j) * (std::exp(lambda * dt) * c0(j) + detail::phi1(lambda, dt) * drive_modes_(j));
    }
    return acc;
  }

  Eigen::RowVectorXd project(const Eigen::RowVectorXd& weights) const { return weights * eigenvectors_; }

  /// Instantaneous upward rate sum_k Gamma_qt^k p_t^k + Gamma_q p_th.
  double gamma_up(const Eigen::VectorXd& x) const {
    double up = params_.qubit.gamma_q * params_.qubit.p_th;
    for (std::size_t k = 0; k < rates_.size(); ++k) up += rates_[k] * x(static_cast<Eigen::Index>(k + 1));
    return up;
  }

 private:
  SystemParams params_;
  std::vector<double> rates_;
  double gamma_1_ = 0.0;
  Eigen::MatrixXd generator_;
  Eigen::VectorXd drive_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd drive_modes_;
  Eigen::RowVectorXd qubit_row_;
};

inline PopulationState propagate(const PopulationState& state, const SystemParams& params, double dt) {
  return Propagator(params).advance(state, dt);
}

/// TLS relaxation with the qubit held at 0 or 1: every TLS relaxes on its own
/// towards (Gamma_qt^k q + Gamma_t p_th) / (Gamma_t + Gamma_qt^k).
inline Eigen::VectorXd clamped_advance(const Eigen::VectorXd& x, std::span<const double> rates,
                                       const SystemParams& params, double dt, int qubit_value) {
  if (qubit_value != 0 && qubit_value != 1) throw std::invalid_argument("clamp value must be 0 or 1");
  if (!(dt >= 0.0)) throw std::invalid_argument("propagation step must be >= 0");
  const double gamma_t = params.ladder.gamma_t;
  const double p_th = params.qubit.p_th;
  Eigen::VectorXd out(x.size());
  out(0) = qubit_value;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k + 1);
    const double total = gamma_t + rates[k];
    if (total == 0.0) {
      out(i) = x(i);
      continue;
    }
    const double target = (rates[k] * qubit_value + gamma_t * p_th) / total;
    out(i) = target + (x(i) - target) * std::exp(-total * dt);
  }
  return out;
}

inline PopulationState propagate_clamped(const PopulationState& state, const SystemParams& params, double dt,
                                         int qubit_value) {
  const auto rates = build_coupling_ladder(params.ladder);
  state.validate(params.ladder.n_tls);
  return to_state(clamped_advance(to_vector(state), rates, params, dt, qubit_value), state.t + dt);
}

/// Sampled solution of a protocol. Times are origin-relative (see experiment.hpp).
struct DeterministicResult {
  std::vector<double> times;
  std::vector<PopulationState> states;
  std::vector<double> p_eq;
  std::vector<double> gamma_up;
  std::vector<double> gamma_down;
  double gamma_1 = 0.0;

  std::vector<double> qubit_population() const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.p_q);
    return out;
  }
};

/// {0} followed by `per_decade` log-spaced points per decade from t_min to t_max.
inline std::vector<double> log_time_grid(double t_min, double t_max, int per_decade = 40, bool include_zero = true) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || per_decade < 1)
    throw std::invalid_argument("log_time_grid: need 0 < t_min <= t_max and per_decade >= 1");
  std::vector<double> grid;
  if (include_zero) grid.push_back(0.0);
  const double decades = std::log10(t_max / t_min);
  const auto n = static_cast<int>(std::ceil(decades * per_decade - 1e-9));
  for (int i = 0; i <= n; ++i) {
    const double t = (i == n) ? t_max : t_min * std::pow(10.0, static_cast<double>(i) / per_decade);
    grid.push_back(t);
  }
  return grid;
}

inline std::vector<double> linear_time_grid(double t0, double t1, double step) {
  if (!(step > 0.0) || !(t1 >= t0)) throw std::invalid_argument("linear_time_grid: need step > 0 and t1 >= t0");
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor((t1 - t0) / step + 1e-9));
  grid.reserve(static_cast<std::size_t>(n + 1));
  for (long i = 0; i <= n; ++i) grid.push_back(t0 + static_cast<double>(i) * step);
  return grid;
}

/// Start state of a protocol segment; evaluates the state any time inside it.
class SegmentView {
 public:
  SegmentView(const Propagator& prop, const Eigen::VectorXd& start, int clamp)
      : prop_(&prop), start_(start), clamp_(clamp) {
    if (clamp_ < 0) modes_ = prop.modes(start);
  }

  Eigen::VectorXd state_at(double dt) const {
    if (dt == 0.0) return start_;
    if (clamp_ >= 0) return clamped_advance(start_, prop_->coupling_rates(), prop_->params(), dt, clamp_);
    return prop_->eigenvectors() * prop_->evolve_modes(modes_, dt);
  }

  double qubit_at(double dt) const {
    if (clamp_ >= 0) return clamp_;
    if (dt == 0.0) return start_(0);
    return prop_->observe(prop_->qubit_row(), modes_, dt);
  }

  bool clamped() const { return clamp_ >= 0; }

 private:
  const Propagator* prop_;
  Eigen::VectorXd start_;
  Eigen::VectorXd modes_;
  int clamp_;
};

namespace detail {

inline Eigen::VectorXd initial_vector(const Experiment& exp, const SystemParams& params) {
  if (exp.initial_state) return to_vector(*exp.initial_state);
  return to_vector(PopulationState::uniform(params.qubit.p_th, params.ladder.n_tls));
}

/// Walks the protocol and calls visit(sample_index, segment, dt_into_segment)
/// for every requested time. `times` must be non-decreasing and origin-relative.
template <typename Visit>
void walk_protocol(const Experiment& exp, const Propagator& prop, std::span<const double> times, Visit&& visit) {
  exp.validate(prop.n_tls());
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1]) throw std::invalid_argument("sample times must be non-decreasing");

  const double start = -exp.origin();
  const double end = exp.end_time();
  const double eps = 1e-12 * std::max(1.0, std::abs(end) + std::abs(start));
  if (!times.empty() && times.front() < start - eps)
    throw std::invalid_argument("sample time " + std::to_string(times.front()) + " precedes the protocol start");
  if (!times.empty() && times.back() > end + eps)
    throw std::invalid_argument("sample time " + std::to_string(times.back()) + " is past the protocol end " +
                                std::to_string(end));

  Eigen::VectorXd x = initial_vector(exp, prop.params());
  double t = start;
  std::size_t next = 0;

  auto segment = [&](double duration, int clamp) {
    if (clamp >= 0) x(0) = clamp;
    const SegmentView view(prop, x, clamp);
    while (next < times.size() && times[next] < t + duration) {
      visit(next, view, std::max(0.0, times[next] - t));
      ++next;
    }
    x = view.state_at(duration);
    t += duration;
  };

  for (const auto& step : exp.steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Stabilize>) {
            segment(s.duration(), to_bit(s.target));
          } else if constexpr (std::is_same_v<T, Initialize>) {
            x(0) = to_bit(s.target);
          } else if constexpr (std::is_same_v<T, PiPulseTrain>) {
            for (std::int64_t p = 0; p < s.pulses; ++p) {
              x(0) = 1.0 - x(0);
              segment(s.spacing, -1);
            }
          } else {
            segment(s.duration(), -1);
          }
        },
        step);
  }
  if (next < times.size()) {
    const SegmentView view(prop, x, -1);
    for (; next < times.size(); ++next) visit(next, view, 0.0);
  }
}

}  // namespace detail

inline DeterministicResult run_deterministic(const Experiment& exp, const Propagator& prop,
                                             std::span<const double> times) {
  DeterministicResult res;
  res.times.assign(times.begin(), times.end());
  res.states.resize(times.size());
  res.p_eq.resize(times.size());
  res.gamma_up.resize(times.size());
  res.gamma_down.resize(times.size());
  res.gamma_1 = prop.gamma_1();
  detail::walk_protocol(exp, prop, times, [&](std::size_t i, const SegmentView& seg, double dt) {
    const Eigen::VectorXd x = seg.state_at(dt);
    res.states[i] = to_state(x, times[i]);
    const double up = prop.gamma_up(x);
    res.gamma_up[i] = up;
    res.gamma_down[i] = res.gamma_1 - up;
    res.p_eq[i] = res.gamma_1 > 0.0 ? up / res.gamma_1 : std::nan("");
  });
  return res;
}

inline DeterministicResult run_deterministic(const Experiment& exp, const SystemParams& params,
                                             std::span<const double> times) {
  return run_deterministic(exp, Propagator(params), times);
}

/// Default sampling: 0 plus a log grid from 1 us to the protocol end.
inline DeterministicResult run_deterministic(const Experiment& exp, const SystemParams& params) {
  const double end = exp.end_time();
  const auto grid = end > 1e-6 ? log_time_grid(1e-6, end) : std::vector<double>{0.0};
  return run_deterministic(exp, params, grid);
}

/// Qubit population only; O(n) per sample instead of O(n^2).
inline std::vector<double> sample_qubit_population(const Experiment& exp, const Propagator& prop,
                                                   std::span<const double> times) {
  std::vector<double> out(times.size());
  detail::walk_protocol(exp, prop, times, [&](std::size_t i, const SegmentView& seg, double dt) {
    out[i] = detail::clip_population(seg.qubit_at(dt));
  });
  return out;
}

/// Reservoir heat change after one Szilard cooling iteration, in k_B T units.
struct HeatExtraction {
  std::vector<double> times;
  std::vector<double> delta_q;  // beta*eps * sum_k (p_th - p_t^k(t))
  double peak = 0.0;
  double peak_time = 0.0;
  double beta_eps = 0.0;
};

/// The system starts in equilibrium at T (p_th recomputed from f01 and T) and
/// the qubit is reset to g at t = 0. Every TLS carries the qubit's quantum hf01.
inline HeatExtraction heat_extraction_curve(const SystemParams& params, double temperature,
                                            double horizon = 1e-3, std::size_t samples = 2001) {
  if (!(temperature > 0.0)) throw std::invalid_argument("heat_extraction_curve: T must be > 0");
  if (samples < 3 || !(horizon > 0.0)) throw std::invalid_argument("heat_extraction_curve: bad sampling");
  SystemParams p = params;
  p.qubit.p_th = thermal_population(p.qubit.f01, temperature);
  const Propagator prop(p);
  const int n = prop.n_tls();

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n + 1, p.qubit.p_th);
  x(0) = 0.0;
  const Eigen::VectorXd c0 = prop.modes(x);
  Eigen::RowVectorXd tls_sum = Eigen::RowVectorXd::Ones(n + 1);
  tls_sum(0) = 0.0;
  const Eigen::RowVectorXd projected = prop.project(tls_sum);

  HeatExtraction out;
  out.beta_eps = constants::kPlanckOverBoltzmann * p.qubit.f01 / temperature;
  auto dq = [&](double t) {
    return t == 0.0 ? 0.0 : out.beta_eps * (n * p.qubit.p_th - prop.observe(projected, c0, t));
  };

  out.times.resize(samples);
  out.delta_q.resize(samples);
  std::size_t best = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    out.times[i] = horizon * static_cast<double>(i) / static_cast<double>(samples - 1);
    out.delta_q[i] = dq(out.times[i]);
    if (out.delta_q[i] > out.delta_q[best]) best = i;
  }
  out.peak = out.delta_q[best];
  out.peak_time = out.times[best];
  if (best > 0 && best + 1 < samples) {
    const auto [t_star, neg] = boost::math::tools::brent_find_minima(
        [&](double t) { return -dq(t); }, out.times[best - 1], out.times[best + 1], 52);
    if (-neg > out.peak) {
      out.peak = -neg;
      out.peak_time = t_star;
    }
  }
  return out;
}

}  // namespace szilard

#endif  // SZILARD_DYNAMICS_HPP_
