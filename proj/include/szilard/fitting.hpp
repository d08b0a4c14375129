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
 * @file fitting.hpp
 * @brief Simultaneous least-squares fit of model parameters to several
 *        population curves, each produced by its own protocol.
 *
 * The optimizer is a Nelder-Mead simplex in box-normalized coordinates (every
 * free parameter mapped to [0, 1], trial points projected back into the box),
 * followed by seeded random restarts around the incumbent.
 */

#ifndef SZILARD_FITTING_HPP_
#define SZILARD_FITTING_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dynamics.hpp"

namespace szilard {

enum class Param : int { a = 0, b, c, gamma_q, gamma_t, p_th };
inline constexpr std::size_t kParamCount = 6;
inline constexpr std::array<Param, kParamCount> kAllParams{Param::a,       Param::b,       Param::c,
                                                           Param::gamma_q, Param::gamma_t, Param::p_th};

using ParamVector = std::array<double, kParamCount>;

inline const char* param_name(Param p) {
  switch (p) {
    case Param::a: return "a";
    case Param::b: return "b";
    case Param::c: return "c";
    case Param::gamma_q: return "gamma_q";
    case Param::gamma_t: return "gamma_t";
    case Param::p_th: return "p_th";
  }
  return "?";
}

inline Param parse_param(const std::string& name) {
  for (Param p : kAllParams)
    if (name == param_name(p)) return p;
  throw std::invalid_argument("unknown fit parameter '" + name + "'");
}

inline std::size_t idx(Param p) { return static_cast<std::size_t>(p); }

/// Rates in 1/s, the rest dimensionless.
inline ParamVector to_param_vector(const SystemParams& s) {
  return {s.ladder.a, s.ladder.b, s.ladder.c, s.qubit.gamma_q, s.ladder.gamma_t, s.qubit.p_th};
}

inline SystemParams with_params(SystemParams base, const ParamVector& v) {
  base.ladder.a = v[idx(Param::a)];
  base.ladder.b = v[idx(Param::b)];
  base.ladder.c = v[idx(Param::c)];
  base.qubit.gamma_q = v[idx(Param::gamma_q)];
  base.ladder.gamma_t = v[idx(Param::gamma_t)];
  base.qubit.p_th = v[idx(Param::p_th)];
  return base;
}

struct Bounds {
  double lo = 0.0;
  double hi = 1.0;
};

inline std::array<Bounds, kParamCount> default_bounds() {
  return {Bounds{0.0, 5e4}, Bounds{0.05, 3.0}, Bounds{0.0, 0.5},
          Bounds{0.0, 1e5}, Bounds{0.0, 1e3},  Bounds{0.0, 0.5}};
}

/// One measured curve. Only samples with window_start <= t <= window_end enter
/// the residual. An empty stderr means unit weights.
struct Dataset {
  std::string name;
  Experiment experiment;
  std::vector<double> times;
  std::vector<double> p_q;
  std::vector<double> stderr_;
  double window_start = 0.0;
  double window_end = std::numeric_limits<double>::infinity();
};

struct FitProblem {
  std::vector<Dataset> datasets;
  std::vector<Param> free_params;
  SystemParams base;  // ladder size and f01; the six fit parameters come from the candidate
  std::array<Bounds, kParamCount> bounds = default_bounds();
  int restarts = 3;
  std::uint64_t seed = 0;
  int max_evaluations = 4000;
  double tolerance = 1e-10;

  void validate() const {
    if (datasets.empty()) throw std::invalid_argument("fit problem has no datasets");
    for (Param p : kAllParams) {
      const auto& b = bounds[idx(p)];
      if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi))
        throw std::invalid_argument(std::string("bounds of ") + param_name(p) + " must be finite and ordered");
    }
    for (std::size_t i = 0; i < free_params.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (free_params[i] == free_params[j])
          throw std::invalid_argument(std::string("parameter listed twice: ") + param_name(free_params[i]));
    for (const auto& d : datasets) {
      if (d.times.size() != d.p_q.size() || (!d.stderr_.empty() && d.stderr_.size() != d.times.size()))
        throw std::invalid_argument("dataset '" + d.name + "': column lengths differ");
      for (double s : d.stderr_)
        if (!(s > 0.0)) throw std::invalid_argument("dataset '" + d.name + "': stderr entries must be > 0");
      const bool any = std::any_of(d.times.begin(), d.times.end(),
                                   [&](double t) { return t >= d.window_start && t <= d.window_end; });
      if (!any) throw std::invalid_argument("dataset '" + d.name + "': fit window holds no samples");
    }
    if (restarts < 0 || max_evaluations < 1) throw std::invalid_argument("fit restarts/max_evaluations invalid");
  }
};

struct FitResult {
  std::vector<Param> free_params;
  ParamVector values{};          // every parameter, free ones at their optimum
  std::vector<double> uncertainties;  // one per free parameter
  double residual_norm = 0.0;
  double initial_residual_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  std::string termination;
  bool converged = false;

  double value(Param p) const { return values[idx(p)]; }
};

namespace detail {

struct DatasetWindow {
  std::vector<double> times;
  std::vector<double> p_q;
  std::vector<double> weight;
};

inline std::vector<DatasetWindow> windows(const FitProblem& problem) {
  std::vector<DatasetWindow> out;
  for (const auto& d : problem.datasets) {
    DatasetWindow w;
    for (std::size_t i = 0; i < d.times.size(); ++i) {
      if (d.times[i] < d.window_start || d.times[i] > d.window_end) continue;
      w.times.push_back(d.times[i]);
      w.p_q.push_back(d.p_q[i]);
      w.weight.push_back(d.stderr_.empty() ? 1.0 : 1.0 / d.stderr_[i]);
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline std::string describe(const ParamVector& v) {
  std::string s;
  for (Param p : kAllParams) s += std::string(s.empty() ? "" : ", ") + param_name(p) + "=" + std::to_string(v[idx(p)]);
  return s;
}

inline Eigen::VectorXd weighted_residuals(const FitProblem& problem, const std::vector<DatasetWindow>& wins,
                                          const ParamVector& candidate) {
  std::size_t total = 0;
  for (const auto& w : wins) total += w.times.size();
  Eigen::VectorXd r(static_cast<Eigen::Index>(total));
  try {
    const Propagator prop(with_params(problem.base, candidate));
    Eigen::Index k = 0;
    for (std::size_t d = 0; d < wins.size(); ++d) {
      const auto model = sample_qubit_population(problem.datasets[d].experiment, prop, wins[d].times);
      for (std::size_t i = 0; i < model.size(); ++i) r(k++) = (model[i] - wins[d].p_q[i]) * wins[d].weight[i];
    }
  } catch (const std::exception& e) {
    throw NumericalError(std::string("model evaluation failed at candidate {") + describe(candidate) + "}: " + e.what());
  }
  return r;
}

}  // namespace detail

/// Weighted residual vector (model - data) / stderr over every dataset window.
inline Eigen::VectorXd residuals(const FitProblem& problem, const ParamVector& candidate) {
  problem.validate();
  for (Param p : problem.free_params) {
    const auto& b = problem.bounds[idx(p)];
    const double v = candidate[idx(p)];
    if (v < b.lo || v > b.hi) throw std::invalid_argument(std::string("candidate ") + param_name(p) + " out of bounds");
  }
  return detail::weighted_residuals(problem, detail::windows(problem), candidate);
}

namespace detail {

/// Nelder-Mead on the unit box. Returns the best vertex; `evals` counts objective calls.
template <typename F>
std::pair<Eigen::VectorXd, double> simplex_search(F&& f, const Eigen::VectorXd& start, double step, double tol,
                                                  int budget, int& evals, int& iterations, bool& converged) {
  const Eigen::Index n = start.size();
  auto clip = [](Eigen::VectorXd u) { return u.cwiseMax(0.0).cwiseMin(1.0).eval(); };
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  pts.push_back(clip(start));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd u = pts[0];
    u(i) += (u(i) + step <= 1.0) ? step : -step;
    pts.push_back(clip(u));
  }
  for (const auto& p : pts) {
    vals.push_back(f(p));
    ++evals;
  }
  std::vector<std::size_t> order(pts.size());
  converged = false;
  while (evals < budget) {
    ++iterations;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return vals[x] < vals[y]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    double size = 0.0;
    for (const auto& p : pts) size = std::max(size, (p - pts[best]).cwiseAbs().maxCoeff());
    if (vals[worst] - vals[best] <= tol * (std::abs(vals[best]) + tol) && size < 1e-9) {
      converged = true;
      break;
    }
    if (size < 1e-12) {
      converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i : order)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);

    auto trial = [&](double coeff) {
      Eigen::VectorXd u = clip(centroid + coeff * (pts[worst] - centroid));
      const double v = f(u);
      ++evals;
      return std::make_pair(u, v);
    };
    auto [xr, fr] = trial(-1.0);
    if (fr < vals[best]) {
      auto [xe, fe] = trial(-2.0);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      auto [xc, fc] = fr < vals[worst] ? trial(-0.5) : trial(0.5);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if (i == best) continue;
          pts[i] = clip(pts[best] + 0.5 * (pts[i] - pts[best]));
          vals[i] = f(pts[i]);
          ++evals;
        }
      }
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  return {pts[static_cast<std::size_t>(it - vals.begin())], *it};
}

}  // namespace detail

/// Bounded simplex fit; deterministic for a given (problem, initial). Fixed
/// parameters keep their values from `initial`.
inline FitResult fit(const FitProblem& problem, const ParamVector& initial) {
  problem.validate();
  const auto wins = detail::windows(problem);
  const auto& free = problem.free_params;
  for (Param p : free) {
    const auto& b = problem.bounds[idx(p)];
    if (initial[idx(p)] < b.lo || initial[idx(p)] > b.hi)
      throw std::invalid_argument(std::string("initial ") + param_name(p) + " lies outside its bounds");
  }

  FitResult res;
  res.free_params = free;
  res.values = initial;
  const double r0 = detail::weighted_residuals(problem, wins, initial).norm();
  res.initial_residual_norm = r0;
  res.evaluations = 1;
  if (free.empty()) {
    res.residual_norm = r0;
    res.termination = "no free parameters; residuals evaluated once";
    res.converged = true;
    return res;
  }

  const auto n = static_cast<Eigen::Index>(free.size());
  auto to_full = [&](const Eigen::VectorXd& u) {
    ParamVector v = initial;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& b = problem.bounds[idx(free[i])];
      v[idx(free[i])] = b.lo + std::clamp(u(i), 0.0, 1.0) * (b.hi - b.lo);
    }
    return v;
  };
  auto objective = [&](const Eigen::VectorXd& u) { return detail::weighted_residuals(problem, wins, to_full(u)).squaredNorm(); };

  Eigen::VectorXd u0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& b = problem.bounds[idx(free[i])];
    u0(i) = (initial[idx(free[i])] - b.lo) / (b.hi - b.lo);
  }

  int evals = 0, iterations = 0;
  bool converged = false;
  auto [best_u, best_f] =
      detail::simplex_search(objective, u0, 0.1, problem.tolerance, problem.max_evaluations, evals, iterations, converged);
  bool all_converged = converged;

  std::mt19937_64 rng(problem.seed);
  std::normal_distribution<double> jitter(0.0, 0.05);
  for (int r = 0; r < problem.restarts && evals < problem.max_evaluations; ++r) {
    Eigen::VectorXd start = best_u;
    for (Eigen::Index i = 0; i < n; ++i) start(i) = std::clamp(start(i) + jitter(rng), 0.0, 1.0);
    auto [u, f] = detail::simplex_search(objective, start, 0.05, problem.tolerance, problem.max_evaluations, evals,
                                         iterations, converged);
    all_converged = all_converged && converged;
    if (f < best_f) {
      best_f = f;
      best_u = u;
    }
  }
  res.evaluations += evals;
  res.iterations = iterations;

  if (!(best_f <= r0 * r0)) {
    best_f = r0 * r0;
    best_u = u0;
  }
  res.values = to_full(best_u);
  res.residual_norm = std::sqrt(best_f);
  res.converged = all_converged;
  res.termination = all_converged ? "simplex converged" : "evaluation budget exhausted";

  // Uncertainties from the Gauss-Newton curvature, central differences in physical units.
  const Eigen::VectorXd r_best = detail::weighted_residuals(problem, wins, res.values);
  Eigen::MatrixXd jac(r_best.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Param p = free[i];
    const auto& b = problem.bounds[idx(p)];
    const double h = 1e-5 * (b.hi - b.lo);
    ParamVector lo = res.values, hi = res.values;
    lo[idx(p)] = std::max(b.lo, res.values[idx(p)] - h);
    hi[idx(p)] = std::min(b.hi, res.values[idx(p)] + h);
    jac.col(i) = (detail::weighted_residuals(problem, wins, hi) - detail::weighted_residuals(problem, wins, lo)) /
                 (hi[idx(p)] - lo[idx(p)]);
    res.evaluations += 2;
  }
  const Eigen::Index dof = std::max<Eigen::Index>(1, r_best.size() - n);
  const double scale = r_best.squaredNorm() / static_cast<double>(dof);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  res.uncertainties.assign(free.size(), std::numeric_limits<double>::quiet_NaN());
  if (lu.isInvertible()) {
    const Eigen::MatrixXd cov = lu.inverse() * scale;
    for (Eigen::Index i = 0; i < n; ++i) res.uncertainties[i] = std::sqrt(std::max(0.0, cov(i, i)));
  }
  return res;
}

struct ProfilePoint {
  double value = 0.0;
  double residual_norm = 0.0;
};

/// Best residual norm with `param` pinned at each grid value and the other free
/// parameters refitted from `initial`.
inline std::vector<ProfilePoint> profile_parameter(const FitProblem& problem, Param param, const std::vector<double>& grid,
                                                   const ParamVector& initial) {
  const auto& b = problem.bounds[idx(param)];
  FitProblem pinned = problem;
  std::erase(pinned.free_params, param);
  std::vector<ProfilePoint> out;
  for (double v : grid) {
    if (v < b.lo || v > b.hi) throw std::invalid_argument("profile grid value outside the parameter bounds");
    ParamVector start = initial;
    start[idx(param)] = v;
    pinned.base = with_params(pinned.base, start);
    out.push_back({v, fit(pinned, start).residual_norm});
  }
  return out;
}

}  // namespace szilard

#endif  // SZILARD_FITTING_HPP_
