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
 * @file estimator.hpp
 * @brief Rate and T1 estimators over jump-trace ensembles.
 *
 * Jump method: for consecutive strobes t_rep apart, P_gg is the fraction of
 * traces read in g at the first strobe that are read in g again at the next,
 * and Gamma_up = -ln(P_gg) / t_rep (likewise P_ee and Gamma_down).
 * Conditioning uses the state left by the strobe: the assigned state, flipped
 * when the strobe fired a feedback pi-pulse.
 */

#ifndef SZILARD_ESTIMATOR_HPP_
#define SZILARD_ESTIMATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "constants.hpp"
#include "trajectory.hpp"

namespace szilard {

/// Transition tallies between one strobe and the next.
struct TransitionCounts {
  std::uint64_t from_g = 0;
  std::uint64_t g_to_g = 0;
  std::uint64_t from_e = 0;
  std::uint64_t e_to_e = 0;

  TransitionCounts& operator+=(const TransitionCounts& o) {
    from_g += o.from_g;
    g_to_g += o.g_to_g;
    from_e += o.from_e;
    e_to_e += o.e_to_e;
    return *this;
  }
};

/// Missing entries are NaN and have a matching line in `diagnostics`.
struct RateSeries {
  std::vector<double> times;
  std::vector<double> gamma_up, gamma_up_err;
  std::vector<double> gamma_down, gamma_down_err;
  std::vector<double> gamma_1, gamma_1_err;
  std::vector<double> p_eq, p_eq_err;
  int window = 1;
  std::vector<std::string> diagnostics;

  std::size_t size() const { return times.size(); }

  /// Recomputes gamma_1 and p_eq (with errors) from the two primary channels.
  void derive() {
    const std::size_t n = times.size();
    gamma_1.resize(n);
    gamma_1_err.resize(n);
    p_eq.resize(n);
    p_eq_err.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double up = gamma_up[i], down = gamma_down[i];
      gamma_1[i] = up + down;
      gamma_1_err[i] = std::hypot(gamma_up_err[i], gamma_down_err[i]);
      p_eq[i] = gamma_1[i] > 0.0 ? up / gamma_1[i] : std::numeric_limits<double>::quiet_NaN();
      const double g2 = gamma_1[i] * gamma_1[i];
      p_eq_err[i] = std::hypot(down * gamma_up_err[i], up * gamma_down_err[i]) / g2;
    }
  }
};

namespace detail {

inline bool state_after(const JumpTrace& tr, std::size_t i) { return (tr.assigned[i] != 0) != (tr.pi_fired[i] != 0); }

inline bool is_rate_pair(const StrobeSchedule& s, std::size_t i, double t_rep) {
  const double gap = s.times[i + 1] - s.times[i];
  return std::abs(gap - t_rep) <= 1e-6 * t_rep;
}

inline void check_ensemble(std::span<const JumpTrace> ensemble, double t_rep) {
  if (ensemble.empty()) throw std::invalid_argument("estimator: empty ensemble");
  if (!(t_rep > 0.0)) throw std::invalid_argument("estimator: t_rep must be > 0");
  const auto& sched = ensemble.front().schedule;
  for (const auto& tr : ensemble)
    if (!tr.schedule || tr.schedule->times != sched->times)
      throw std::invalid_argument("estimator: traces do not share one strobe schedule");
}

inline TransitionCounts count_pair(std::span<const JumpTrace> ensemble, std::size_t i) {
  TransitionCounts c;
  for (const auto& tr : ensemble) {
    const bool now = state_after(tr, i);
    const bool next = tr.assigned[i + 1] != 0;
    if (now) {
      ++c.from_e;
      c.e_to_e += next ? 1 : 0;
    } else {
      ++c.from_g;
      c.g_to_g += next ? 0 : 1;
    }
  }
  return c;
}

/// -ln(P)/t_rep with delta-method error; NaN and a diagnostic if undefined.
inline void survival_rate(std::uint64_t total, std::uint64_t stayed, double t_rep, const std::string& label,
                          double time, double& rate, double& err, std::vector<std::string>& diagnostics) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  if (total == 0) {
    rate = err = kNaN;
    diagnostics.push_back(label + " missing at t=" + std::to_string(time) + ": no traces to condition on");
    return;
  }
  if (stayed == 0) {
    rate = err = kNaN;
    diagnostics.push_back(label + " missing at t=" + std::to_string(time) + ": no trace survived the interval");
    return;
  }
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(stayed) / n;
  rate = -std::log(p) / t_rep;
  if (rate == 0.0) rate = 0.0;  // drop the sign of -0
  err = std::sqrt(p * (1.0 - p) / n) / (p * t_rep);
}

inline void push_counts(RateSeries& out, double time, const TransitionCounts& c, double t_rep) {
  double up, up_err, down, down_err;
  survival_rate(c.from_g, c.g_to_g, t_rep, "gamma_up", time, up, up_err, out.diagnostics);
  survival_rate(c.from_e, c.e_to_e, t_rep, "gamma_down", time, down, down_err, out.diagnostics);
  out.times.push_back(time);
  out.gamma_up.push_back(up);
  out.gamma_up_err.push_back(up_err);
  out.gamma_down.push_back(down);
  out.gamma_down_err.push_back(down_err);
}

}  // namespace detail

/// Per-strobe rates, reported at the time of the conditioning strobe.
inline RateSeries extract_rates(std::span<const JumpTrace> ensemble, double t_rep) {
  detail::check_ensemble(ensemble, t_rep);
  const StrobeSchedule& sched = *ensemble.front().schedule;
  if (sched.size() < 2) throw std::invalid_argument("extract_rates: fewer than 2 strobes per trace");
  RateSeries out;
  for (std::size_t i = 0; i + 1 < sched.size(); ++i)
    if (detail::is_rate_pair(sched, i, t_rep))
      detail::push_counts(out, sched.times[i], detail::count_pair(ensemble, i), t_rep);
  out.derive();
  return out;
}

/// Pools every strobe pair whose conditioning time lies in [edges[j], edges[j+1]);
/// reports at the mean conditioning time of the bin.
inline RateSeries extract_rates_binned(std::span<const JumpTrace> ensemble, double t_rep,
                                       std::span<const double> edges) {
  detail::check_ensemble(ensemble, t_rep);
  if (edges.size() < 2) throw std::invalid_argument("extract_rates_binned: need at least two bin edges");
  for (std::size_t j = 1; j < edges.size(); ++j)
    if (!(edges[j] > edges[j - 1])) throw std::invalid_argument("extract_rates_binned: edges must increase");
  const StrobeSchedule& sched = *ensemble.front().schedule;
  std::vector<TransitionCounts> bins(edges.size() - 1);
  std::vector<double> time_sum(bins.size(), 0.0);
  std::vector<double> pairs(bins.size(), 0.0);
  for (std::size_t i = 0; i + 1 < sched.size(); ++i) {
    if (!detail::is_rate_pair(sched, i, t_rep)) continue;
    const double t = sched.times[i];
    const auto it = std::upper_bound(edges.begin(), edges.end(), t);
    if (it == edges.begin() || it == edges.end()) continue;
    const auto j = static_cast<std::size_t>(it - edges.begin() - 1);
    bins[j] += detail::count_pair(ensemble, i);
    time_sum[j] += t;
    pairs[j] += 1.0;
  }
  RateSeries out;
  for (std::size_t j = 0; j < bins.size(); ++j) {
    const double t = pairs[j] > 0.0 ? time_sum[j] / pairs[j] : 0.5 * (edges[j] + edges[j + 1]);
    detail::push_counts(out, t, bins[j], t_rep);
  }
  out.derive();
  return out;
}

/// Centered boxcar of odd width on gamma_up and gamma_down, truncated at the
/// edges and skipping missing entries; derived channels are recomputed.
inline RateSeries moving_average(const RateSeries& series, int window) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("moving_average: window must be odd and >= 1");
  RateSeries out = series;
  out.window = window;
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  const std::ptrdiff_t half = window / 2;
  auto smooth = [&](const std::vector<double>& v, const std::vector<double>& e, std::vector<double>& ov,
                    std::vector<double>& oe) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double sum = 0.0, var = 0.0;
      int count = 0;
      for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - half); j <= std::min(n - 1, i + half); ++j) {
        if (std::isnan(v[j])) continue;
        sum += v[j];
        var += e[j] * e[j];
        ++count;
      }
      ov[i] = count ? sum / count : std::numeric_limits<double>::quiet_NaN();
      oe[i] = count ? std::sqrt(var) / count : std::numeric_limits<double>::quiet_NaN();
    }
  };
  smooth(series.gamma_up, series.gamma_up_err, out.gamma_up, out.gamma_up_err);
  smooth(series.gamma_down, series.gamma_down_err, out.gamma_down, out.gamma_down_err);
  out.derive();
  return out;
}

struct PopulationSeries {
  std::vector<double> times;
  std::vector<double> p_q;
  std::vector<double> stderr_;
};

enum class ReadChannel { assigned, truth };

/// Excited fraction per strobe with binomial standard error.
inline PopulationSeries population_series(std::span<const JumpTrace> ensemble,
                                          ReadChannel channel = ReadChannel::assigned) {
  if (ensemble.empty()) throw std::invalid_argument("population_series: empty ensemble");
  const StrobeSchedule& sched = *ensemble.front().schedule;
  PopulationSeries out;
  out.times = sched.times;
  out.p_q.assign(sched.size(), 0.0);
  out.stderr_.assign(sched.size(), 0.0);
  for (const auto& tr : ensemble) {
    if (tr.size() != sched.size()) throw std::invalid_argument("population_series: traces differ in length");
    const auto& bits = channel == ReadChannel::assigned ? tr.assigned : tr.true_states;
    for (std::size_t i = 0; i < bits.size(); ++i) out.p_q[i] += bits[i];
  }
  const double n = static_cast<double>(ensemble.size());
  for (std::size_t i = 0; i < sched.size(); ++i) {
    out.p_q[i] /= n;
    out.stderr_[i] = std::sqrt(out.p_q[i] * (1.0 - out.p_q[i]) / n);
  }
  return out;
}

/// Fraction of traces that fired a feedback pulse at each stabilization strobe.
inline PopulationSeries pi_pulse_probability(std::span<const JumpTrace> ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("pi_pulse_probability: empty ensemble");
  const StrobeSchedule& sched = *ensemble.front().schedule;
  PopulationSeries out;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < sched.size(); ++i)
    if (sched.phases[i] == StrobePhase::stabilize) index.push_back(i);
  const double n = static_cast<double>(ensemble.size());
  for (std::size_t i : index) {
    double fired = 0.0;
    for (const auto& tr : ensemble) fired += tr.pi_fired[i];
    const double p = fired / n;
    out.times.push_back(sched.times[i]);
    out.p_q.push_back(p);
    out.stderr_.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  return out;
}

/// Rate that makes a pulse probability P_pi over one t_rep: -ln(1 - P_pi) / t_rep.
inline double pi_probability_to_rate(double p_pi, double t_rep) { return -std::log1p(-p_pi) / t_rep; }

struct T1Estimate {
  double t1 = 0.0;
  double stderr_ = 0.0;
  double amplitude = 0.0;  // p(t0) - baseline
  std::size_t points = 0;
};

/// Least squares of p(t) = baseline + A exp(-(t - t0)/T1) over t0 <= t <= t0 + fit_window,
/// t0 being the first sample. A is eliminated in closed form; T1 is found by Brent
/// search on log T1 and then polished jointly with A by Gauss-Newton.
inline T1Estimate fit_exponential_t1(std::span<const double> times, std::span<const double> p_q, double fit_window,
                                     double baseline) {
  if (times.size() != p_q.size()) throw std::invalid_argument("fit_exponential_t1: times and p_q differ in length");
  if (times.empty() || !(fit_window > 0.0)) throw std::invalid_argument("fit_exponential_t1: empty input or window");
  const double t0 = times.front();
  std::vector<double> t, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] - t0 > fit_window * (1.0 + 1e-12)) break;
    t.push_back(times[i] - t0);
    y.push_back(p_q[i] - baseline);
  }
  if (t.size() < 3) throw std::invalid_argument("fit_exponential_t1: fit window holds fewer than 3 points");

  auto amplitude = [&](double t1) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double e = std::exp(-t[i] / t1);
      num += y[i] * e;
      den += e * e;
    }
    return num / den;
  };
  auto rss = [&](double t1, double a) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double r = y[i] - a * std::exp(-t[i] / t1);
      s += r * r;
    }
    return s;
  };

  const double span = std::max(t.back(), std::numeric_limits<double>::min());
  const double lo = std::log(span * 1e-4), hi = std::log(span * 1e4);
  const auto [log_t1, best] = boost::math::tools::brent_find_minima(
      [&](double lt) {
        const double t1 = std::exp(lt);
        return rss(t1, amplitude(t1));
      },
      lo, hi, 60);
  (void)best;
  if (log_t1 < lo + 1e-3 || log_t1 > hi - 1e-3)
    throw NumericalError("fit_exponential_t1: T1 ran to the search bound (" + std::to_string(std::exp(log_t1)) +
                         " s); the data show no decay inside the window");

  double t1 = std::exp(log_t1);
  double a = amplitude(t1);
  double jtj00 = 0, jtj01 = 0, jtj11 = 0;
  for (int iter = 0; iter < 20; ++iter) {
    double g0 = 0, g1 = 0;
    jtj00 = jtj01 = jtj11 = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double e = std::exp(-t[i] / t1);
      const double r = y[i] - a * e;
      const double da = e;
      const double dt1 = a * e * t[i] / (t1 * t1);
      jtj00 += da * da;
      jtj01 += da * dt1;
      jtj11 += dt1 * dt1;
      g0 += da * r;
      g1 += dt1 * r;
    }
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    if (!(det > 0.0)) break;
    const double step_a = (jtj11 * g0 - jtj01 * g1) / det;
    const double step_t = (jtj00 * g1 - jtj01 * g0) / det;
    const double before = rss(t1, a);
    if (!(t1 + step_t > 0.0) || rss(t1 + step_t, a + step_a) > before) break;
    a += step_a;
    t1 += step_t;
    if (std::abs(step_t) <= 1e-14 * t1) break;
  }
  if (!std::isfinite(t1) || a == 0.0) throw NumericalError("fit_exponential_t1: non-finite or zero-amplitude fit");

  T1Estimate out;
  out.t1 = t1;
  out.amplitude = a;
  out.points = t.size();
  const double det = jtj00 * jtj11 - jtj01 * jtj01;
  const double s2 = t.size() > 2 ? rss(t1, a) / static_cast<double>(t.size() - 2) : 0.0;
  out.stderr_ = det > 0.0 ? std::sqrt(s2 * jtj00 / det) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace szilard

#endif  // SZILARD_ESTIMATOR_HPP_
