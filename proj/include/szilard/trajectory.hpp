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
 * @file trajectory.hpp
 * @brief Quantum-jump simulation: a continuous-time Markov chain over one qubit
 *        bit and n TLS bits, stroboscopic readout with Gaussian IQ clouds,
 *        per-shot demolition and active-feedback pi-pulses.
 *
 * Channels of the chain:
 *   qubit   1 -> 0 at Gamma_q (1 - p_th),   0 -> 1 at Gamma_q p_th
 *   TLS k   1 -> 0 at Gamma_t (1 - p_th),   0 -> 1 at Gamma_t p_th
 *   swap (qubit, TLS k) at Gamma_qt^k whenever the two bits differ.
 * The swap is symmetric, so the first moment of the chain obeys exactly the
 * rate equations of dynamics.hpp.
 */

#ifndef SZILARD_TRAJECTORY_HPP_
#define SZILARD_TRAJECTORY_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "experiment.hpp"
#include "model.hpp"

namespace szilard {

using Rng = std::mt19937_64;

struct IQPoint {
  double i = 0.0;
  double q = 0.0;
  friend bool operator==(const IQPoint&, const IQPoint&) = default;
};

/// Single-shot readout: two Gaussian clouds whose centers are
/// `separation_sigma` standard deviations apart, assigned by nearest center.
struct ReadoutModel {
  double separation_sigma = 5.6;
  double demolition_down = 0.0;  // per-shot e -> g flip before the readout
  double demolition_up = 0.0;    // per-shot g -> e flip before the readout
  IQPoint center_g{-1.0, 0.0};
  IQPoint center_e{1.0, 0.0};

  void validate() const {
    if (!(separation_sigma > 0.0)) throw std::invalid_argument("readout separation_sigma must be > 0");
    if (!(demolition_down >= 0.0 && demolition_down < 1.0))
      throw std::invalid_argument("readout demolition_down must lie in [0, 1)");
    if (!(demolition_up >= 0.0 && demolition_up < 1.0))
      throw std::invalid_argument("readout demolition_up must lie in [0, 1)");
    if (center_distance() <= 0.0) throw std::invalid_argument("readout centers must differ");
  }

  double center_distance() const { return std::hypot(center_e.i - center_g.i, center_e.q - center_g.q); }
  double sigma() const { return center_distance() / separation_sigma; }

  /// Ideal readout: no demolition and clouds far apart.
  static ReadoutModel ideal() {
    ReadoutModel r;
    r.separation_sigma = 1e9;
    return r;
  }
};

struct MicroState {
  bool qubit = false;
  std::vector<std::uint8_t> tls;
  double t = 0.0;
};

/// Record of one stochastic run. All per-strobe vectors share the schedule's length
/// (iq is empty when IQ recording is off).
struct JumpTrace {
  std::shared_ptr<const StrobeSchedule> schedule;
  std::vector<std::uint8_t> assigned;
  std::vector<std::uint8_t> pi_fired;
  std::vector<std::uint8_t> true_states;  // qubit bit before demolition and readout
  std::vector<IQPoint> iq;

  std::size_t size() const { return assigned.size(); }
  friend bool operator==(const JumpTrace& a, const JumpTrace& b) {
    return a.assigned == b.assigned && a.pi_fired == b.pi_fired && a.true_states == b.true_states && a.iq == b.iq &&
           a.schedule->times == b.schedule->times;
  }
};

/// Exact sampler of the chain above, holding its current microstate and the
/// aggregate rates needed to draw waiting times in O(1).
class JumpSimulator {
 public:
  JumpSimulator(const SystemParams& params, MicroState initial)
      : state_(std::move(initial)),
        rates_(build_coupling_ladder(params.ladder)),
        gamma_q_(params.qubit.gamma_q),
        gamma_t_(params.ladder.gamma_t),
        p_th_(params.qubit.p_th) {
    if (state_.tls.size() != rates_.size())
      throw std::invalid_argument("microstate TLS count does not match the ladder");
    for (double r : rates_) coupling_sum_ += r;
    refresh();
  }

  const MicroState& state() const { return state_; }
  bool qubit() const { return state_.qubit; }

  void flip_qubit() {
    state_.qubit = !state_.qubit;
    refresh();
  }

  double total_rate() const {
    const double qubit_rate = state_.qubit ? gamma_q_ * (1.0 - p_th_) : gamma_q_ * p_th_;
    const double tls_rate = gamma_t_ * ((1.0 - p_th_) * excited_tls_ + p_th_ * (n() - excited_tls_));
    return qubit_rate + tls_rate + differing_coupling_;
  }

  /// Competing exponential clocks over dt; no discretization error.
  void evolve(double dt, Rng& rng) {
    if (!(dt >= 0.0)) throw std::invalid_argument("evolution step must be >= 0");
    double remaining = dt;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    while (true) {
      const double rate = total_rate();
      if (rate <= 0.0) break;
      const double wait = std::exponential_distribution<double>(rate)(rng);
      if (wait > remaining) break;
      remaining -= wait;
      fire(uniform(rng) * rate);
    }
    state_.t += dt;
  }

 private:
  double n() const { return static_cast<double>(rates_.size()); }

  void refresh() {
    excited_tls_ = 0.0;
    differing_coupling_ = 0.0;
    for (std::size_t k = 0; k < rates_.size(); ++k) {
      const bool t = state_.tls[k] != 0;
      if (t) excited_tls_ += 1.0;
      if (t != state_.qubit) differing_coupling_ += rates_[k];
    }
  }

  void fire(double u) {
    const double qubit_rate = state_.qubit ? gamma_q_ * (1.0 - p_th_) : gamma_q_ * p_th_;
    if (u < qubit_rate) {
      state_.qubit = !state_.qubit;
      refresh();
      return;
    }
    u -= qubit_rate;
    const double down = gamma_t_ * (1.0 - p_th_);
    const double up = gamma_t_ * p_th_;
    const double tls_rate = down * excited_tls_ + up * (n() - excited_tls_);
    if (u < tls_rate) {
      for (std::size_t k = 0; k < rates_.size(); ++k) {
        const double r = state_.tls[k] ? down : up;
        if (u < r) {
          state_.tls[k] ^= 1;
          refresh();
          return;
        }
        u -= r;
      }
    } else {
      u -= tls_rate;
      std::size_t last = rates_.size();
      for (std::size_t k = 0; k < rates_.size(); ++k) {
        if ((state_.tls[k] != 0) == state_.qubit) continue;
        last = k;
        if (u < rates_[k]) break;
        u -= rates_[k];
      }
      if (last < rates_.size()) {
        state_.tls[last] ^= 1;
        state_.qubit = !state_.qubit;
      }
    }
    // Rounding in u can exhaust a scan; the last eligible channel takes it.
    refresh();
  }

  MicroState state_;
  std::vector<double> rates_;
  double gamma_q_;
  double gamma_t_;
  double p_th_;
  double coupling_sum_ = 0.0;
  double excited_tls_ = 0.0;
  double differing_coupling_ = 0.0;
};

inline MicroState step_ctmc(const MicroState& state, const SystemParams& params, double dt, Rng& rng) {
  JumpSimulator sim(params, state);
  sim.evolve(dt, rng);
  return sim.state();
}

struct MeasureOutcome {
  bool assigned = false;
  IQPoint iq;
};

namespace detail {

/// Demolition, IQ sampling and nearest-center assignment acting on the qubit bit.
inline MeasureOutcome readout(bool& qubit, const ReadoutModel& readout, Rng& rng,
                              std::normal_distribution<double>& normal) {
  const double flip = qubit ? readout.demolition_down : readout.demolition_up;
  if (flip > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < flip) qubit = !qubit;
  const IQPoint& c = qubit ? readout.center_e : readout.center_g;
  const double sigma = readout.sigma();
  MeasureOutcome out;
  out.iq.i = c.i + sigma * normal(rng);
  out.iq.q = c.q + sigma * normal(rng);
  const double dg = std::hypot(out.iq.i - readout.center_g.i, out.iq.q - readout.center_g.q);
  const double de = std::hypot(out.iq.i - readout.center_e.i, out.iq.q - readout.center_e.q);
  out.assigned = de < dg;
  return out;
}

}  // namespace detail

struct MeasureResult {
  bool assigned = false;
  IQPoint iq;
  MicroState post_state;
};

inline MeasureResult measure(const MicroState& state, const ReadoutModel& readout, Rng& rng) {
  readout.validate();
  MeasureResult res;
  res.post_state = state;
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto out = detail::readout(res.post_state.qubit, readout, rng, normal);
  res.assigned = out.assigned;
  res.iq = out.iq;
  return res;
}

/// splitmix64 finalizer.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of trajectory `index` in an ensemble; a pure function of its inputs.
inline std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix_seed(mix_seed(master_seed) ^ mix_seed(index + 0x5851F42D4C957F2DULL));
}

struct TrajectoryOptions {
  bool record_iq = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

inline MicroState sample_initial(const Experiment& exp, const SystemParams& params, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  MicroState s;
  const auto n = static_cast<std::size_t>(params.ladder.n_tls);
  s.tls.resize(n);
  if (exp.initial_state) {
    s.qubit = uniform(rng) < exp.initial_state->p_q;
    for (std::size_t k = 0; k < n; ++k) s.tls[k] = uniform(rng) < exp.initial_state->p_t[k] ? 1 : 0;
  } else {
    s.qubit = uniform(rng) < params.qubit.p_th;
    for (std::size_t k = 0; k < n; ++k) s.tls[k] = uniform(rng) < params.qubit.p_th ? 1 : 0;
  }
  s.t = -exp.origin();
  return s;
}

inline JumpTrace simulate_trace(const Experiment& exp, const SystemParams& params, const ReadoutModel& readout,
                                std::shared_ptr<const StrobeSchedule> schedule, std::uint64_t seed,
                                const TrajectoryOptions& options) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  JumpSimulator sim(params, sample_initial(exp, params, rng));

  JumpTrace trace;
  const std::size_t n = schedule->size();
  trace.assigned.resize(n);
  trace.pi_fired.resize(n);
  trace.true_states.resize(n);
  if (options.record_iq) trace.iq.resize(n);
  trace.schedule = std::move(schedule);

  std::size_t strobe = 0;
  auto read = [&](std::optional<QubitState> feedback_target) {
    bool bit = sim.qubit();
    trace.true_states[strobe] = bit ? 1 : 0;
    const bool before = bit;
    const auto out = detail::readout(bit, readout, rng, normal);
    if (bit != before) sim.flip_qubit();
    trace.assigned[strobe] = out.assigned ? 1 : 0;
    if (options.record_iq) trace.iq[strobe] = out.iq;
    if (feedback_target && out.assigned != (*feedback_target == QubitState::excited)) {
      sim.flip_qubit();
      trace.pi_fired[strobe] = 1;
    }
    ++strobe;
  };

  for (const auto& step : exp.steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Stabilize>) {
            for (std::int64_t r = 0; r < s.repetitions; ++r) {
              sim.evolve(s.t_rep, rng);
              read(s.target);
            }
          } else if constexpr (std::is_same_v<T, Initialize>) {
            read(s.target);
          } else if constexpr (std::is_same_v<T, Monitor>) {
            const auto count = monitor_strobes(s);
            for (std::int64_t r = 0; r < count; ++r) {
              sim.evolve(s.t_rep, rng);
              read(std::nullopt);
            }
            const double rest = s.duration_s - static_cast<double>(count) * s.t_rep;
            if (rest > 0.0) sim.evolve(rest, rng);
          } else if constexpr (std::is_same_v<T, PiPulseTrain>) {
            for (std::int64_t p = 0; p < s.pulses; ++p) {
              sim.flip_qubit();
              sim.evolve(s.spacing, rng);
            }
          } else {
            sim.evolve(s.duration(), rng);
          }
        },
        step);
  }
  return trace;
}

}  // namespace detail

inline JumpTrace run_trajectory(const Experiment& exp, const SystemParams& params, const ReadoutModel& readout,
                                std::uint64_t seed, const TrajectoryOptions& options = {}) {
  params.validate();
  readout.validate();
  exp.validate(params.ladder.n_tls);
  auto schedule = std::make_shared<const StrobeSchedule>(strobe_schedule(exp));
  return detail::simulate_trace(exp, params, readout, std::move(schedule), seed, options);
}

/// Trajectory i is seeded with trajectory_seed(master_seed, i) and stored at
/// index i, so the result does not depend on the thread count.
inline std::vector<JumpTrace> run_ensemble(const Experiment& exp, const SystemParams& params,
                                           const ReadoutModel& readout, std::uint64_t master_seed,
                                           std::size_t n_traj, const TrajectoryOptions& options = {}) {
  if (n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
  params.validate();
  readout.validate();
  exp.validate(params.ladder.n_tls);
  auto schedule = std::make_shared<const StrobeSchedule>(strobe_schedule(exp));

  std::vector<JumpTrace> out(n_traj);
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_traj));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < n_traj; i = next++)
        out[i] = detail::simulate_trace(exp, params, readout, schedule, trajectory_seed(master_seed, i), options);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace szilard

#endif  // SZILARD_TRAJECTORY_HPP_
