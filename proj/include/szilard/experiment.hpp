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
 * @file experiment.hpp
 * @brief Protocol schedules (stabilize / initialize / monitor / pi-pulse train /
 *        free decay / wait) and their strobe timing.
 *
 * Clock convention: the protocol clock is zero at the last Initialize step, or
 * at the experiment start if there is none. Stabilization therefore happens at
 * negative times when it precedes an initialization.
 */

#ifndef SZILARD_EXPERIMENT_HPP_
#define SZILARD_EXPERIMENT_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "model.hpp"

namespace szilard {

enum class QubitState : std::uint8_t { ground = 0, excited = 1 };

inline char to_char(QubitState s) { return s == QubitState::ground ? 'g' : 'e'; }
inline int to_bit(QubitState s) { return s == QubitState::excited ? 1 : 0; }

/// Repeated measure-and-correct cycles holding the qubit in `target`.
struct Stabilize {
  QubitState target = QubitState::ground;
  std::int64_t repetitions = 0;
  double t_rep = 2e-6;
  double duration() const { return static_cast<double>(repetitions) * t_rep; }
};

/// Instantaneous preparation of the qubit in `target`.
struct Initialize {
  QubitState target = QubitState::ground;
  double duration() const { return 0.0; }
};

/// Stroboscopic readout without feedback, one strobe every t_rep.
struct Monitor {
  double duration_s = 0.0;
  double t_rep = 2e-6;
  double duration() const { return duration_s; }
};

/// Unconditional pi-pulses, the first at the step start, spaced by `spacing`.
struct PiPulseTrain {
  std::int64_t pulses = 0;
  double spacing = 100e-6;
  double duration() const { return static_cast<double>(pulses) * spacing; }
};

/// Unmonitored relaxation that the caller intends to observe (deterministic curve).
struct FreeDecay {
  double duration_s = 0.0;
  double duration() const { return duration_s; }
};

/// Unmonitored idle time.
struct Wait {
  double duration_s = 0.0;
  double duration() const { return duration_s; }
};

using ProtocolStep = std::variant<Stabilize, Initialize, Monitor, PiPulseTrain, FreeDecay, Wait>;

inline double step_duration(const ProtocolStep& step) {
  return std::visit([](const auto& s) { return s.duration(); }, step);
}

inline std::string step_name(const ProtocolStep& step) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Stabilize>) return "stabilize";
        if constexpr (std::is_same_v<T, Initialize>) return "initialize";
        if constexpr (std::is_same_v<T, Monitor>) return "monitor";
        if constexpr (std::is_same_v<T, PiPulseTrain>) return "pi_pulse_train";
        if constexpr (std::is_same_v<T, FreeDecay>) return "free_decay";
        if constexpr (std::is_same_v<T, Wait>) return "wait";
      },
      step);
}

/// Number of strobes a monitor step places at t_rep, 2 t_rep, ... <= duration.
inline std::int64_t monitor_strobes(const Monitor& m) {
  return static_cast<std::int64_t>(std::floor(m.duration_s / m.t_rep + 1e-9));
}

struct Experiment {
  std::vector<ProtocolStep> steps;
  /// nullopt means every degree of freedom starts at the bath population p_th.
  std::optional<PopulationState> initial_state;

  void validate(int n_tls) const {
    if (steps.empty()) throw std::invalid_argument("experiment has no steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const std::string where = "step " + std::to_string(i) + " (" + step_name(steps[i]) + "): ";
      std::visit(
          [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Stabilize>) {
              if (!(s.t_rep > 0.0)) throw std::invalid_argument(where + "t_rep must be > 0");
              if (s.repetitions < 0) throw std::invalid_argument(where + "repetitions must be >= 0");
            } else if constexpr (std::is_same_v<T, Monitor>) {
              if (!(s.t_rep > 0.0)) throw std::invalid_argument(where + "t_rep must be > 0");
              if (!(s.duration_s >= 0.0)) throw std::invalid_argument(where + "duration must be >= 0");
            } else if constexpr (std::is_same_v<T, PiPulseTrain>) {
              if (s.pulses < 0) throw std::invalid_argument(where + "pulse count must be >= 0");
              if (!(s.spacing >= 0.0)) throw std::invalid_argument(where + "spacing must be >= 0");
            } else if constexpr (std::is_same_v<T, FreeDecay> || std::is_same_v<T, Wait>) {
              if (!(s.duration_s >= 0.0)) throw std::invalid_argument(where + "duration must be >= 0");
            }
          },
          steps[i]);
    }
    if (initial_state) initial_state->validate(n_tls);
  }

  double duration() const {
    double total = 0.0;
    for (const auto& s : steps) total += step_duration(s);
    return total;
  }

  /// Absolute time (from the experiment start) of the clock origin.
  double origin() const {
    double t = 0.0;
    double origin = 0.0;
    for (const auto& s : steps) {
      if (std::holds_alternative<Initialize>(s)) origin = t;
      t += step_duration(s);
    }
    return origin;
  }

  /// Protocol end on the origin-relative clock.
  double end_time() const { return duration() - origin(); }
};

enum class StrobePhase : std::uint8_t { stabilize = 0, initialize = 1, monitor = 2 };

/// Readout instants of an experiment. They do not depend on randomness, so one
/// schedule is shared by every trajectory of an ensemble.
struct StrobeSchedule {
  std::vector<double> times;          // origin-relative, s
  std::vector<StrobePhase> phases;
  std::vector<std::uint32_t> step_index;  // protocol step owning the strobe

  std::size_t size() const { return times.size(); }
};

inline StrobeSchedule strobe_schedule(const Experiment& exp) {
  StrobeSchedule sched;
  const double origin = exp.origin();
  double t = -origin;
  for (std::size_t i = 0; i < exp.steps.size(); ++i) {
    const auto& step = exp.steps[i];
    const auto idx = static_cast<std::uint32_t>(i);
    if (const auto* s = std::get_if<Stabilize>(&step)) {
      for (std::int64_t r = 1; r <= s->repetitions; ++r) {
        sched.times.push_back(t + static_cast<double>(r) * s->t_rep);
        sched.phases.push_back(StrobePhase::stabilize);
        sched.step_index.push_back(idx);
      }
    } else if (std::holds_alternative<Initialize>(step)) {
      sched.times.push_back(t);
      sched.phases.push_back(StrobePhase::initialize);
      sched.step_index.push_back(idx);
    } else if (const auto* m = std::get_if<Monitor>(&step)) {
      const auto n = monitor_strobes(*m);
      for (std::int64_t r = 1; r <= n; ++r) {
        sched.times.push_back(t + static_cast<double>(r) * m->t_rep);
        sched.phases.push_back(StrobePhase::monitor);
        sched.step_index.push_back(idx);
      }
    }
    t += step_duration(step);
  }
  return sched;
}

}  // namespace szilard

#endif  // SZILARD_EXPERIMENT_HPP_
