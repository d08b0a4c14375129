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
 * @file config.hpp
 * @brief JSON run configurations, fit problems and fit results.
 *
 * Field names carry their unit (a_khz, t_rep_us, ...). Unknown keys are
 * rejected so a misspelled unit suffix cannot silently fall back to a default.
 * Every parsed configuration can be written back in resolved form (all
 * defaults filled in); that form hashes to the config hash stamped on outputs.
 */

#ifndef SZILARD_CONFIG_HPP_
#define SZILARD_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "experiment.hpp"
#include "fitting.hpp"
#include "model.hpp"
#include "trajectory.hpp"

namespace szilard {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// Invalid or inconsistent configuration content.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// FNV-1a 64 of the text, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return out;
}

namespace detail {

/// Shortest decimal x with x * scale == si, so parse(to_json(v)) == v exactly.
inline double in_unit(double si, double scale) {
  const double approx = si / scale;
  char buf[40];
  for (int digits = 1; digits <= 17; ++digits) {
    const auto res = std::to_chars(buf, buf + sizeof buf, approx, std::chars_format::general, digits);
    double x = 0.0;
    std::from_chars(buf, res.ptr, x);
    if (x * scale == si) return x;
  }
  return approx;
}

inline void allow_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

inline double number(const Json& obj, const char* key, const std::string& where, std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing '" + key + "'");
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

inline std::int64_t integer(const Json& obj, const char* key, const std::string& where,
                            std::optional<std::int64_t> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing '" + key + "'");
  }
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::string text(const Json& obj, const char* key, const std::string& where,
                        std::optional<std::string> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing '" + key + "'");
  }
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

inline QubitState parse_target(const std::string& s, const std::string& where) {
  if (s == "g") return QubitState::ground;
  if (s == "e") return QubitState::excited;
  throw ConfigError(where + ": target must be \"g\" or \"e\", got \"" + s + "\"");
}

}  // namespace detail

// ---- system ---------------------------------------------------------------

inline SystemParams parse_system(const Json& j) {
  const std::string where = "system";
  detail::allow_keys(j, where, {"f01_ghz", "gamma_q_khz", "p_th", "t_eff_mk", "ladder"});
  SystemParams p = reference_parameters();
  p.qubit.f01 = detail::number(j, "f01_ghz", where, p.qubit.f01 / 1e9) * 1e9;
  p.qubit.gamma_q = detail::number(j, "gamma_q_khz", where, p.qubit.gamma_q / 1e3) * 1e3;
  if (j.contains("p_th") && j.contains("t_eff_mk")) throw ConfigError(where + ": give either p_th or t_eff_mk, not both");
  if (j.contains("p_th")) {
    p.qubit.p_th = detail::number(j, "p_th", where);
  } else {
    const double t_mk = detail::number(j, "t_eff_mk", where, kIdleTemperature * 1e3);
    if (!(t_mk > 0.0)) throw ConfigError(where + ": t_eff_mk must be > 0");
    p.qubit.p_th = thermal_population(p.qubit.f01, t_mk * 1e-3);
  }
  if (j.contains("ladder")) {
    const auto& l = j.at("ladder");
    const std::string lw = "system.ladder";
    detail::allow_keys(l, lw, {"a_khz", "b", "c", "n_tls", "gamma_t_per_s"});
    p.ladder.a = detail::number(l, "a_khz", lw, p.ladder.a / 1e3) * 1e3;
    p.ladder.b = detail::number(l, "b", lw, p.ladder.b);
    p.ladder.c = detail::number(l, "c", lw, p.ladder.c);
    p.ladder.n_tls = static_cast<int>(detail::integer(l, "n_tls", lw, p.ladder.n_tls));
    p.ladder.gamma_t = detail::number(l, "gamma_t_per_s", lw, p.ladder.gamma_t);
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
  return p;
}

inline Json to_json(const SystemParams& p) {
  return Json{{"f01_ghz", detail::in_unit(p.qubit.f01, 1e9)},
              {"gamma_q_khz", detail::in_unit(p.qubit.gamma_q, 1e3)},
              {"p_th", p.qubit.p_th},
              {"ladder",
               {{"a_khz", detail::in_unit(p.ladder.a, 1e3)},
                {"b", p.ladder.b},
                {"c", p.ladder.c},
                {"n_tls", p.ladder.n_tls},
                {"gamma_t_per_s", p.ladder.gamma_t}}}};
}

// ---- readout ----------------------------------------------------------------

inline ReadoutModel parse_readout(const Json& j) {
  const std::string where = "readout";
  detail::allow_keys(j, where, {"separation_sigma", "demolition_down", "demolition_up"});
  ReadoutModel r;
  r.separation_sigma = detail::number(j, "separation_sigma", where, r.separation_sigma);
  r.demolition_down = detail::number(j, "demolition_down", where, r.demolition_down);
  r.demolition_up = detail::number(j, "demolition_up", where, r.demolition_up);
  try {
    r.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return r;
}

inline Json to_json(const ReadoutModel& r) {
  return Json{{"separation_sigma", r.separation_sigma},
              {"demolition_down", r.demolition_down},
              {"demolition_up", r.demolition_up}};
}

// ---- experiment -------------------------------------------------------------

inline ProtocolStep parse_step(const Json& j, const std::string& where) {
  const std::string type = detail::text(j, "type", where);
  if (type == "stabilize") {
    detail::allow_keys(j, where, {"type", "target", "repetitions", "t_rep_us"});
    return Stabilize{detail::parse_target(detail::text(j, "target", where), where), detail::integer(j, "repetitions", where),
                     detail::number(j, "t_rep_us", where, 2.0) * 1e-6};
  }
  if (type == "initialize") {
    detail::allow_keys(j, where, {"type", "target"});
    return Initialize{detail::parse_target(detail::text(j, "target", where), where)};
  }
  if (type == "monitor") {
    detail::allow_keys(j, where, {"type", "duration_us", "t_rep_us"});
    return Monitor{detail::number(j, "duration_us", where) * 1e-6, detail::number(j, "t_rep_us", where, 2.0) * 1e-6};
  }
  if (type == "pi_pulse_train") {
    detail::allow_keys(j, where, {"type", "pulses", "spacing_us"});
    return PiPulseTrain{detail::integer(j, "pulses", where), detail::number(j, "spacing_us", where) * 1e-6};
  }
  if (type == "free_decay") {
    detail::allow_keys(j, where, {"type", "duration_us"});
    return FreeDecay{detail::number(j, "duration_us", where) * 1e-6};
  }
  if (type == "wait") {
    detail::allow_keys(j, where, {"type", "duration_us"});
    return Wait{detail::number(j, "duration_us", where) * 1e-6};
  }
  throw ConfigError(where + ": unknown step type '" + type + "'");
}

inline Json to_json(const ProtocolStep& step) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Stabilize>)
          return Json{{"type", "stabilize"},
                      {"target", std::string(1, to_char(s.target))},
                      {"repetitions", s.repetitions},
                      {"t_rep_us", detail::in_unit(s.t_rep, 1e-6)}};
        else if constexpr (std::is_same_v<T, Initialize>)
          return Json{{"type", "initialize"}, {"target", std::string(1, to_char(s.target))}};
        else if constexpr (std::is_same_v<T, Monitor>)
          return Json{{"type", "monitor"},
                      {"duration_us", detail::in_unit(s.duration_s, 1e-6)},
                      {"t_rep_us", detail::in_unit(s.t_rep, 1e-6)}};
        else if constexpr (std::is_same_v<T, PiPulseTrain>)
          return Json{{"type", "pi_pulse_train"}, {"pulses", s.pulses}, {"spacing_us", detail::in_unit(s.spacing, 1e-6)}};
        else if constexpr (std::is_same_v<T, FreeDecay>)
          return Json{{"type", "free_decay"}, {"duration_us", detail::in_unit(s.duration_s, 1e-6)}};
        else
          return Json{{"type", "wait"}, {"duration_us", detail::in_unit(s.duration_s, 1e-6)}};
      },
      step);
}

struct NamedExperiment {
  std::string name;
  Experiment experiment;
};

inline NamedExperiment parse_experiment(const Json& j, const std::string& where, int n_tls) {
  detail::allow_keys(j, where, {"name", "steps", "initial_state"});
  NamedExperiment out;
  out.name = detail::text(j, "name", where, std::string("experiment"));
  if (!j.contains("steps") || !j.at("steps").is_array()) throw ConfigError(where + ": 'steps' must be an array");
  std::size_t i = 0;
  for (const auto& s : j.at("steps")) out.experiment.steps.push_back(parse_step(s, where + ".steps[" + std::to_string(i++) + "]"));
  if (j.contains("initial_state")) {
    const auto& s = j.at("initial_state");
    const std::string sw = where + ".initial_state";
    detail::allow_keys(s, sw, {"p_q", "p_t"});
    PopulationState st;
    st.p_q = detail::number(s, "p_q", sw);
    if (!s.contains("p_t")) throw ConfigError(sw + ": missing 'p_t'");
    if (s.at("p_t").is_number()) {
      st.p_t.assign(static_cast<std::size_t>(n_tls), s.at("p_t").get<double>());
    } else if (s.at("p_t").is_array()) {
      for (const auto& v : s.at("p_t")) {
        if (!v.is_number()) throw ConfigError(sw + ": p_t entries must be numbers");
        st.p_t.push_back(v.get<double>());
      }
    } else {
      throw ConfigError(sw + ": p_t must be a number or an array");
    }
    out.experiment.initial_state = st;
  }
  try {
    out.experiment.validate(n_tls);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return out;
}

inline Json to_json(const NamedExperiment& e) {
  Json j{{"name", e.name}};
  Json steps = Json::array();
  for (const auto& s : e.experiment.steps) steps.push_back(to_json(s));
  j["steps"] = steps;
  if (e.experiment.initial_state)
    j["initial_state"] = Json{{"p_q", e.experiment.initial_state->p_q}, {"p_t", e.experiment.initial_state->p_t}};
  return j;
}

// ---- sampling ---------------------------------------------------------------

/// Deterministic-mode sample times: a log grid (plus 0), a linear grid, or an
/// explicit list, all origin-relative and clipped to the protocol end.
struct Sampling {
  std::string kind = "log";
  double t_min_us = 1.0;
  int per_decade = 40;
  double step_us = 2.0;
  double t_start_us = 0.0;
  std::vector<double> times_us;

  std::vector<double> times(const Experiment& exp) const {
    const double end = exp.end_time();
    std::vector<double> out;
    if (kind == "log") {
      if (end > t_min_us * 1e-6) out = log_time_grid(t_min_us * 1e-6, end, per_decade);
      else out = {0.0};
    } else if (kind == "linear") {
      out = linear_time_grid(t_start_us * 1e-6, end, step_us * 1e-6);
    } else {
      for (double t : times_us) out.push_back(t * 1e-6);
    }
    return out;
  }
};

inline Sampling parse_sampling(const Json& j) {
  const std::string where = "sampling";
  detail::allow_keys(j, where, {"kind", "t_min_us", "per_decade", "step_us", "t_start_us", "times_us"});
  Sampling s;
  s.kind = detail::text(j, "kind", where, std::string("log"));
  if (s.kind != "log" && s.kind != "linear" && s.kind != "list")
    throw ConfigError(where + ": kind must be log, linear or list");
  s.t_min_us = detail::number(j, "t_min_us", where, s.t_min_us);
  s.per_decade = static_cast<int>(detail::integer(j, "per_decade", where, s.per_decade));
  s.step_us = detail::number(j, "step_us", where, s.step_us);
  s.t_start_us = detail::number(j, "t_start_us", where, s.t_start_us);
  if (j.contains("times_us")) s.times_us = j.at("times_us").get<std::vector<double>>();
  if (s.kind == "log" && (!(s.t_min_us > 0.0) || s.per_decade < 1)) throw ConfigError(where + ": bad log grid");
  if (s.kind == "linear" && !(s.step_us > 0.0)) throw ConfigError(where + ": step_us must be > 0");
  if (s.kind == "list" && s.times_us.empty()) throw ConfigError(where + ": times_us is empty");
  return s;
}

inline Json to_json(const Sampling& s) {
  Json j{{"kind", s.kind}};
  if (s.kind == "log") {
    j["t_min_us"] = s.t_min_us;
    j["per_decade"] = s.per_decade;
  } else if (s.kind == "linear") {
    j["step_us"] = s.step_us;
    j["t_start_us"] = s.t_start_us;
  } else {
    j["times_us"] = s.times_us;
  }
  return j;
}

// ---- run configuration ------------------------------------------------------

enum class RunMode { deterministic, stochastic, both };

inline RunMode parse_mode(const std::string& s) {
  if (s == "det" || s == "deterministic") return RunMode::deterministic;
  if (s == "stoch" || s == "stochastic") return RunMode::stochastic;
  if (s == "both") return RunMode::both;
  throw ConfigError("mode must be det, stoch or both, got '" + s + "'");
}

inline const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::deterministic: return "det";
    case RunMode::stochastic: return "stoch";
    case RunMode::both: return "both";
  }
  return "?";
}

struct RunConfig {
  SystemParams system = reference_parameters();
  ReadoutModel readout;
  std::vector<NamedExperiment> experiments;
  bool single_experiment = true;  // "experiment" rather than "experiments"
  Sampling sampling;
  std::int64_t n_traj = 1000;
  std::uint64_t master_seed = 1;
  RunMode mode = RunMode::deterministic;
  int rate_window = 5;
  bool record_iq = true;

  bool stochastic() const { return mode != RunMode::deterministic; }
};

/// Accepts a configuration or a manifest (whose "config" member is one).
inline RunConfig parse_run_config(const Json& root) {
  const Json& j = root.contains("config") && root.contains("config_hash") ? root.at("config") : root;
  detail::allow_keys(j, "config",
                     {"system", "readout", "experiment", "experiments", "sampling", "n_traj", "master_seed", "mode",
                      "rate_window", "record_iq"});
  RunConfig c;
  if (j.contains("system")) c.system = parse_system(j.at("system"));
  if (j.contains("readout")) c.readout = parse_readout(j.at("readout"));
  if (j.contains("experiment") == j.contains("experiments"))
    throw ConfigError("config: give exactly one of 'experiment' or 'experiments'");
  if (j.contains("experiment")) {
    c.experiments.push_back(parse_experiment(j.at("experiment"), "experiment", c.system.ladder.n_tls));
  } else {
    c.single_experiment = false;
    if (!j.at("experiments").is_array() || j.at("experiments").empty())
      throw ConfigError("config: 'experiments' must be a non-empty array");
    std::set<std::string> names;
    std::size_t i = 0;
    for (const auto& e : j.at("experiments")) {
      const std::string where = "experiments[" + std::to_string(i++) + "]";
      if (!e.contains("name")) throw ConfigError(where + ": every listed experiment needs a 'name'");
      auto ne = parse_experiment(e, where, c.system.ladder.n_tls);
      if (ne.name.empty() || ne.name.find_first_of("/\\") != std::string::npos || ne.name == "." || ne.name == "..")
        throw ConfigError(where + ": name must be a plain directory name");
      if (!names.insert(ne.name).second) throw ConfigError(where + ": duplicate name '" + ne.name + "'");
      c.experiments.push_back(std::move(ne));
    }
  }
  if (j.contains("sampling")) c.sampling = parse_sampling(j.at("sampling"));
  c.n_traj = detail::integer(j, "n_traj", "config", c.n_traj);
  if (j.contains("master_seed")) {
    const auto& seed = j.at("master_seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
      throw ConfigError("config: master_seed must be a non-negative integer");
    c.master_seed = seed.get<std::uint64_t>();
  }
  c.mode = parse_mode(detail::text(j, "mode", "config", std::string("det")));
  c.rate_window = static_cast<int>(detail::integer(j, "rate_window", "config", c.rate_window));
  if (j.contains("record_iq")) {
    if (!j.at("record_iq").is_boolean()) throw ConfigError("config: record_iq must be true or false");
    c.record_iq = j.at("record_iq").get<bool>();
  }
  if (c.stochastic() && c.n_traj < 1) throw ConfigError("config: n_traj must be >= 1 in stochastic modes");
  if (c.rate_window < 1 || c.rate_window % 2 == 0) throw ConfigError("config: rate_window must be odd and >= 1");
  return c;
}

inline Json to_json(const RunConfig& c) {
  Json j{{"system", to_json(c.system)}, {"readout", to_json(c.readout)}};
  if (c.single_experiment) {
    j["experiment"] = to_json(c.experiments.front());
  } else {
    Json list = Json::array();
    for (const auto& e : c.experiments) list.push_back(to_json(e));
    j["experiments"] = list;
  }
  j["sampling"] = to_json(c.sampling);
  j["n_traj"] = c.n_traj;
  j["master_seed"] = c.master_seed;
  j["mode"] = mode_name(c.mode);
  j["rate_window"] = c.rate_window;
  j["record_iq"] = c.record_iq;
  return j;
}

inline std::string config_hash(const RunConfig& c) { return fnv1a_hex(to_json(c).dump()); }

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// ---- fit problems -----------------------------------------------------------

struct ParamUnit {
  const char* key;
  double scale;  // SI value = json value * scale
};

inline ParamUnit param_unit(Param p) {
  switch (p) {
    case Param::a: return {"a_khz", 1e3};
    case Param::b: return {"b", 1.0};
    case Param::c: return {"c", 1.0};
    case Param::gamma_q: return {"gamma_q_khz", 1e3};
    case Param::gamma_t: return {"gamma_t_per_s", 1.0};
    case Param::p_th: return {"p_th", 1.0};
  }
  return {"?", 1.0};
}

inline Param param_from_key(const std::string& key) {
  for (Param p : kAllParams)
    if (key == param_unit(p).key || key == param_name(p)) return p;
  throw ConfigError("unknown fit parameter '" + key + "'");
}

struct FitJob {
  FitProblem problem;
  ParamVector initial{};
};

/// Dataset CSV paths are resolved against `base_dir`.
inline FitJob parse_fit_problem(const Json& j, const std::filesystem::path& base_dir) {
  detail::allow_keys(j, "fit", {"system", "datasets", "free", "bounds", "restarts", "seed", "max_evaluations"});
  FitJob job;
  job.problem.base = j.contains("system") ? parse_system(j.at("system")) : reference_parameters();
  job.initial = to_param_vector(job.problem.base);
  if (j.contains("free")) {
    for (const auto& f : j.at("free")) {
      if (!f.is_string()) throw ConfigError("fit.free: entries must be parameter names");
      job.problem.free_params.push_back(param_from_key(f.get<std::string>()));
    }
  }
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    if (!b.is_object()) throw ConfigError("fit.bounds: expected an object");
    for (const auto& [key, range] : b.items()) {
      const Param p = param_from_key(key);
      if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number())
        throw ConfigError("fit.bounds." + key + ": expected [lo, hi]");
      const double s = param_unit(p).scale;
      job.problem.bounds[idx(p)] = Bounds{range[0].get<double>() * s, range[1].get<double>() * s};
    }
  }
  job.problem.restarts = static_cast<int>(detail::integer(j, "restarts", "fit", job.problem.restarts));
  if (j.contains("seed")) job.problem.seed = j.at("seed").get<std::uint64_t>();
  job.problem.max_evaluations =
      static_cast<int>(detail::integer(j, "max_evaluations", "fit", job.problem.max_evaluations));
  if (!j.contains("datasets") || !j.at("datasets").is_array()) throw ConfigError("fit: 'datasets' must be an array");
  std::size_t i = 0;
  for (const auto& d : j.at("datasets")) {
    const std::string where = "fit.datasets[" + std::to_string(i++) + "]";
    detail::allow_keys(d, where, {"name", "csv", "experiment", "window_us"});
    Dataset ds;
    ds.name = detail::text(d, "name", where, where);
    if (!d.contains("experiment")) throw ConfigError(where + ": missing 'experiment'");
    ds.experiment = parse_experiment(d.at("experiment"), where + ".experiment", job.problem.base.ladder.n_tls).experiment;
    const std::filesystem::path csv_path = base_dir / detail::text(d, "csv", where);
    if (!std::filesystem::exists(csv_path)) throw ConfigError(where + ": dataset file '" + csv_path.string() + "' does not exist");
    csv::Table table;
    try {
      table = csv::read_file(csv_path.string());
      ds.times = table.column("t");
      ds.p_q = table.column("p_q");
      if (table.has("stderr")) ds.stderr_ = table.column("stderr");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (d.contains("window_us")) {
      const auto& w = d.at("window_us");
      if (!w.is_array() || w.size() != 2) throw ConfigError(where + ": window_us must be [start, end]");
      ds.window_start = w[0].get<double>() * 1e-6;
      ds.window_end = w[1].get<double>() * 1e-6;
    }
    job.problem.datasets.push_back(std::move(ds));
  }
  try {
    job.problem.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("fit: ") + e.what());
  }
  return job;
}

inline Json to_json(const FitResult& r) {
  Json values = Json::object();
  for (Param p : kAllParams) values[param_unit(p).key] = r.values[idx(p)] / param_unit(p).scale;
  Json free = Json::array();
  Json unc = Json::object();
  for (std::size_t i = 0; i < r.free_params.size(); ++i) {
    const auto u = param_unit(r.free_params[i]);
    free.push_back(u.key);
    unc[u.key] = i < r.uncertainties.size() ? r.uncertainties[i] / u.scale : 0.0;
  }
  return Json{{"free", free},
              {"values", values},
              {"uncertainties", unc},
              {"residual_norm", r.residual_norm},
              {"initial_residual_norm", r.initial_residual_norm},
              {"iterations", r.iterations},
              {"evaluations", r.evaluations},
              {"termination", r.termination},
              {"converged", r.converged}};
}

}  // namespace szilard

#endif  // SZILARD_CONFIG_HPP_
