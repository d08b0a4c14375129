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

// szilard: configuration-driven runner.
//
//   szilard simulate --config run.json --out DIR [--seed N] [--trajectories N] [--mode det|stoch|both]
//   szilard fit      --config problem.json [--out DIR]
//   szilard thermo   [--p-th P | --t-mk T] [--d D] [--t-a-mk T ...]
//   szilard flux     [--v V] [--phi-ext PHI] [--ej1 E --ej2 E --phi-s RAD]
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error. Errors are
// written to stderr as one JSON object.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "szilard/szilard.hpp"

namespace fs = std::filesystem;
using namespace szilard;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

int report_error(int code, const std::string& message) {
  const Json err{{"error", code == kConfigError ? "config" : "runtime"}, {"exit_code", code}, {"message", message}};
  std::cerr << err.dump() << '\n';
  return code;
}

/// Collects output files in memory so nothing touches the output directory
/// until every computation has succeeded.
struct OutputSet {
  std::vector<std::pair<fs::path, std::string>> files;
  void add(fs::path rel, std::string content) { files.emplace_back(std::move(rel), std::move(content)); }
};

/// Writes every file into a staging directory and swaps it into place.
void commit(const OutputSet& outputs, const fs::path& out_dir) {
  const fs::path target = fs::absolute(out_dir).lexically_normal();
  const fs::path staging = target.string() + ".partial-" + std::to_string(::getpid());
  fs::remove_all(staging);
  fs::create_directories(staging);
  for (const auto& [rel, content] : outputs.files) {
    const fs::path p = staging / rel;
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("failed writing " + p.string());
  }
  if (fs::exists(target)) {
    const fs::path old = target.string() + ".old-" + std::to_string(::getpid());
    fs::rename(target, old);
    fs::rename(staging, target);
    fs::remove_all(old);
  } else {
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::rename(staging, target);
  }
}

std::string stamp(const std::string& hash) { return "config_hash=" + hash; }

std::string populations_csv(const DeterministicResult& res, const std::string& hash) {
  std::ostringstream os;
  csv::Writer w(os);
  w.comment(stamp(hash));
  std::vector<std::string> names{"t", "p_q", "p_eq", "gamma_up", "gamma_down"};
  const std::size_t n = res.states.empty() ? 0 : res.states.front().p_t.size();
  for (std::size_t k = 0; k < n; ++k) names.push_back("p_t_" + std::to_string(k));
  w.header(names);
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    w.cell(res.times[i]).cell(res.states[i].p_q).cell(res.p_eq[i]).cell(res.gamma_up[i]).cell(res.gamma_down[i]);
    for (double p : res.states[i].p_t) w.cell(p);
    w.end_row();
  }
  return os.str();
}

std::string rates_csv(const RateSeries& r, const std::string& hash) {
  std::ostringstream os;
  csv::Writer w(os);
  w.comment(stamp(hash));
  w.comment("window=" + std::to_string(r.window));
  w.header({"t", "gamma_up", "gamma_up_err", "gamma_down", "gamma_down_err", "gamma_1", "p_eq"});
  for (std::size_t i = 0; i < r.size(); ++i) {
    w.cell(r.times[i]).cell(r.gamma_up[i]).cell(r.gamma_up_err[i]).cell(r.gamma_down[i]).cell(r.gamma_down_err[i]);
    w.cell(r.gamma_1[i]).cell(r.p_eq[i]);
    w.end_row();
  }
  return os.str();
}

RateSeries deterministic_rates(const DeterministicResult& res) {
  RateSeries r;
  r.times = res.times;
  r.gamma_up = res.gamma_up;
  r.gamma_down = res.gamma_down;
  r.gamma_up_err.assign(res.times.size(), 0.0);
  r.gamma_down_err.assign(res.times.size(), 0.0);
  r.derive();
  return r;
}

std::string traces_csv(const std::vector<JumpTrace>& ensemble, std::size_t limit, const std::string& hash) {
  std::ostringstream os;
  csv::Writer w(os);
  w.comment(stamp(hash));
  w.header({"traj_id", "strobe_index", "t", "assigned", "I", "Q", "pi_fired"});
  const double nan = std::nan("");
  for (std::size_t k = 0; k < std::min(limit, ensemble.size()); ++k) {
    const auto& tr = ensemble[k];
    for (std::size_t i = 0; i < tr.size(); ++i) {
      w.cell(k).cell(i).cell(tr.schedule->times[i]).cell(static_cast<int>(tr.assigned[i]));
      w.cell(tr.iq.empty() ? nan : tr.iq[i].i).cell(tr.iq.empty() ? nan : tr.iq[i].q);
      w.cell(static_cast<int>(tr.pi_fired[i]));
      w.end_row();
    }
  }
  return os.str();
}

std::string series_csv(const PopulationSeries& s, const char* value, const std::string& hash) {
  std::ostringstream os;
  csv::Writer w(os);
  w.comment(stamp(hash));
  w.header({"t", value, "stderr"});
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    w.cell(s.times[i]).cell(s.p_q[i]).cell(s.stderr_[i]);
    w.end_row();
  }
  return os.str();
}

/// Rate series of the longest run of t_rep-spaced strobes; empty if there is none.
std::optional<double> rate_spacing(const Experiment& exp) {
  for (const auto& s : exp.steps)
    if (const auto* m = std::get_if<Monitor>(&s)) return m->t_rep;
  for (const auto& s : exp.steps)
    if (const auto* st = std::get_if<Stabilize>(&s)) return st->t_rep;
  return std::nullopt;
}

constexpr std::size_t kExportedTraces = 100;

void simulate_one(const RunConfig& cfg, const NamedExperiment& ne, const fs::path& prefix, const std::string& hash,
                  unsigned threads, OutputSet& out) {
  const Experiment& exp = ne.experiment;
  std::optional<DeterministicResult> det;
  if (cfg.mode != RunMode::stochastic) {
    det = run_deterministic(exp, cfg.system, cfg.sampling.times(exp));
    out.add(prefix / "populations.csv", populations_csv(*det, hash));
  }
  if (cfg.stochastic()) {
    TrajectoryOptions opt;
    opt.record_iq = cfg.record_iq;
    opt.threads = threads;
    const auto ensemble = run_ensemble(exp, cfg.system, cfg.readout, cfg.master_seed,
                                       static_cast<std::size_t>(cfg.n_traj), opt);
    out.add(prefix / "traces.csv", traces_csv(ensemble, kExportedTraces, hash));
    out.add(prefix / "jump_populations.csv", series_csv(population_series(ensemble), "p_q", hash));
    if (ensemble.front().size() > 0 && std::any_of(ensemble.front().schedule->phases.begin(),
                                                   ensemble.front().schedule->phases.end(),
                                                   [](StrobePhase p) { return p == StrobePhase::stabilize; }))
      out.add(prefix / "pi_probability.csv", series_csv(pi_pulse_probability(ensemble), "p_pi", hash));
    const auto t_rep = rate_spacing(exp);
    if (t_rep && ensemble.front().size() >= 2)
      out.add(prefix / "rates.csv", rates_csv(moving_average(extract_rates(ensemble, *t_rep), cfg.rate_window), hash));
  } else {
    out.add(prefix / "rates.csv", rates_csv(deterministic_rates(*det), hash));
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                 std::optional<std::int64_t> trajectories, std::optional<std::string> mode, unsigned threads) {
  RunConfig cfg;
  try {
    cfg = parse_run_config(read_json_file(config_path));
    if (seed) cfg.master_seed = *seed;
    if (trajectories) cfg.n_traj = *trajectories;
    if (mode) cfg.mode = parse_mode(*mode);
    if (cfg.stochastic() && cfg.n_traj < 1) throw ConfigError("n_traj must be >= 1 in stochastic modes");
  } catch (const ConfigError& e) {
    return report_error(kConfigError, e.what());
  } catch (const nlohmann::json::exception& e) {
    return report_error(kConfigError, e.what());
  }

  const std::string hash = config_hash(cfg);
  OutputSet out;
  try {
    for (const auto& ne : cfg.experiments)
      simulate_one(cfg, ne, cfg.single_experiment ? fs::path() : fs::path(ne.name), hash, threads, out);
    Json manifest{{"version", kVersion},
                  {"config_hash", hash},
                  {"seed", cfg.master_seed},
                  {"config", to_json(cfg)}};
    Json files = Json::array();
    for (const auto& f : out.files) files.push_back(f.first.generic_string());
    manifest["outputs"] = files;
    out.add("manifest.json", manifest.dump(2) + "\n");
    commit(out, out_dir);
  } catch (const std::invalid_argument& e) {
    return report_error(kConfigError, e.what());
  } catch (const std::exception& e) {
    return report_error(kRuntimeError, e.what());
  }
  std::cout << "wrote " << out.files.size() << " files to " << out_dir << " (config_hash=" << hash << ")\n";
  return 0;
}

int cmd_fit(const std::string& problem_path, const std::optional<std::string>& out_dir) {
  FitJob job;
  try {
    job = parse_fit_problem(read_json_file(problem_path), fs::path(problem_path).parent_path());
  } catch (const ConfigError& e) {
    return report_error(kConfigError, e.what());
  } catch (const nlohmann::json::exception& e) {
    return report_error(kConfigError, e.what());
  }
  Json result;
  try {
    result = to_json(fit(job.problem, job.initial));
  } catch (const std::invalid_argument& e) {
    return report_error(kConfigError, e.what());
  } catch (const std::exception& e) {
    return report_error(kRuntimeError, e.what());
  }
  const std::string text = result.dump(2) + "\n";
  if (out_dir) {
    try {
      OutputSet out;
      out.add("fit_result.json", text);
      commit(out, *out_dir);
    } catch (const std::exception& e) {
      return report_error(kRuntimeError, e.what());
    }
  }
  std::cout << text;
  return 0;
}

int cmd_thermo(std::optional<double> p_th, std::optional<double> t_mk, int d, std::vector<double> t_a_mk,
               const std::optional<std::string>& config_path) {
  SystemParams params = reference_parameters();
  double t_r = 0.0;
  try {
    if (config_path) {
      const Json j = read_json_file(*config_path);
      const Json& cfg = j.contains("config") ? j.at("config") : j;
      if (cfg.contains("system")) params = parse_system(cfg.at("system"));
    }
    if (p_th && t_mk) throw ConfigError("give either --p-th or --t-mk, not both");
    if (d < 1) throw ConfigError("--d must be >= 1");
    if (p_th) {
      if (!(*p_th > 0.0 && *p_th < 0.5)) throw ConfigError("--p-th must lie in (0, 0.5)");
      t_r = constants::kPlanckOverBoltzmann * params.qubit.f01 / beta_eps_from_population(*p_th);
    } else {
      t_r = (t_mk ? *t_mk : kIdleTemperature * 1e3) * 1e-3;
      if (!(t_r > 0.0)) throw ConfigError("--t-mk must be > 0");
    }
    for (double t : t_a_mk)
      if (!(t * 1e-3 > t_r)) throw ConfigError("every --t-a-mk must exceed the reservoir temperature");
  } catch (const ConfigError& e) {
    return report_error(kConfigError, e.what());
  }
  if (t_a_mk.empty())
    for (double f : {1.25, 1.5, 2.0, 4.0, 10.0}) t_a_mk.push_back(f * t_r * 1e3);

  try {
    const auto s = cycle_summary(params, t_a_mk.front() * 1e-3, t_r, d);
    std::cout << std::setprecision(6);
    std::cout << "reservoir temperature T_R  = " << t_r * 1e3 << " mK\n"
              << "degeneracy d               = " << d << "\n"
              << "beta*eps                   = " << s.beta_eps << "\n"
              << "excited population         = " << s.p_excited << "\n"
              << "delta_U (k_B T_R)          = " << s.delta_u << "\n"
              << "delta_S measurement (k_B)  = " << s.delta_s << "\n"
              << "S_rev (k_B)                = " << s.s_rev << "\n"
              << "S_irr (k_B)                = " << s.s_irr << "\n"
              << "S_irr / S_rev              = " << s.irr_rev << "\n"
              << "delta_Q_R dynamic (k_B T_R)= " << s.dynamic_dq_r << " at " << s.dynamic_peak_time * 1e6 << " us\n"
              << "delta_Q_R dynamic / delta_U= " << s.dynamic_dq_r / s.delta_u << "\n"
              << "\nT_A (mK), W_M (k_B T_R), COP, Carnot COP\n";
    for (double t_a : t_a_mk) {
      const double ta = t_a * 1e-3;
      std::cout << t_a << ", " << ta / t_r * s.delta_s << ", " << cop(ta, t_r, s.irr_rev) << ", "
                << carnot_cop(ta, t_r) << "\n";
    }
  } catch (const std::exception& e) {
    return report_error(kRuntimeError, e.what());
  }
  return 0;
}

int cmd_flux(double v, double phi_ext, std::optional<double> ej1, std::optional<double> ej2, double phi_s,
             std::int64_t bound) {
  if (!(v > 0.0) || bound < 1) return report_error(kConfigError, "--v must be > 0 and --bound >= 1");
  if (ej1.has_value() != ej2.has_value()) return report_error(kConfigError, "give both --ej1 and --ej2");
  const auto part = flux_partition(v, phi_ext);
  std::cout << std::setprecision(7) << "V = " << v << ", phi_ext = " << phi_ext << " (flux quanta)\n"
            << "phi_s       = " << part.phi_s << " * 2pi\n"
            << "phi_l       = " << part.phi_l << " * 2pi\n"
            << "phi_l+phi_s = " << part.phi_l_plus_s << " * 2pi\n";
  const auto witness = interference_condition(v, bound);
  if (witness)
    std::cout << "interference condition satisfiable: V = (2k-1)/(2m) with m = " << witness->m << ", k = " << witness->k
              << "\n";
  else
    std::cout << "interference condition not satisfiable for |m|, |k| <= " << bound << "\n";
  if (ej1) {
    try {
      const auto j = effective_junction(*ej1 * 1e9, *ej2 * 1e9, phi_s);
      std::cout << "E_J^eff = " << j.ej_eff / 1e9 << " GHz, phase offset = " << j.phase_offset << " rad\n";
    } catch (const std::exception& e) {
      return report_error(kConfigError, e.what());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit / TLS-bath feedback-cooling simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trajectories;
  std::optional<std::string> mode;
  unsigned threads = 0;
  auto* sim = app.add_subcommand("simulate", "Run a configured experiment");
  sim->add_option("--config", config, "Run configuration (JSON) or a manifest")->required();
  sim->add_option("--out", out, "Output directory")->required();
  sim->add_option("--seed", seed, "Master seed (overrides the config)");
  sim->add_option("--trajectories", trajectories, "Trajectory count (overrides the config)");
  sim->add_option("--mode", mode, "det, stoch or both (overrides the config)");
  sim->add_option("--threads", threads, "Worker threads for trajectories (0: all cores)");

  std::string problem;
  std::optional<std::string> fit_out;
  auto* fitc = app.add_subcommand("fit", "Fit model parameters to population curves");
  fitc->add_option("--config", problem, "Fit problem (JSON)")->required();
  fitc->add_option("--out", fit_out, "Directory for fit_result.json");

  std::optional<double> p_th, t_mk;
  std::optional<std::string> thermo_config;
  int d = 1;
  std::vector<double> t_a_mk;
  auto* th = app.add_subcommand("thermo", "Szilard-cycle thermodynamics report");
  th->add_option("--p-th", p_th, "Reservoir excited population");
  th->add_option("--t-mk", t_mk, "Reservoir temperature in mK");
  th->add_option("--d", d, "Excited-level degeneracy");
  th->add_option("--t-a-mk", t_a_mk, "Apparatus temperatures (mK) for the COP table");
  th->add_option("--config", thermo_config, "Take system parameters from this config");

  double v = device::kAreaRatio, phi_ext = device::kFluxBias, phi_s = 0.0;
  std::optional<double> ej1, ej2;
  std::int64_t bound = 1000;
  auto* fl = app.add_subcommand("flux", "SQUID flux partition and interference check");
  fl->add_option("--v", v, "Loop-area ratio V");
  fl->add_option("--phi-ext", phi_ext, "Global flux in flux quanta");
  fl->add_option("--ej1", ej1, "Junction 1 energy in GHz");
  fl->add_option("--ej2", ej2, "Junction 2 energy in GHz");
  fl->add_option("--phi-s", phi_s, "SQUID phase in rad for the effective junction");
  fl->add_option("--bound", bound, "Search bound for the interference witness");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(kConfigError, e.what());
  }

  if (*sim) return cmd_simulate(config, out, seed, trajectories, mode, threads);
  if (*fitc) return cmd_fit(problem, fit_out);
  if (*th) return cmd_thermo(p_th, t_mk, d, t_a_mk, thermo_config);
  return cmd_flux(v, phi_ext, ej1, ej2, phi_s, bound);
}
