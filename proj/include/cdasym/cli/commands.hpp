#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "cdasym/cli/artifacts.hpp"
#include "cdasym/cli/scenarios.hpp"

namespace cdasym::cli {

enum ExitCode : int { kPass = 0, kNumericalFail = 1, kUsage = 2 };

// Output root: explicit flag, else $CDASYM_OUT, else ./cdasym_out.
inline std::filesystem::path output_root(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("CDASYM_OUT"); env && *env) return env;
  return "cdasym_out";
}

inline toml::table parse_toml(const std::string& path) {
  try {
    return toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    throw UsageError("cannot parse " + path + ": " + std::string(e.description()));
  }
}

inline std::optional<double> toml_real(const toml::table& t, const char* key) {
  const toml::node* node = t.get(key);
  if (!node) return std::nullopt;
  if (auto v = node->value<double>()) return *v;
  throw UsageError(std::string("config key '") + key + "' must be a number");
}

// Scenario overrides from a TOML table: keys n, dt, t_end, q, mass (a [run]
// table is also accepted). Sweeps read q as an array and skip it here.
inline Overrides overrides_from_table(const toml::table& root, bool read_q = true) {
  const toml::table* t = &root;
  if (auto run = root["run"].as_table()) t = run;
  Overrides o;
  if (auto n = toml_real(*t, "n")) {
    if (!(*n >= 1.0) || *n != std::floor(*n)) throw UsageError("config key 'n' must be a positive integer");
    o.n = static_cast<std::size_t>(*n);
  }
  o.dt = toml_real(*t, "dt");
  o.t_end = toml_real(*t, "t_end");
  if (read_q) o.q = toml_real(*t, "q");
  o.mass = toml_real(*t, "mass");
  return o;
}

inline Overrides overrides_from_toml(const std::string& path) { return overrides_from_table(parse_toml(path)); }

// Flags win over file values.
inline Overrides merge(Overrides file, const Overrides& flags) {
  if (flags.n) file.n = flags.n;
  if (flags.dt) file.dt = flags.dt;
  if (flags.t_end) file.t_end = flags.t_end;
  if (flags.q) file.q = flags.q;
  if (flags.mass) file.mass = flags.mass;
  return file;
}

inline nlohmann::json overrides_json(const Overrides& o) {
  nlohmann::json j = nlohmann::json::object();
  if (o.n) j["n"] = *o.n;
  if (o.dt) j["dt"] = *o.dt;
  if (o.t_end) j["t_end"] = *o.t_end;
  if (o.q) j["q"] = *o.q;
  if (o.mass) j["mass"] = *o.mass;
  return j;
}

// Writes series.csv, snapshots/, plots/, report.json and manifest.json under dir.
inline void write_artifacts(const std::filesystem::path& dir, const ScenarioResult& result, const Overrides& o) {
  std::filesystem::create_directories(dir);
  if (result.trajectory) {
    write_series(dir / "series.csv", *result.trajectory);
    write_snapshots(dir / "snapshots", *result.trajectory);
  }
  for (const auto& plot : result.plots) write_plot(dir / "plots", plot);
  nlohmann::json report = result.to_json();
  report["overrides"] = overrides_json(o);
  report["timestamp"] = utc_timestamp();
  write_json(dir / "report.json", report);

  nlohmann::json inputs{{"scenario", result.scenario}, {"overrides", overrides_json(o)}, {"config", result.config}};
  nlohmann::json manifest{{"scenario", result.scenario},
                          {"config", result.config},
                          {"input_hash", git_blob_hash(inputs.dump())},
                          {"files", nlohmann::json::array()}};
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
      manifest["files"].push_back(std::filesystem::relative(entry.path(), dir).generic_string());
    }
  }
  std::sort(manifest["files"].begin(), manifest["files"].end());
  write_json(dir / "manifest.json", manifest);
}

inline void print_summary(std::ostream& out, const ScenarioResult& r) {
  for (const auto& c : r.checks) {
    out << (c.pass ? "pass " : "FAIL ") << r.scenario << ' ' << c.name << ": " << io::format_real(c.value) << ' '
        << c.relation << ' ' << io::format_real(c.limit) << '\n';
  }
  for (const auto& d : r.reports) {
    out << (d.pass ? "pass " : "FAIL ") << r.scenario << ' ' << d.quantity << (d.p.empty() ? "" : " p=" + d.p)
        << ": slope " << io::format_real(d.fitted_slope) << " target " << io::format_real(d.target_slope) << " +/- "
        << d.tolerance * 100.0 << "%\n";
  }
}

// `cdasym run <scenario>`.
inline int cmd_run(const std::string& scenario, const Overrides& o, const std::filesystem::path& root,
                   std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  if (!scenarios().count(scenario)) {
    err << "unknown scenario '" << scenario << "'; expected one of:";
    for (const auto& [name, fn] : scenarios()) err << ' ' << name;
    err << '\n';
    return kUsage;
  }
  ScenarioResult result;
  try {
    result = run_scenario(scenario, o);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << scenario << " failed: " << e.what() << '\n';
    nlohmann::json report{{"scenario", scenario},
                          {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}},
                          {"overrides", overrides_json(o)},
                          {"timestamp", utc_timestamp()},
                          {"verdict", "error"}};
    write_json(root / scenario / "report.json", report);
    return kNumericalFail;
  }
  write_artifacts(root / scenario, result, o);
  print_summary(out, result);
  out << scenario << ": " << (result.pass() ? "pass" : "FAIL") << " (" << (root / scenario).string() << ")\n";
  return result.pass() ? kPass : kNumericalFail;
}

// ---------------------------------------------------------------------------
// Profiles

struct ProfileOptions {
  double mass = 1.0;
  double q = 2.0;
  int dimension = 1;
  bool dynamical = false;
  std::size_t n = 3001;
};

struct ProfileResult {
  Field profile;
  nlohmann::json summary;
  bool pass = true;
};

// Self-similar profile f_M for q = 1 + 1/N (N = 1): closed form, optionally
// compared with the similarity-frame steady state.
inline ProfileResult compute_profile(const ProfileOptions& opts) {
  if (opts.dimension != 1) throw UsageError("profiles are available for N = 1 only");
  if (opts.q != 1.0 + 1.0 / opts.dimension) throw UsageError("profiles exist for q = 1 + 1/N; N = 1 needs q = 2");
  if (!std::isfinite(opts.mass)) throw UsageError("mass must be finite");
  if (opts.n < 9) throw UsageError("--n must be >= 9");
  Grid1D g(-15.0, 15.0, opts.n);
  Field f = exact::burgers_profile_field(opts.mass, g);
  ProfileResult r{f, nlohmann::json::object()};
  const double m = trapezoid_integral(f);
  const double mass_err = std::abs(m - opts.mass);
  bool sign_ok = true;
  for (double v : f.values()) {
    if (opts.mass > 0.0) sign_ok = sign_ok && v > 0.0;
    if (opts.mass < 0.0) sign_ok = sign_ok && v < 0.0;
    if (opts.mass == 0.0) sign_ok = sign_ok && v == 0.0;
  }
  r.summary["route"] = opts.dynamical ? "closed_form+dynamical" : "closed_form";
  r.summary["mass"] = opts.mass;
  r.summary["q"] = opts.q;
  r.summary["N"] = opts.dimension;
  r.summary["grid"] = {g.x_min(), g.x_max(), g.size()};
  r.summary["mass_check"] = {{"value", m}, {"error", mass_err}, {"verdict", mass_err <= 1e-8 ? "pass" : "fail"}};
  r.summary["sign_check"] = sign_ok ? "pass" : "fail";
  r.pass = mass_err <= 1e-8 && sign_ok;
  if (opts.dynamical) {
    RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{opts.mass, 1.0, 0.0}};
    c.frame = Frame::Similarity;
    c.t_end = 25.0;
    c.dt = 0.01;
    auto traj = run(c);
    const double d = lp_distance(traj.snapshots.back(), f, Lp(1));
    r.summary["dynamical"] = {{"s", 25.0},
                              {"l1_distance_to_closed_form", d},
                              {"mass_drift", traj.max_mass_drift},
                              {"verdict", d < 1e-4 ? "pass" : "fail"}};
    r.pass = r.pass && d < 1e-4 && traj.mass_conserved();
  }
  r.summary["verdict"] = r.pass ? "pass" : "fail";
  return r;
}

// `cdasym profile`: writes profile.csv (x,f) and summary.json.
inline int cmd_profile(const ProfileOptions& opts, const std::filesystem::path& root, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  std::optional<ProfileResult> computed;
  try {
    computed = compute_profile(opts);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "profile failed: " << e.what() << '\n';
    return kNumericalFail;
  }
  const ProfileResult& r = *computed;
  const auto dir = root / "profile";
  io::write_field_csv(dir / "profile.csv", r.profile, "f");
  nlohmann::json summary = r.summary;
  summary["timestamp"] = utc_timestamp();
  write_json(dir / "summary.json", summary);
  out << "profile M=" << io::format_real(opts.mass) << ": " << (r.pass ? "pass" : "FAIL") << " (" << dir.string() << ")\n";
  return r.pass ? kPass : kNumericalFail;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepPlan {
  std::vector<double> qs;
  std::vector<Lp> ps;
  std::vector<std::string> generators{"gaussian"};
  Overrides overrides;
};

inline Lp parse_p(const toml::node& node) {
  if (auto s = node.value<std::string>()) {
    if (*s == "inf" || *s == "infinity") return Lp::inf();
    throw UsageError("p must be a number or \"inf\"");
  }
  if (auto v = node.value<double>()) {
    if (*v != 1.0 && *v != 2.0) throw UsageError("sweep p must be 1, 2 or \"inf\"");
    return Lp(*v);
  }
  throw UsageError("p must be a number or \"inf\"");
}

// Sweep matrix from TOML: q = [...], p = [1, 2, "inf"], generator = ["gaussian", "box"],
// plus optional n, dt, t_end, mass.
inline SweepPlan sweep_plan_from_toml(const std::string& path) {
  toml::table t = parse_toml(path);
  SweepPlan plan;
  plan.overrides = overrides_from_table(t, false);
  auto qs = t["q"].as_array();
  auto ps = t["p"].as_array();
  if (!qs || !ps || qs->empty() || ps->empty()) throw UsageError("sweep config needs non-empty arrays q and p");
  for (const auto& node : *qs) {
    auto v = node.value<double>();
    if (!v) throw UsageError("q entries must be numbers");
    plan.qs.push_back(*v);
  }
  for (const auto& node : *ps) plan.ps.push_back(parse_p(node));
  if (auto gens = t["generator"].as_array()) {
    plan.generators.clear();
    for (const auto& node : *gens) {
      auto s = node.value<std::string>();
      if (!s) throw UsageError("generator entries must be strings");
      plan.generators.push_back(*s);
    }
  }
  return plan;
}

inline std::string cell_key(double q, Lp p, const std::string& generator, bool with_generator) {
  std::string key = "q=" + real_key(q) + ",p=" + p.label();
  if (with_generator) key += ",generator=" + generator;
  return key;
}

struct SweepResult {
  nlohmann::json cells = nlohmann::json::object();
  bool any_error = false;
  bool all_pass = true;
};

// One run per (q, generator); its norm-decay fits fill the p cells. Results
// land in a key-ordered map, so the aggregate does not depend on `jobs`.
inline SweepResult run_sweep(const SweepPlan& plan, unsigned jobs) {
  struct Task {
    double q;
    std::string generator;
  };
  std::vector<Task> tasks;
  for (double q : plan.qs) {
    for (const auto& g : plan.generators) tasks.push_back({q, g});
  }
  // Validate before spawning work.
  for (const auto& t : tasks) (void)decay_run_config(t.q, t.generator, plan.overrides);

  const bool with_generator = plan.generators.size() > 1;
  std::map<std::string, nlohmann::json> cells;
  std::mutex lock;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& task = tasks[i];
      std::map<std::string, nlohmann::json> local;
      try {
        auto traj = run(decay_run_config(task.q, task.generator, plan.overrides));
        for (Lp p : plan.ps) {
          nlohmann::json cell = norm_decay_report(traj, task.q, p).to_json();
          cell["mass_drift"] = traj.max_mass_drift;
          cell["mass_conserved"] = traj.mass_conserved();
          local[cell_key(task.q, p, task.generator, with_generator)] = cell;
        }
      } catch (const std::exception& e) {
        for (Lp p : plan.ps) local[cell_key(task.q, p, task.generator, with_generator)] = {{"error", e.what()}};
      }
      std::lock_guard<std::mutex> guard(lock);
      cells.merge(local);
    }
  };
  std::vector<std::thread> pool;
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  SweepResult result;
  for (auto& [key, cell] : cells) {
    if (cell.contains("error")) {
      result.any_error = true;
      result.all_pass = false;
    } else if (cell["verdict"] != "pass" || !cell["mass_conserved"].get<bool>()) {
      result.all_pass = false;
    }
    result.cells[key] = cell;
  }
  return result;
}

// `cdasym sweep`: writes <root>/sweep/report.json.
inline int cmd_sweep(const std::string& config_path, unsigned jobs, const std::filesystem::path& root,
                     std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  SweepPlan plan;
  SweepResult result;
  try {
    plan = sweep_plan_from_toml(config_path);
    result = run_sweep(plan, jobs);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  }
  nlohmann::json report{{"cells", result.cells},
                        {"config", {{"q", plan.qs}, {"generator", plan.generators}, {"overrides", overrides_json(plan.overrides)}}},
                        {"timestamp", utc_timestamp()},
                        {"verdict", result.any_error ? "error" : (result.all_pass ? "pass" : "fail")}};
  nlohmann::json plist = nlohmann::json::array();
  for (Lp p : plan.ps) plist.push_back(p.label());
  report["config"]["p"] = plist;
  write_json(root / "sweep" / "report.json", report);
  for (const auto& [key, cell] : result.cells.items()) {
    out << key << ": " << (cell.contains("error") ? "error: " + cell["error"].get<std::string>() : cell["verdict"].get<std::string>())
        << '\n';
  }
  return (result.any_error || !result.all_pass) ? kNumericalFail : kPass;
}

}  // namespace cdasym::cli
