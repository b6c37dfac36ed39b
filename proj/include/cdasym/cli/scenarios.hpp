#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdasym/cli/artifacts.hpp"
#include "cdasym/diagnostics.hpp"
#include "cdasym/exact.hpp"
#include "cdasym/initial.hpp"
#include "cdasym/solver.hpp"
#include "cdasym/spectral.hpp"

namespace cdasym::cli {

// Bad command line or configuration; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<std::size_t> n;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<double> q;
  std::optional<double> mass;
};

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string relation;
  bool pass = false;
  std::string note;

  nlohmann::json to_json() const {
    nlohmann::json j{{"value", value}, {"limit", limit}, {"relation", relation}, {"verdict", pass ? "pass" : "fail"}};
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

struct ScenarioResult {
  std::string scenario;
  nlohmann::json anchor;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<diagnostics::DecayReport> reports;
  std::optional<Trajectory> trajectory;
  std::vector<Plot> plots;

  Check& le(const std::string& name, double value, double limit, std::string note = "") {
    checks.push_back({name, value, limit, "<=", value <= limit, std::move(note)});
    return checks.back();
  }
  Check& lt(const std::string& name, double value, double limit, std::string note = "") {
    checks.push_back({name, value, limit, "<", value < limit, std::move(note)});
    return checks.back();
  }
  Check& holds(const std::string& name, bool ok, std::string note = "") {
    checks.push_back({name, ok ? 1.0 : 0.0, 1.0, "==", ok, std::move(note)});
    return checks.back();
  }
  void report(diagnostics::DecayReport r) { reports.push_back(std::move(r)); }

  // |mass drift| <= 1e-8 (1 + |M|) at every step of the run.
  void mass(const std::string& label, const Trajectory& traj) {
    le("mass_drift/" + label, traj.max_mass_drift, traj.mass_drift_bound());
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    for (const auto& r : reports) {
      if (!r.pass) return false;
    }
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["anchor"] = anchor;
    j["config"] = config;
    nlohmann::json c = nlohmann::json::object();
    for (const auto& ch : checks) c[ch.name] = ch.to_json();
    j["checks"] = c;
    nlohmann::json r = nlohmann::json::array();
    for (const auto& rep : reports) r.push_back(rep.to_json());
    j["decay_reports"] = r;
    j["verdict"] = pass() ? "pass" : "fail";
    return j;
  }
};

inline nlohmann::json describe(const RunConfig& c) {
  return {{"grid", {{"x_min", c.grid.x_min()}, {"x_max", c.grid.x_max()}, {"n", c.grid.size()}}},
          {"nonlinearity", c.nonlinearity.describe()},
          {"initial", c.initial_field ? std::string("field") : describe(c.initial)},
          {"t_end", c.t_end},
          {"dt", c.dt},
          {"frame", to_string(c.frame)},
          {"scheme", to_string(c.scheme)},
          {"grow_domain", c.grow_domain},
          {"grow_dt_factor", c.grow_dt_factor},
          {"boundary_tol", c.boundary_tol}};
}

inline Plot curve_plot(const std::string& name, const std::vector<diagnostics::DistanceSample>& s) {
  Plot p{name, {"t", "scaled_distance"}, {{}, {}}};
  for (const auto& x : s) {
    p.columns[0].push_back(x.t);
    p.columns[1].push_back(x.scaled);
  }
  return p;
}

inline Plot sample_plot(const std::string& name, const std::string& value, const std::vector<diagnostics::Sample>& s) {
  Plot p{name, {"t", value}, {{}, {}}};
  for (const auto& x : s) {
    p.columns[0].push_back(x.t);
    p.columns[1].push_back(x.value);
  }
  return p;
}

inline Plot field_plot(const std::string& name, const Field& f, const std::string& value = "u") {
  return {name, {"x", value}, {f.grid().nodes(), f.data()}};
}

inline std::string real_key(double v) {
  // Shortest round-trippable form, e.g. 2.5 or 3.
  char buf[32];
  for (int digits = 1; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::stod(buf) == v) return buf;
  }
  return io::format_real(v);
}

namespace detail {

inline std::size_t odd_nodes(std::optional<std::size_t> n, std::size_t fallback) {
  std::size_t v = n.value_or(fallback);
  if (v < 9 || v % 2 == 0) throw UsageError("--n must be odd and >= 9 for runs that grow their domain");
  return v;
}

inline double positive(std::optional<double> v, double fallback, const char* what) {
  double x = v.value_or(fallback);
  if (!(x > 0.0) || !std::isfinite(x)) throw UsageError(std::string(what) + " must be > 0");
  return x;
}

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] < v[k - 1])) return false;
  }
  return true;
}

inline Field on_frame(Field f, Frame frame) { return Field(f.grid(), f.data(), 0.0, frame); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Decay runs shared by decay-suite and sweep

// Run settings for the decay law at exponent q: implicit-diffusion runs for
// q >= 2, monotone upwind runs (N-wave convention a = -1/q, large mass) below.
inline RunConfig decay_run_config(double q, const std::string& generator, const Overrides& o) {
  if (!(q > 1.0) || !std::isfinite(q)) throw UsageError("q must be > 1");
  const bool strong = q < 2.0;
  const double mass = o.mass.value_or(strong ? 500.0 : 1.0);
  InitialData data;
  if (generator == "gaussian") {
    data = Gaussian{mass, 1.0, 0.0};
  } else if (generator == "box") {
    data = Box{mass, 2.0, 0.0};
  } else {
    throw UsageError("unknown generator '" + generator + "' (gaussian | box)");
  }
  const double t_end = detail::positive(o.t_end, 100.0, "t_end");
  if (strong) {
    Grid1D g(-20.0, 40.0, detail::odd_nodes(o.n, 1201));
    RunConfig c{g, Nonlinearity::power_law(q, -1.0 / q), data};
    c.scheme = Scheme::UpwindExplicit;
    c.dt = detail::positive(o.dt, 0.2 * g.dx() * g.dx(), "dt");
    c.grow_dt_factor = 4.0;
    c.t_end = t_end;
    c.grow_domain = true;
    c.output.times = log_spaced(t_end / 1000.0, t_end, 31);
    return c;
  }
  Grid1D g(-10.0, 10.0, detail::odd_nodes(o.n, 401));
  RunConfig c{g, Nonlinearity::power_law(q, 1.0), data};
  c.dt = detail::positive(o.dt, 0.25 * g.dx(), "dt");
  c.grow_dt_factor = 2.0;
  c.t_end = t_end;
  c.grow_domain = true;
  c.output.times = log_spaced(t_end / 1000.0, t_end, 31);
  return c;
}

// Target exponent of ||u(t)||_p for data of one sign.
inline double decay_target(double q, Lp p) {
  const double one_minus = 1.0 - p.reciprocal();
  // + 0.0 turns -0 into 0 for p = 1.
  return (q < 2.0 ? -one_minus / q : -0.5 * one_minus) + 0.0;
}

inline diagnostics::DecayReport norm_decay_report(const Trajectory& traj, double q, Lp p) {
  double SeriesRow::*column = p.is_inf() ? &SeriesRow::linf : (p.value() == 1.0 ? &SeriesRow::l1 : &SeriesRow::l2);
  if (!p.is_inf() && p.value() != 1.0 && p.value() != 2.0) throw UsageError("p must be 1, 2 or inf");
  const double t_end = traj.series.back().t;
  return diagnostics::fit_decay(diagnostics::series_samples(traj, column), {t_end / 10.0, t_end}, decay_target(q, p),
                                0.1, "||u(t)||_p", p.label());
}

// ---------------------------------------------------------------------------
// Scenarios

inline ScenarioResult heat_asymptotics(const Overrides& o) {
  ScenarioResult r;
  r.scenario = "heat-asymptotics";
  r.anchor = {{"law", "heat-kernel asymptotics"},
              {"statement", "t^{(1/2)(1-1/p)} ||u(t) - M G(t)||_p -> 0; zero-mass data: ||G(t) * u0||_inf = O(t^{-1})"}};
  const std::size_t n_fine = o.n.value_or(4096);
  const double dt_fine = detail::positive(o.dt, 0.01, "dt");
  if (n_fine < 16) throw UsageError("--n must be >= 16");

  // Numerical heat solver against the exact kernel, data G(., 1) evolved by 1.
  auto heat_error = [&](std::size_t n, double dt, const std::string& label) {
    Grid1D g(-30.0, 30.0, n);
    RunConfig c{g, Nonlinearity::none(), Gaussian{}};
    c.initial_field = exact::heat_kernel_field(g, 1.0);
    c.t_end = 1.0;
    c.dt = dt;
    auto traj = run(c);
    r.mass("heat_oracle_" + label, traj);
    return lp_distance(traj.snapshots.back(), exact::heat_kernel_field(g, 2.0), Lp::inf());
  };
  const double e_coarse = heat_error(1025, 0.02, "n1025");
  const double e_fine = heat_error(2049, 0.01, "n2049");
  const double order = std::log2(e_coarse / e_fine);
  r.config["oracle"] = {{"domain", {-30.0, 30.0}}, {"pair", {{1025, 0.02}, {2049, 0.01}}}, {"n", n_fine}, {"dt", dt_fine}};
  r.le("oracle/order_low", 1.8, order);
  r.le("oracle/order_high", order, 2.2);
  r.lt("oracle/sup_error_n" + std::to_string(n_fine), heat_error(n_fine, dt_fine, "n" + std::to_string(n_fine)), 1e-5);

  // Mixed-sign data of mass 1 through the numerical heat solver.
  Grid1D g(-100.0, 100.0, 4001);
  Field u0 = linear_combination(1.0, make_initial(Gaussian{2.0, 1.0, 1.0}, g), 1.0,
                                make_initial(Gaussian{-1.0, 0.7, 2.0}, g));
  RunConfig c{g, Nonlinearity::none(), Gaussian{}};
  c.initial_field = u0;
  c.t_end = 64.0;
  c.dt = 0.05;
  c.output.times = {1.0, 4.0, 16.0, 64.0};
  r.config["run"] = describe(c);
  r.config["run"]["initial"] = "gaussian(mass=2, width=1, center=1) + gaussian(mass=-1, width=0.7, center=2)";
  auto traj = run(c);
  r.mass("mixed_sign", traj);
  diagnostics::RegimeSpec heat;
  heat.regime = diagnostics::Regime::Linear;
  for (Lp p : {Lp(1), Lp(2), Lp::inf()}) {
    auto curve = diagnostics::attractor_distance(traj, heat, p, {.fit_origin = false, .t0 = 0.0});
    std::vector<double> v;
    for (const auto& s : curve.samples) v.push_back(s.scaled);
    r.holds("mixed_sign/strictly_decreasing_p" + p.label(), detail::strictly_decreasing(v));
    r.lt("mixed_sign/final_over_initial_p" + p.label(), v.back() / v.front(), 0.15);
    r.plots.push_back(curve_plot("distance_mixed_sign_p" + p.label(), curve.samples));
  }
  r.trajectory = traj;

  // Zero-mass dipole through the exact convolution.
  Grid1D gd(-120.0, 120.0, 2401);
  Field d0 = make_initial(Dipole{1.0, 2.0}, gd);
  std::vector<diagnostics::Sample> sup;
  for (double t : log_spaced(10.0, 100.0, 11)) sup.push_back({t, lp_norm(exact::heat_solution(d0, t), Lp::inf())});
  r.config["dipole"] = {{"initial", "dipole(amplitude=1, separation=2)"}, {"grid", {-120.0, 120.0, 2401}}};
  r.report(diagnostics::fit_decay(sup, {10.0, 100.0}, -1.0, 0.1, "||G(t) * u0||_inf, zero mass", "inf"));
  r.plots.push_back(sample_plot("dipole_sup", "linf", sup));
  return r;
}

inline ScenarioResult linear_convection(const Overrides& o) {
  ScenarioResult r;
  r.scenario = "linear-convection";
  r.anchor = {{"law", "linear convection-diffusion asymptotics"},
              {"statement", "u_t - u_xx = a u_x: ||u(x,t) - M G(x + a t, t)||_p t^{(1/2)(1-1/p)} -> 0"}};
  const double a = 1.0;
  const double mass = o.mass.value_or(1.0);
  const double dt = detail::positive(o.dt, 0.01, "dt");

  // Fixed domain: oracle and drift removal.
  Grid1D g(-64.0, 64.0, 5121);
  RunConfig c{g, Nonlinearity::linear(a), Gaussian{mass, 1.0, 0.0}};
  c.t_end = 16.0;
  c.dt = dt;
  c.output.times = {1.0, 2.0, 4.0, 8.0, 16.0};
  r.config["oracle_run"] = describe(c);
  auto conv = run(c);
  r.mass("convected", conv);
  Field exact_end = exact::linear_convection_solution(conv.snapshots.front(), a, 16.0);
  r.lt("oracle/l1_error_t16", lp_distance(conv.snapshots.back(), exact_end, Lp(1)), 1e-4);

  RunConfig h = c;
  h.nonlinearity = Nonlinearity::none();
  auto heat = run(h);
  r.mass("heat", heat);
  auto shifted = diagnostics::drift_extract_and_shift(conv, c.nonlinearity);
  double worst = 0.0;
  for (std::size_t k = 0; k < heat.snapshots.size(); ++k) {
    worst = std::max(worst, lp_distance(shifted.snapshots[k], heat.snapshots[k], Lp(1)));
  }
  r.lt("drift/shifted_vs_heat_l1", worst, 1e-4);

  // Long run on a growing domain: distance to the transported heat kernel.
  Grid1D gw(-20.0, 20.0, detail::odd_nodes(o.n, 801));
  Field u0 = linear_combination(1.0, make_initial(Gaussian{mass, 1.0, 0.0}, gw), 1.0,
                                make_initial(Dipole{0.5, 2.0}, gw));
  RunConfig w{gw, Nonlinearity::linear(a), Gaussian{}};
  w.initial_field = u0;
  w.t_end = detail::positive(o.t_end, 256.0, "t_end");
  w.dt = 0.0125;
  w.grow_domain = true;
  w.grow_dt_factor = 2.0;
  w.output.times = log_spaced(1.0, w.t_end, 9);
  r.config["attractor_run"] = describe(w);
  r.config["attractor_run"]["initial"] = "gaussian(mass, 1, 0) + dipole(0.5, 2)";
  auto traj = run(w);
  r.mass("attractor", traj);
  auto spec = diagnostics::classify(w.nonlinearity);
  auto curve = diagnostics::attractor_distance(traj, spec, Lp(1));
  std::vector<double> v;
  for (const auto& s : curve.samples) v.push_back(s.scaled);
  r.holds("attractor/strictly_decreasing_p1", detail::strictly_decreasing(v));
  r.lt("attractor/final_over_initial_p1", v.back() / v.front(), 0.1);
  r.plots.push_back(curve_plot("distance_p1", curve.samples));
  r.trajectory = traj;
  return r;
}

inline ScenarioResult burgers_hopfcole(const Overrides& o) {
  ScenarioResult r;
  r.scenario = "burgers-hopfcole";
  r.anchor = {{"law", "Hopf-Cole linearization"},
              {"statement", "u_t - u_xx = (u^2)_x, w = exp(int u), w_t = w_xx, u = w_x / w"}};
  const std::size_t n = o.n.value_or(2048);
  if (n < 16) throw UsageError("--n must be >= 16");
  const double t_end = detail::positive(o.t_end, 10.0, "t_end");
  Grid1D g(-36.0, 36.0, n);
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{o.mass.value_or(1.0), 1.0, 0.0}};
  c.t_end = t_end;
  c.dt = detail::positive(o.dt, 0.01, "dt");
  c.output.times = t_end > 1.0 ? std::vector<double>{1.0, t_end} : std::vector<double>{t_end};
  r.config["run"] = describe(c);
  auto traj = run(c);
  r.mass("burgers", traj);
  const Field& u0 = traj.snapshots.front();
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const Field& u = traj.snapshots[k];
    const double t = u.time();
    const double err = lp_distance(u, exact::burgers_exact(u0, t), Lp(1));
    const double limit = t <= 1.0 ? 1e-4 : 1e-3;
    r.lt("oracle/l1_error_t" + real_key(t), err, limit);
    r.le("l1_not_increased_t" + real_key(t), lp_norm(u, Lp(1)), lp_norm(u0, Lp(1)) + 1e-8);
    r.plots.push_back(field_plot("u_t" + real_key(t), u));
  }
  r.trajectory = traj;
  return r;
}

inline ScenarioResult similarity_spectral(const Overrides& o) {
  ScenarioResult r;
  r.scenario = "similarity-spectral";
  r.anchor = {{"law", "spectrum of L = -d^2/dy^2 - (y/2) d/dy on L^2(K), K = exp(y^2/4)"},
              {"statement", "mu_l = (N + l - 1)/2; v(s) = sum_l exp(-(mu_l - N/2) s) alpha_l phi_l"}};
  spectral::WeightedBasis basis;
  const Grid1D& g = basis.grid();
  r.config["basis"] = {{"order", basis.order()}, {"grid", {g.x_min(), g.x_max(), g.size()}}};
  for (std::size_t l = 1; l <= 6; ++l) r.lt("eigen_residual/l" + std::to_string(l), spectral::eigen_residual(basis, l), 1e-4);
  auto gram = basis.gram();
  double off = 0.0;
  for (std::size_t a = 0; a < basis.order(); ++a) {
    for (std::size_t b = 0; b < basis.order(); ++b) {
      off = std::max(off, std::abs(gram[a * basis.order() + b] - (a == b ? 1.0 : 0.0)));
    }
  }
  r.lt("gram/max_deviation", off, 1e-8);
  // Basis elements whose |y|^2-weighted tail is not resolved on the grid are skipped.
  bool poincare = true;
  std::size_t resolved = 0;
  for (std::size_t l = 1; l <= basis.order(); ++l) {
    try {
      poincare = poincare && spectral::poincare_check(basis.phi(l)).holds();
      ++resolved;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DomainTooSmall) throw;
      break;
    }
  }
  r.holds("poincare/resolved_elements", poincare, "phi_1..phi_" + std::to_string(resolved) + " resolved on |y| <= 15");
  r.le("poincare/resolved_count", 6.0, static_cast<double>(resolved));

  const double dt = detail::positive(o.dt, 1e-3, "dt");
  // Linear similarity equation: timestepper against the exact spectral solution.
  Field f = detail::on_frame(make_initial(Gaussian{o.mass.value_or(1.0), 1.2, 0.3}, g), Frame::Similarity);
  RunConfig c{g, Nonlinearity::none(), Gaussian{}};
  c.initial_field = f;
  c.frame = Frame::Similarity;
  c.t_end = 5.0;
  c.dt = dt;
  c.output.times = {1.0, 5.0};
  r.config["equivalence_run"] = describe(c);
  r.config["equivalence_run"]["initial"] = "gaussian(mass, 1.2, 0.3)";
  auto traj = run(c);
  r.mass("equivalence", traj);
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const Field& v = traj.snapshots[k];
    r.lt("spectral_vs_solver/l1_s" + real_key(v.time()), lp_distance(v, spectral::spectral_solution(f, basis, v.time()), Lp(1)), 1e-5);
  }

  // Zero-mass data: ||v(s)||_K decays like exp(-s/2).
  Field z = detail::on_frame(make_initial(Dipole{1.0, 2.0}, g), Frame::Similarity);
  RunConfig zc = c;
  zc.initial_field = z;
  zc.t_end = 10.0;
  zc.dt = 0.01;
  zc.output.times.clear();
  zc.output.cadence = 50;
  r.config["zero_mass_run"] = describe(zc);
  r.config["zero_mass_run"]["initial"] = "dipole(amplitude=1, separation=2)";
  auto zt = run(zc);
  r.mass("zero_mass", zt);
  std::vector<diagnostics::Sample> kn;
  const double k0 = spectral::k_norm(zt.snapshots.front());
  bool bounded = true;
  for (const auto& v : zt.snapshots) {
    const double value = spectral::k_norm(v);
    kn.push_back({v.time(), value});
    bounded = bounded && value <= std::exp(-0.5 * v.time()) * k0 * (1.0 + 1e-6);
  }
  r.holds("zero_mass/k_norm_below_exp(-s/2)", bounded);
  r.report(diagnostics::fit_rate(kn, {1.0, 10.0}, 0.5, 0.1, "||v(s)||_K, zero mass"));
  r.plots.push_back(sample_plot("zero_mass_k_norm", "k_norm", kn));
  r.trajectory = zt;
  return r;
}

inline ScenarioResult decay_suite(const Overrides& o) {
  ScenarioResult r;
  r.scenario = "decay-suite";
  r.anchor = {{"law", "L^p decay and gradient decay"},
              {"statement", "||u(t)||_p <= C t^{-(1/2)(1-1/p)} (q >= 2), t^{-(1/q)(1-1/p)} (1 < q < 2); ||u_x(t)||_inf <= C t^{-1}"}};
  std::vector<double> qs = o.q ? std::vector<double>{*o.q} : std::vector<double>{2.0, 3.0};
  for (double q : qs) {
    RunConfig c = decay_run_config(q, "gaussian", o);
    const std::string tag = "q" + real_key(q);
    r.config[tag] = describe(c);
    auto traj = run(c);
    r.mass(tag, traj);
    bool l1_ok = true;
    for (std::size_t k = 1; k < traj.series.size(); ++k) l1_ok = l1_ok && traj.series[k].l1 <= traj.series[k - 1].l1 + 1e-8;
    r.holds(tag + "/l1_non_increasing", l1_ok);
    for (Lp p : {Lp(1), Lp(2), Lp::inf()}) r.report(norm_decay_report(traj, q, p));
    if (q == 2.0) {
      const double t_end = traj.series.back().t;
      r.report(diagnostics::fit_decay(diagnostics::series_samples(traj, &SeriesRow::grad_linf), {t_end / 10.0, t_end},
                                      -1.0, 0.15, "||u_x(t)||_inf", "inf"));
    }
    r.plots.push_back(sample_plot("sup_" + tag, "linf", diagnostics::series_samples(traj, &SeriesRow::linf)));
    if (!r.trajectory) r.trajectory = traj;
  }
  return r;
}

inline ScenarioResult weak_nonlinear(const Overrides& o) {
  ScenarioResult r;
  r.scenario = "weak-nonlinear";
  r.anchor = {{"law", "weakly nonlinear rate"},
              {"statement", "t^{(N/2)(1-1/p)} ||u(t) - M G(t)||_p <= C p(t); p(t) = t^{-(N(q-1)-1)/2} (1+1/N < q < 1+2/N), "
                            "t^{-1/2} log(t+2) (q = 1+2/N), t^{-1/2} (q > 1+2/N)"}};
  std::vector<double> qs = o.q ? std::vector<double>{*o.q} : std::vector<double>{2.5, 3.0, 4.0};
  const double t_end = detail::positive(o.t_end, 1000.0, "t_end");
  for (double q : qs) {
    if (!(q > 2.0)) throw UsageError("weak-nonlinear needs q > 2 (N = 1)");
    Grid1D g(-10.0, 10.0, detail::odd_nodes(o.n, 1001));
    RunConfig c{g, Nonlinearity::power_law(q, 1.0), HeatKernelData{o.mass.value_or(1.0), 0.05, 0.0}};
    c.dt = detail::positive(o.dt, 0.001, "dt");
    c.t_end = t_end;
    c.grow_domain = true;
    c.grow_dt_factor = 2.0;
    c.output.times = log_spaced(t_end / 10.0, t_end, 11);
    const std::string tag = "q" + real_key(q);
    r.config[tag] = describe(c);
    auto traj = run(c);
    r.mass(tag, traj);
    for (Lp p : {Lp(1), Lp(2), Lp::inf()}) {
      auto rep = diagnostics::weak_rate_check(traj, q, p, {t_end / 10.0, t_end});
      rep.quantity += " (q=" + real_key(q) + ")";
      r.plots.push_back(sample_plot("weak_" + tag + "_p" + p.label(), "scaled_distance", rep.samples));
      r.report(std::move(rep));
    }
    if (!r.trajectory) r.trajectory = traj;
  }
  return r;
}

inline ScenarioResult self_similar_critical(const Overrides& o) {
  ScenarioResult r;
  r.scenario = "self-similar-critical";
  r.anchor = {{"law", "critical self-similar asymptotics, q = 1 + 1/N"},
              {"statement", "t^{(1/2)(1-1/p)} ||u(t) - t^{-1/2} f_M(x/sqrt t)||_p -> 0; "
                            "f_M = (e^M - 1) h / ((e^M - 1) H + 1), f_M > 0 for M > 0, increasing in M"}};
  const double mass = o.mass.value_or(1.0);

  // Physical Burgers run against the closed-form self-similar solution. The
  // Gaussian is translated so its Hopf-Cole step is centered at the origin.
  Grid1D g(-10.0, 10.0, detail::odd_nodes(o.n, 1601));
  const double center = -exact::hopf_cole_center(make_initial(Gaussian{mass, 1.0, 0.0}, Grid1D(-30.0, 30.0, 6001)));
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{mass, 1.0, center}};
  c.dt = detail::positive(o.dt, 0.003125, "dt");
  c.t_end = detail::positive(o.t_end, 100.0, "t_end");
  c.grow_domain = true;
  c.grow_dt_factor = 2.0;
  c.output.times = log_spaced(1.0, c.t_end, 21);
  r.config["physical_run"] = describe(c);
  auto traj = run(c);
  r.mass("physical", traj);
  auto spec = diagnostics::classify(c.nonlinearity);
  for (Lp p : {Lp(1), Lp::inf()}) {
    auto curve = diagnostics::attractor_distance(traj, spec, p);
    std::vector<double> v;
    for (const auto& s : curve.samples) v.push_back(s.scaled);
    r.holds("attractor/strictly_decreasing_p" + p.label(), detail::strictly_decreasing(v));
    if (p == Lp(1)) r.lt("attractor/final_p1", v.back(), 1e-2);
    r.plots.push_back(curve_plot("distance_p" + p.label(), curve.samples));
    r.config["physical_run"]["t0_p" + p.label()] = curve.t0;
  }
  r.trajectory = traj;

  // Similarity-frame steady states against f_M.
  Grid1D gy(-15.0, 15.0, 3001);
  std::vector<double> masses{0.5, 1.0, 2.0};
  if (o.mass && std::find(masses.begin(), masses.end(), mass) == masses.end()) masses.push_back(mass);
  std::sort(masses.begin(), masses.end());
  std::vector<Field> steady, closed;
  for (double m : masses) {
    RunConfig s{gy, Nonlinearity::power_law(2.0, 1.0), Gaussian{m, 1.0, 0.0}};
    s.frame = Frame::Similarity;
    s.t_end = 25.0;
    s.dt = 0.004;
    const std::string tag = "M" + real_key(m);
    r.config["similarity_" + tag] = describe(s);
    auto st = run(s);
    r.mass("similarity_" + tag, st);
    Field f = exact::burgers_profile_field(m, gy);
    r.lt("steady_state/l1_" + tag, lp_distance(st.snapshots.back(), f, Lp(1)), 1e-4);
    steady.push_back(st.snapshots.back());
    closed.push_back(f);
    r.plots.push_back(field_plot("profile_" + tag, st.snapshots.back(), "v"));
  }
  auto positive = [](const Field& f) {
    for (double v : f.values()) {
      if (!(v > 0.0)) return false;
    }
    return true;
  };
  auto above = [](const Field& hi, const Field& lo) {
    for (std::size_t i = 0; i < hi.size(); ++i) {
      if (!(hi[i] > lo[i])) return false;
    }
    return true;
  };
  bool pos_closed = true, pos_steady = true, mono_closed = true, mono_steady = true;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    pos_closed = pos_closed && positive(closed[k]);
    // The Dirichlet end nodes of the steady states are zero by construction.
    Field interior(Grid1D(gy.node(1), gy.node(gy.size() - 2), gy.size() - 2),
                   std::vector<double>(steady[k].data().begin() + 1, steady[k].data().end() - 1));
    pos_steady = pos_steady && positive(interior);
    if (k > 0) {
      mono_closed = mono_closed && above(closed[k], closed[k - 1]);
      Field prev(interior.grid(), std::vector<double>(steady[k - 1].data().begin() + 1, steady[k - 1].data().end() - 1));
      mono_steady = mono_steady && above(interior, prev);
    }
  }
  r.holds("profiles/closed_form_positive", pos_closed);
  r.holds("profiles/steady_state_positive", pos_steady);
  r.holds("profiles/closed_form_increasing_in_M", mono_closed);
  r.holds("profiles/steady_state_increasing_in_M", mono_steady);
  return r;
}

inline ScenarioResult nwave_strong(const Overrides& o) {
  ScenarioResult r;
  r.scenario = "nwave-strong";
  r.anchor = {{"law", "strongly nonlinear N-wave asymptotics, 1 < q < 2, N = 1"},
              {"statement", "t^{(1/q)(1-1/p)} ||u(t) - u_M(t)||_p -> 0; (u^{q-1})_x <= 1/t; "
                            "0 <= u <= (q M / ((q-1) t))^{1/q}"}};
  const double q = o.q.value_or(1.5);
  if (!(q > 1.0 && q < 2.0)) throw UsageError("nwave-strong needs 1 < q < 2");
  const double a = -1.0 / q;
  const double mass = detail::positive(o.mass, 500.0, "mass");
  const double t_end = detail::positive(o.t_end, 200.0, "t_end");
  const std::size_t n = detail::odd_nodes(o.n, 1201);

  auto config = [&](std::size_t nodes) {
    Grid1D g(-20.0, 40.0, nodes);
    RunConfig c{g, Nonlinearity::power_law(q, a), Gaussian{mass, 1.0, 0.0}};
    c.scheme = Scheme::UpwindExplicit;
    c.dt = 0.2 * g.dx() * g.dx();
    c.t_end = t_end;
    c.grow_domain = true;
    c.grow_dt_factor = 4.0;
    c.output.times = log_spaced(1.0, t_end, 31);
    return c;
  };
  RunConfig coarse = config(n);
  RunConfig fine = config(2 * n - 1);
  r.config["coarse"] = describe(coarse);
  r.config["fine"] = describe(fine);
  auto tc = run(coarse);
  auto tf = run(fine);
  r.mass("coarse", tc);
  r.mass("fine", tf);

  r.report(diagnostics::fit_decay(diagnostics::series_samples(tc, &SeriesRow::linf), {t_end / 10.0, t_end}, -1.0 / q, 0.1,
                                  "||u(t)||_inf", "inf"));

  auto excess = [&](const Trajectory& t) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& u : t.snapshots) {
      if (u.time() >= 1.0) worst = std::max(worst, diagnostics::entropy_excess(u, q));
    }
    return worst;
  };
  const double ex_c = excess(tc), ex_f = excess(tf);
  const double eps_c = std::max(0.0, ex_c), eps_f = std::max(0.0, ex_f);
  r.config["entropy"] = {{"signed_excess_coarse", ex_c}, {"signed_excess_fine", ex_f}};
  r.le("entropy/eps_fine_over_half_eps_coarse", eps_f, 0.5 * eps_c,
       eps_c == 0.0 ? "max (u^{q-1})_x - 1/t is negative at both resolutions; eps_grid = 0" : "");

  double worst_ratio = 0.0;
  for (const auto& u : tc.snapshots) {
    if (u.time() < 1.0) continue;
    const double ratio = lp_norm(u, Lp::inf()) / diagnostics::nwave_sup_bound(q, a, mass, u.time());
    worst_ratio = std::max(worst_ratio, ratio);
  }
  r.le("sup_bound/max_ratio", worst_ratio, 1.02);

  auto spec = diagnostics::classify(coarse.nonlinearity);
  auto curve = diagnostics::attractor_distance(tc, spec, Lp(1), {.fit_origin = false, .t0 = 0.0, .t_first = 1.0});
  std::vector<double> v;
  for (const auto& s : curve.samples) v.push_back(s.scaled);
  r.holds("attractor/strictly_decreasing_p1", detail::strictly_decreasing(v));
  r.lt("attractor/final_over_initial_p1", v.back() / v.front(), 0.3);
  r.config["coarse"]["t0"] = curve.t0;
  r.plots.push_back(curve_plot("distance_p1", curve.samples));
  r.plots.push_back(sample_plot("sup", "linf", diagnostics::series_samples(tc, &SeriesRow::linf)));
  r.trajectory = tc;
  return r;
}

inline ScenarioResult contraction_suite(const Overrides& o) {
  ScenarioResult r;
  r.scenario = "contraction-suite";
  r.anchor = {{"law", "L^1 contraction and comparison"},
              {"statement", "||u(t) - v(t)||_1 <= ||u0 - v0||_1; strictly decreasing in s for distinct data of equal mass"}};
  const double q = o.q.value_or(2.0);
  Grid1D g(-20.0, 20.0, o.n.value_or(801));
  RunConfig c{g, Nonlinearity::power_law(q, 1.0), Gaussian{}};
  c.dt = detail::positive(o.dt, g.dx() * g.dx(), "dt");
  c.t_end = detail::positive(o.t_end, 5.0, "t_end");
  r.config["physical"] = describe(c);

  auto non_increasing = [](const std::vector<ContractionSample>& s) {
    for (std::size_t k = 1; k < s.size(); ++k) {
      if (s[k].distance > s[k - 1].distance + 1e-8) return false;
    }
    return true;
  };
  auto to_plot = [](const std::string& name, const std::vector<ContractionSample>& s) {
    Plot p{name, {"t", "l1_distance"}, {{}, {}}};
    for (std::size_t k = 0; k < s.size(); k += std::max<std::size_t>(1, s.size() / 400)) {
      p.columns[0].push_back(s[k].t);
      p.columns[1].push_back(s[k].distance);
    }
    return p;
  };

  // Ordered pair: the distance is the mass difference.
  auto ordered = contraction_pair(c, make_initial(Gaussian{2.0, 1.0, 0.0}, g), make_initial(Gaussian{1.0, 1.0, 0.0}, g));
  r.holds("ordered/non_increasing", non_increasing(ordered));
  double spread = 0.0;
  for (const auto& s : ordered) spread = std::max(spread, std::abs(s.distance - ordered.front().distance));
  r.le("ordered/constant", spread, 1e-8);
  r.plots.push_back(to_plot("ordered", ordered));

  auto mixed = contraction_pair(c, make_initial(Gaussian{1.0, 1.0, -2.0}, g), make_initial(Box{0.5, 3.0, 1.0}, g));
  r.holds("mixed/non_increasing", non_increasing(mixed));
  r.plots.push_back(to_plot("mixed", mixed));

  // Equal mass, distinct data, similarity frame (q = 2).
  Grid1D gy(-15.0, 15.0, 1501);
  RunConfig s{gy, Nonlinearity::power_law(2.0, 1.0), Gaussian{}};
  s.frame = Frame::Similarity;
  s.dt = gy.dx() * gy.dx();
  s.t_end = 2.0;
  r.config["similarity"] = describe(s);
  auto equal = contraction_pair(s, detail::on_frame(make_initial(Gaussian{1.0, 1.0, 0.0}, gy), Frame::Similarity),
                                detail::on_frame(make_initial(Box{1.0, 2.0, 0.0}, gy), Frame::Similarity));
  r.holds("equal_mass/non_increasing", non_increasing(equal));
  bool strict = true;
  for (std::size_t k = 10; k < equal.size(); ++k) strict = strict && equal[k].distance < equal[k - 10].distance;
  r.holds("equal_mass/strict_over_10_steps", strict);
  r.plots.push_back(to_plot("equal_mass", equal));
  return r;
}

using ScenarioFn = std::function<ScenarioResult(const Overrides&)>;

inline const std::map<std::string, ScenarioFn>& scenarios() {
  static const std::map<std::string, ScenarioFn> table{
      {"heat-asymptotics", heat_asymptotics},       {"linear-convection", linear_convection},
      {"burgers-hopfcole", burgers_hopfcole},       {"similarity-spectral", similarity_spectral},
      {"decay-suite", decay_suite},                 {"weak-nonlinear", weak_nonlinear},
      {"self-similar-critical", self_similar_critical}, {"nwave-strong", nwave_strong},
      {"contraction-suite", contraction_suite}};
  return table;
}

inline ScenarioResult run_scenario(const std::string& name, const Overrides& o) {
  auto it = scenarios().find(name);
  if (it == scenarios().end()) throw UsageError("unknown scenario '" + name + "'");
  return it->second(o);
}

}  // namespace cdasym::cli
