#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cdasym/error.hpp"
#include "cdasym/exact.hpp"
#include "cdasym/grid.hpp"
#include "cdasym/nonlinearity.hpp"
#include "cdasym/quadrature.hpp"
#include "cdasym/solver.hpp"

namespace cdasym::diagnostics {

// ---------------------------------------------------------------------------
// Frame changes

// v(y) = sqrt(t+1) u(sqrt(t+1) y), s = log(t+1), on the natural grid
// y_i = x_i / sqrt(t+1). No interpolation is involved, so the trapezoid mass
// is unchanged.
inline Field to_similarity(const Field& u) {
  if (u.frame() != Frame::Physical) throw Error(ErrorKind::InvalidConfig, "to_similarity needs a physical field");
  const double t = u.time();
  if (!(t >= 0.0)) throw Error(ErrorKind::NonPositiveTime, "to_similarity needs t >= 0");
  const double r = std::sqrt(t + 1.0);
  const Grid1D& g = u.grid();
  Grid1D yg(g.x_min() / r, g.x_max() / r, g.size());
  std::vector<double> v(u.data());
  for (double& x : v) x *= r;
  return Field(yg, std::move(v), std::log1p(t), Frame::Similarity);
}

// Same map sampled onto `target` by linear interpolation.
inline Field to_similarity(const Field& u, const Grid1D& target) {
  Field natural = to_similarity(u);
  const Grid1D& g = natural.grid();
  if (target.x_min() < g.x_min() - 1e-12 * g.length() || target.x_max() > g.x_max() + 1e-12 * g.length()) {
    throw Error(ErrorKind::DomainTooSmall, "similarity grid needs x beyond the physical domain");
  }
  return resample(natural, target);
}

// Inverse of to_similarity: t = e^s - 1, x_i = sqrt(t+1) y_i.
inline Field from_similarity(const Field& v) {
  if (v.frame() != Frame::Similarity) throw Error(ErrorKind::InvalidConfig, "from_similarity needs a similarity field");
  const double s = v.time();
  const double r = std::exp(0.5 * s);
  const Grid1D& g = v.grid();
  Grid1D xg(g.x_min() * r, g.x_max() * r, g.size());
  std::vector<double> u(v.data());
  for (double& x : u) x /= r;
  return Field(xg, std::move(u), std::expm1(s), Frame::Physical);
}

inline Field from_similarity(const Field& v, const Grid1D& target) {
  Field natural = from_similarity(v);
  const Grid1D& g = natural.grid();
  if (target.x_min() < g.x_min() - 1e-12 * g.length() || target.x_max() > g.x_max() + 1e-12 * g.length()) {
    throw Error(ErrorKind::DomainTooSmall, "physical grid extends beyond the similarity domain");
  }
  return resample(natural, target);
}

// u_lambda(x) = lambda^alpha u(lambda^beta x), linear interpolation, zero
// outside the grid. The time label is divided by lambda^{2 beta}.
//   alpha = beta = 1 (N = 1): mass-preserving scaling.
//   alpha = 1/(q-1), beta = 1: invariance of u_t - u_xx = a (|u|^{q-1}u)_x.
inline Field rescale(const Field& u, double lambda, double alpha, double beta) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidConfig, "rescale needs lambda > 0");
  const double amp = std::pow(lambda, alpha);
  const double stretch = std::pow(lambda, beta);
  Field out = Field::sample(u.grid(), [&](double x) { return amp * interpolate(u, stretch * x); },
                            u.time() / (stretch * stretch), u.frame());
  return out;
}

// ---------------------------------------------------------------------------
// Decay fits

struct Sample {
  double t = 0.0;
  double value = 0.0;
};

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

enum class FitAxis { LogLog, LogLinear };

struct DecayReport {
  std::string quantity;
  std::string p;
  double fitted_slope = 0.0;
  double target_slope = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.1;
  double residual = 0.0;
  Window window;
  bool pass = false;
  FitAxis axis = FitAxis::LogLog;
  std::string note;
  std::vector<Sample> samples;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["quantity"] = quantity;
    j["p"] = p;
    j["fitted_slope"] = fitted_slope;
    j["target_slope"] = target_slope;
    j["rel_error"] = rel_error;
    j["tolerance"] = tolerance;
    j["residual"] = residual;
    j["window"] = {window.lo, window.hi};
    j["verdict"] = pass ? "pass" : "fail";
    j["n_samples"] = samples.size();
    j["axis"] = axis == FitAxis::LogLog ? "log-log" : "log-linear";
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::InvalidSamples, "fit abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

inline std::vector<Sample> in_window(const std::vector<Sample>& samples, Window w) {
  std::vector<Sample> out;
  const double slack = 1e-9;
  for (const auto& s : samples) {
    if (s.t >= w.lo * (1.0 - slack) && s.t <= w.hi * (1.0 + slack)) out.push_back(s);
  }
  return out;
}

inline void finish(DecayReport& r) {
  r.rel_error = r.target_slope != 0.0 ? std::abs(r.fitted_slope - r.target_slope) / std::abs(r.target_slope)
                                      : std::abs(r.fitted_slope);
  r.pass = r.rel_error <= r.tolerance;
}

}  // namespace detail

// Least-squares slope of log(value) against log(t) over the window. The
// window must span a decade and hold at least five samples. With a zero
// target the tolerance is absolute.
inline DecayReport fit_decay(const std::vector<Sample>& samples, Window window, double target, double tolerance = 0.1,
                             std::string quantity = "value", std::string p = "") {
  if (!(window.lo > 0.0) || !(window.hi >= 10.0 * window.lo * (1.0 - 1e-9))) {
    throw Error(ErrorKind::InvalidSamples, "fit window must have t > 0 and span at least one decade");
  }
  auto in = detail::in_window(samples, window);
  if (in.size() < 5) throw Error(ErrorKind::InvalidSamples, "fit needs at least 5 samples in the window");
  std::vector<double> x, y;
  for (const auto& s : in) {
    if (!(s.value > 0.0) || !std::isfinite(s.value)) throw Error(ErrorKind::InvalidSamples, "fit values must be > 0");
    x.push_back(std::log(s.t));
    y.push_back(std::log(s.value));
  }
  auto fit = detail::least_squares(x, y);
  DecayReport r;
  r.quantity = std::move(quantity);
  r.p = std::move(p);
  r.fitted_slope = fit.slope;
  r.target_slope = target;
  r.tolerance = tolerance;
  r.residual = fit.residual;
  r.window = window;
  r.samples = std::move(in);
  detail::finish(r);
  return r;
}

// Exponential rate: least-squares slope of log(value) against s, reported as
// the rate -slope.
inline DecayReport fit_rate(const std::vector<Sample>& samples, Window window, double target_rate,
                            double tolerance = 0.1, std::string quantity = "value") {
  if (!(window.hi > window.lo)) throw Error(ErrorKind::InvalidSamples, "empty fit window");
  auto in = detail::in_window(samples, window);
  if (in.size() < 5) throw Error(ErrorKind::InvalidSamples, "fit needs at least 5 samples in the window");
  std::vector<double> x, y;
  for (const auto& s : in) {
    if (!(s.value > 0.0) || !std::isfinite(s.value)) throw Error(ErrorKind::InvalidSamples, "fit values must be > 0");
    x.push_back(s.t);
    y.push_back(std::log(s.value));
  }
  auto fit = detail::least_squares(x, y);
  DecayReport r;
  r.quantity = std::move(quantity);
  r.fitted_slope = -fit.slope;
  r.target_slope = target_rate;
  r.tolerance = tolerance;
  r.residual = fit.residual;
  r.window = window;
  r.axis = FitAxis::LogLinear;
  r.samples = std::move(in);
  detail::finish(r);
  return r;
}

// Samples of one series column over a trajectory (t > 0 only).
inline std::vector<Sample> series_samples(const Trajectory& traj, double SeriesRow::*column) {
  std::vector<Sample> out;
  for (const auto& row : traj.series) {
    if (row.t > 0.0) out.push_back({row.t, row.*column});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regimes

enum class Regime { Linear, StronglyNonlinear, SelfSimilar, WeaklyNonlinear };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Linear: return "linear";
    case Regime::StronglyNonlinear: return "strongly_nonlinear";
    case Regime::SelfSimilar: return "self_similar";
    case Regime::WeaklyNonlinear: return "weakly_nonlinear";
  }
  return "?";
}

struct RegimeSpec {
  double q = 1.0;
  int dimension = 1;
  Regime regime = Regime::Linear;
  // Leading coefficient of the flux after drift removal: flux ~ a |u|^{q-1} u.
  double a = 0.0;
  // Drift removed before classification (x -> x - drift t).
  double drift = 0.0;
  // Set when q and a were estimated numerically (Custom nonlinearities).
  bool estimated = false;
  std::string note;

  // Attractor u_M(x, t) of mass M in the drift-free frame.
  double attractor(double mass, double x, double t) const {
    switch (regime) {
      case Regime::Linear:
      case Regime::WeaklyNonlinear: return mass * exact::heat_kernel(std::abs(x), t);
      case Regime::SelfSimilar: {
        // a |u| u equals (a sign M) u^2 on solutions of one sign.
        const double a_eff = mass >= 0.0 ? a : -a;
        return exact::burgers_self_similar(mass, x, t, a_eff);
      }
      case Regime::StronglyNonlinear: return exact::nwave_general(q, a, mass, x, t);
    }
    return 0.0;
  }

  // gamma(p) of the scaled distance t^gamma ||u - u_M||_p.
  double gamma(Lp p) const {
    const double one_minus = 1.0 - p.reciprocal();
    if (regime == Regime::StronglyNonlinear) return one_minus / q;
    return 0.5 * dimension * one_minus;
  }
};

// Exact comparison of q against 1 + 1/N.
inline Regime classify(double q, int dimension = 1) {
  if (dimension < 1) throw Error(ErrorKind::InvalidConfig, "dimension must be >= 1");
  if (!(q >= 1.0)) throw Error(ErrorKind::InvalidExponent, "regimes need q >= 1");
  const double critical = 1.0 + 1.0 / dimension;
  if (q == 1.0) return Regime::Linear;
  if (q < critical) return Regime::StronglyNonlinear;
  if (q == critical) return Regime::SelfSimilar;
  return Regime::WeaklyNonlinear;
}

// Small-s behaviour of a flux h with h(0) = h'(0) = 0: h(s) ~ a |s|^{q-1} s.
// Estimated from s = 1e-3 and 2e-3; exponents within 1e-3 of a regime
// boundary snap to it.
inline std::pair<double, double> estimate_exponent(const std::function<double(double)>& h, int dimension = 1) {
  const double s1 = 1e-3, s2 = 2e-3;
  const double h1 = std::abs(h(s1)), h2 = std::abs(h(s2));
  if (h1 == 0.0 || h2 == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
  double q = std::log(h2 / h1) / std::log(s2 / s1);
  for (double anchor : {1.0 + 1.0 / dimension, 1.0 + 2.0 / dimension, 2.0, 3.0}) {
    if (std::abs(q - anchor) < 1e-3) q = anchor;
  }
  const double a = h(s1) / std::pow(s1, q);
  return {q, a};
}

inline RegimeSpec classify(const Nonlinearity& nl, int dimension = 1) {
  RegimeSpec r;
  r.dimension = dimension;
  r.drift = nl.drift();
  switch (nl.kind()) {
    case Nonlinearity::Kind::Linear:
      r.q = 1.0;
      r.a = nl.a();
      r.drift = nl.a();
      r.regime = Regime::Linear;
      return r;
    case Nonlinearity::Kind::PowerLaw:
      r.q = nl.q();
      r.a = nl.a();
      r.regime = classify(r.q, dimension);
      return r;
    case Nonlinearity::Kind::Custom: {
      Nonlinearity h = nl.without_drift();
      auto [q, a] = estimate_exponent([&](double s) { return h.flux(s); }, dimension);
      r.estimated = true;
      if (!std::isfinite(q) || q > 50.0) {
        r.q = std::numeric_limits<double>::infinity();
        r.regime = Regime::WeaklyNonlinear;
        r.note = "flux vanishes faster than any tested power at 0; classified weakly nonlinear";
        return r;
      }
      r.q = q;
      r.a = a;
      r.regime = classify(std::max(q, 1.0), dimension);
      r.note = "q and a estimated from the flux near 0";
      return r;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Attractor distance

struct DistanceSample {
  double t = 0.0;
  double distance = 0.0;
  double scaled = 0.0;
};

inline Field attractor_field(const RegimeSpec& regime, double mass, const Grid1D& grid, double t) {
  exact::require_positive_time(t, "attractor_field");
  const double shift = regime.regime == Regime::Linear ? regime.a * t : 0.0;
  return Field::sample(grid, [&](double x) { return regime.attractor(mass, x + shift, t); }, t);
}

// Time origin t0 minimizing ||u(t1) - u_M(t1 + t0)||_2, found by golden-section
// search over log(t1 + t0).
inline double fit_time_origin(const Field& u, const RegimeSpec& regime, double mass) {
  const double t1 = u.time();
  exact::require_positive_time(t1, "fit_time_origin");
  // Transport stays at the true time; only the spreading is shifted.
  const double shift = regime.regime == Regime::Linear ? regime.a * t1 : 0.0;
  auto cost = [&](double log_tau) {
    const double tau = std::exp(log_tau);
    Field a = Field::sample(u.grid(), [&](double x) { return regime.attractor(mass, x + shift, tau); });
    return lp_distance(u, a, Lp(2));
  };
  double lo = std::log(1e-3 * t1), hi = std::log(10.0 * t1 + 10.0);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = cost(c), fd = cost(d);
  for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = cost(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = cost(d);
    }
  }
  return std::exp(0.5 * (lo + hi)) - t1;
}

struct DistanceOptions {
  bool fit_origin = true;
  // Fixed origin used when fit_origin is false.
  double t0 = 0.0;
  // Comparisons start at the first snapshot with t >= t_first.
  double t_first = 0.0;
};

struct DistanceCurve {
  double mass = 0.0;
  double t0 = 0.0;
  std::vector<DistanceSample> samples;
};

// t^gamma(p) ||u(t) - u_M(t + t0)||_p for every snapshot past t_first.
inline DistanceCurve attractor_distance(const Trajectory& traj, const RegimeSpec& regime, Lp p,
                                        DistanceOptions opts = {}) {
  if (traj.snapshots.empty()) throw Error(ErrorKind::InvalidRegime, "empty trajectory");
  DistanceCurve curve;
  curve.mass = traj.initial_mass;
  for (const auto& u : traj.snapshots) {
    if (u.frame() != Frame::Physical) throw Error(ErrorKind::InvalidRegime, "attractor distance needs physical snapshots");
    if (std::abs(trapezoid_integral(u) - curve.mass) > 1e-6 * (1.0 + std::abs(curve.mass))) {
      throw Error(ErrorKind::InvalidRegime, "trajectory mass is not constant");
    }
  }
  if (regime.regime == Regime::StronglyNonlinear) {
    if (!(curve.mass > 0.0)) throw Error(ErrorKind::InvalidRegime, "N-wave attractor needs positive mass");
    for (const auto& u : traj.snapshots) {
      for (double v : u.values()) {
        if (v < -1e-10) throw Error(ErrorKind::InvalidRegime, "N-wave attractor needs nonnegative data");
      }
    }
  }
  if (regime.regime == Regime::SelfSimilar && regime.dimension != 1) {
    throw Error(ErrorKind::InvalidRegime, "closed-form profiles exist only for N = 1");
  }
  bool first = true;
  for (const auto& u : traj.snapshots) {
    const double t = u.time();
    if (!(t > 0.0) || t < opts.t_first) continue;
    if (first) {
      curve.t0 = opts.fit_origin ? fit_time_origin(u, regime, curve.mass) : opts.t0;
      first = false;
    }
    const double shift = regime.regime == Regime::Linear ? regime.a * t : 0.0;
    Field a = Field::sample(u.grid(), [&](double x) { return regime.attractor(curve.mass, x + shift, t + curve.t0); }, t);
    const double d = lp_distance(u, a, p);
    curve.samples.push_back({t, d, std::pow(t, regime.gamma(p)) * d});
  }
  if (curve.samples.empty()) throw Error(ErrorKind::InvalidRegime, "no snapshots past t_first");
  return curve;
}

// Non-increasing within `slack` relative per step over [t_last / 10, t_last].
inline bool non_increasing_last_decade(const std::vector<DistanceSample>& s, double slack = 0.02) {
  if (s.empty()) return false;
  const double lo = s.back().t / 10.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k - 1].t < lo * (1.0 - 1e-12)) continue;
    if (s[k].scaled > s[k - 1].scaled * (1.0 + slack)) return false;
  }
  return true;
}

inline bool strictly_decreasing(const std::vector<DistanceSample>& s) {
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (!(s[k].scaled < s[k - 1].scaled)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Weakly nonlinear rate

struct WeakTarget {
  double slope = -0.5;
  double tolerance = 0.15;
  bool log_corrected = false;
};

// Decay exponent of t^{(N/2)(1-1/p)} ||u - M G||_p for q > 1 + 1/N.
inline WeakTarget weak_target(double q, int dimension = 1) {
  const double n = dimension;
  if (!(q > 1.0 + 1.0 / n)) throw Error(ErrorKind::InvalidRegime, "weak rate needs q > 1 + 1/N");
  const double two = 1.0 + 2.0 / n;
  if (q > two) return {-0.5, 0.15, false};
  if (q == two) return {-0.5, 0.20, true};
  return {-(n * (q - 1.0) - 1.0) / 2.0, 0.15, false};
}

// Fits the decay of the scaled distance to M G(t + t0) over `window`. In the
// borderline case q = 1 + 2/N the samples are divided by log(t + 2) before
// fitting.
inline DecayReport weak_rate_check(const Trajectory& traj, double q, Lp p, Window window, int dimension = 1,
                                   DistanceOptions opts = {}) {
  const WeakTarget target = weak_target(q, dimension);
  RegimeSpec regime;
  regime.q = q;
  regime.dimension = dimension;
  regime.regime = Regime::WeaklyNonlinear;
  if (opts.t_first == 0.0) opts.t_first = window.lo;
  auto curve = attractor_distance(traj, regime, p, opts);
  std::vector<Sample> samples;
  for (const auto& s : curve.samples) {
    samples.push_back({s.t, target.log_corrected ? s.scaled / std::log(s.t + 2.0) : s.scaled});
  }
  auto r = fit_decay(samples, window, target.slope, target.tolerance, "scaled distance to M G", p.label());
  if (target.log_corrected) r.note = "borderline q = 1 + 2/N: samples divided by log(t + 2)";
  return r;
}

// ---------------------------------------------------------------------------
// Drift

// v(x, t) = u(x - drift t, t) for every snapshot, on the same grids.
inline Trajectory drift_extract_and_shift(const Trajectory& traj, const Nonlinearity& nl) {
  const double b = nl.drift();
  if (!std::isfinite(b)) throw Error(ErrorKind::InvalidConfig, "non-finite drift");
  if (b == 0.0) return traj;
  Trajectory out = traj;
  out.snapshots.clear();
  out.series.clear();
  for (const auto& u : traj.snapshots) {
    const double shift = b * u.time();
    const Grid1D& g = u.grid();
    const double peak = lp_norm(u, Lp::inf());
    // Mass carried outside the shifted window would be lost.
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.node(i) + shift;
      if ((x < g.x_min() || x > g.x_max()) && std::abs(u[i]) > 1e-10 * peak) {
        throw Error(ErrorKind::DomainTooSmall, "drift shift moves the solution off the grid");
      }
    }
    Field v = Field::sample(g, [&](double x) { return interpolate(u, x - shift); }, u.time(), u.frame());
    out.snapshots.push_back(v);
    out.series.push_back(measure(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strong regime monitors

// max_i d/dx (u^{q-1}) - 1/t for nonnegative u (negative samples are clipped).
inline double entropy_excess(const Field& u, double q) {
  exact::require_positive_time(u.time(), "entropy_excess");
  const std::size_t n = u.size();
  const double dx = u.grid().dx();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(std::max(u[i], 0.0), q - 1.0);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) m = std::max(m, (w[i + 1] - w[i]) / dx);
  return m - 1.0 / u.time();
}

// Sup norm of the N-wave of mass M for u_t = a (|u|^{q-1}u)_x: with
// lambda = (q|a|)^{-1/(q-1)}, lambda (q (M/lambda) / ((q-1) t))^{1/q}.
inline double nwave_sup_bound(double q, double a, double mass, double t) {
  exact::require_positive_time(t, "nwave_sup_bound");
  const double lambda = std::pow(1.0 / (q * std::abs(a)), 1.0 / (q - 1.0));
  return lambda * exact::NWave(q, mass / lambda).sup(t);
}

}  // namespace cdasym::diagnostics
