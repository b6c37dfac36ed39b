#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "cdasym/error.hpp"
#include "cdasym/grid.hpp"
#include "cdasym/quadrature.hpp"

namespace cdasym::exact {

inline void require_positive_time(double t, const char* where) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::NonPositiveTime, std::string(where) + " needs t > 0");
}

// (4 pi t)^{-N/2} exp(-|x|^2 / (4t)); `r` is |x|.
inline double heat_kernel(double r, double t, int dimension = 1) {
  require_positive_time(t, "heat_kernel");
  if (dimension < 1) throw Error(ErrorKind::InvalidConfig, "dimension must be >= 1");
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * dimension) * std::exp(-r * r / (4.0 * t));
}

inline Field heat_kernel_field(const Grid1D& grid, double t, double mass = 1.0, double center = 0.0) {
  require_positive_time(t, "heat_kernel_field");
  const double norm = mass / std::sqrt(4.0 * std::numbers::pi * t);
  return Field::sample(grid, [&](double x) { return norm * std::exp(-(x - center) * (x - center) / (4.0 * t)); }, t);
}

// Gaussian cumulative H(x) = int_{-inf}^x (4 pi)^{-1/2} exp(-s^2/4) ds.
inline double gaussian_cdf(double x) { return 0.5 * std::erfc(-0.5 * x); }

// Beyond |x - y| > kHeatCutoff * sqrt(t) the kernel is below 1e-31 * G(0, t).
inline constexpr double kHeatCutoff = 17.0;

// Limits of the data beyond the grid ends. The data is treated as these
// constants outside [x_min, x_max]; L^1 data uses zeros.
struct FarField {
  double left = 0.0;
  double right = 0.0;
};

namespace detail {

// Trapezoid convolution (G(t) * u)(x) for arbitrary evaluation points, with
// u taken as zero off the grid. The kernel is normalized by its lattice sum so
// discrete mass is conserved exactly on grid-aligned evaluation.
inline std::vector<double> convolve_decaying(const Grid1D& grid, std::span<const double> u, double t,
                                             std::span<const double> x_eval) {
  const double dx = grid.dx();
  const double cut = kHeatCutoff * std::sqrt(t);
  const auto reach = static_cast<long>(std::ceil(cut / dx));
  const double inv4t = 1.0 / (4.0 * t);

  double lattice_sum = 0.0;
  for (long k = -reach; k <= reach; ++k) {
    double r = static_cast<double>(k) * dx;
    lattice_sum += std::exp(-r * r * inv4t);
  }
  const double scale = 1.0 / lattice_sum;  // replaces dx * (4 pi t)^{-1/2}

  const long n = static_cast<long>(grid.size());
  std::vector<double> out(x_eval.size(), 0.0);
  for (std::size_t i = 0; i < x_eval.size(); ++i) {
    const double x = x_eval[i];
    long lo = static_cast<long>(std::ceil((x - cut - grid.x_min()) / dx));
    long hi = static_cast<long>(std::floor((x + cut - grid.x_min()) / dx));
    lo = std::max(lo, 0L);
    hi = std::min(hi, n - 1);
    double s = 0.0;
    for (long j = lo; j <= hi; ++j) {
      double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      double r = x - grid.node(static_cast<std::size_t>(j));
      s += w * u[static_cast<std::size_t>(j)] * std::exp(-r * r * inv4t);
    }
    out[i] = s * scale;
  }
  return out;
}

// G(t) * u for data with constant far-field limits. A smooth reference step
// carries the jump between the limits exactly; the decaying remainder is
// convolved by quadrature.
inline std::vector<double> convolve(const Grid1D& grid, std::span<const double> u, double t,
                                    std::span<const double> x_eval, FarField far) {
  if (far.left == 0.0 && far.right == 0.0) return convolve_decaying(grid, u, t, x_eval);
  const double center = 0.5 * (grid.x_min() + grid.x_max());
  const double width = std::min(1.0, grid.length() / 40.0);
  const double tau = width * width;
  const double jump = far.right - far.left;
  auto step = [&](double x, double time) { return 0.5 * std::erfc(-(x - center) / (2.0 * std::sqrt(time))); };

  std::vector<double> remainder(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) remainder[j] = u[j] - far.left - jump * step(grid.node(j), tau);
  std::vector<double> out = convolve_decaying(grid, remainder, t, x_eval);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += far.left + jump * step(x_eval[i], t + tau);
  return out;
}

}  // namespace detail

// u(t) = G(t) * u0 by direct quadrature.
inline Field heat_solution(const Field& u0, double t, FarField far = {}) {
  require_positive_time(t, "heat_solution");
  require_finite(u0, "heat_solution");
  std::vector<double> x = u0.grid().nodes();
  auto w = detail::convolve(u0.grid(), u0.values(), t, x, far);
  return Field(u0.grid(), std::move(w), u0.time() + t, u0.frame());
}

// Solution of u_t - u_xx = a u_x: [G(t) * u0](x + a t), evaluated directly at
// the shifted points.
inline Field linear_convection_solution(const Field& u0, double a, double t) {
  require_positive_time(t, "linear_convection_solution");
  require_finite(u0, "linear_convection_solution");
  if (a == 0.0) return heat_solution(u0, t);
  const Grid1D& g = u0.grid();
  std::vector<double> x = g.nodes();
  for (double& xi : x) xi += a * t;
  auto w = detail::convolve_decaying(g, u0.values(), t, x);
  double peak = 0.0;
  for (double v : w) peak = std::max(peak, std::abs(v));
  if (std::abs(w.front()) > 1e-10 * peak || std::abs(w.back()) > 1e-10 * peak) {
    throw Error(ErrorKind::DomainTooSmall, "convected solution reaches the grid boundary");
  }
  return Field(g, std::move(w), u0.time() + t, u0.frame());
}

// w0(x) = exp(int_{x_min}^x u0).
inline Field hopf_cole_forward(const Field& u0) {
  require_finite(u0, "hopf_cole_forward");
  auto c = cumulative_trapezoid(u0.values(), u0.grid().dx());
  for (double& v : c) v = std::exp(v);
  return Field(u0.grid(), std::move(c), u0.time(), u0.frame());
}

// Fourth-order centered derivative in the interior, second order near the ends.
inline std::vector<double> derivative4(std::span<const double> w, double dx) {
  const std::size_t n = w.size();
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (-w[i + 2] + 8.0 * w[i + 1] - 8.0 * w[i - 1] + w[i - 2]) / (12.0 * dx);
  }
  d[1] = (w[2] - w[0]) / (2.0 * dx);
  d[n - 2] = (w[n - 1] - w[n - 3]) / (2.0 * dx);
  d[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dx);
  d[n - 1] = (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * dx);
  return d;
}

// Solution of u_t - u_xx = a (u^2)_x at time t via the Hopf-Cole transform.
// For a != 1 the problem is mapped to a = 1 through v = a u.
inline Field burgers_exact(const Field& u0, double t, double a = 1.0) {
  require_positive_time(t, "burgers_exact");
  if (a == 0.0) return heat_solution(u0, t);
  Field v0 = map_values(u0, [a](double u) { return a * u; });
  Field w0 = hopf_cole_forward(v0);
  Field w = heat_solution(w0, t, FarField{w0[0], w0[w0.size() - 1]});
  for (double v : w.values()) {
    if (!(v > 0.0)) throw Error(ErrorKind::InternalError, "Hopf-Cole variable lost positivity");
  }
  auto wx = derivative4(w.values(), w.grid().dx());
  std::vector<double> u(w.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = wx[i] / (w[i] * a);
  return Field(u0.grid(), std::move(u), u0.time() + t, u0.frame());
}

// First moment of w0' over its mass, with w0 the Hopf-Cole variable of a u0.
// Translating u0 by minus this value centers the step that w relaxes to.
inline double hopf_cole_center(const Field& u0, double a = 1.0) {
  Field w0 = hopf_cole_forward(map_values(u0, [a](double u) { return a * u; }));
  auto d = derivative4(w0.values(), u0.grid().dx());
  double moment = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    moment += u0.grid().node(i) * d[i];
    mass += d[i];
  }
  if (mass == 0.0) throw Error(ErrorKind::InvalidConfig, "hopf_cole_center: zero mass");
  return moment / mass;
}

// Self-similar profile of mass M for u_t - u_xx = a (u^2)_x,
// f(x) = (1/a) (e^{aM} - 1) h(x) / ((e^{aM} - 1) H(x) + 1).
inline double burgers_profile(double mass, double x, double a = 1.0) {
  if (a == 0.0) return mass * std::exp(-0.25 * x * x) / std::sqrt(4.0 * std::numbers::pi);
  const double m = a * mass;
  const double e = std::expm1(m);
  const double h = std::exp(-0.25 * x * x) / std::sqrt(4.0 * std::numbers::pi);
  return e * h / (e * gaussian_cdf(x) + 1.0) / a;
}

inline Field burgers_profile_field(double mass, const Grid1D& grid, double a = 1.0) {
  return Field::sample(grid, [&](double x) { return burgers_profile(mass, x, a); }, 1.0);
}

// u_M(x, t) = t^{-1/2} f_M(x / sqrt(t)).
inline double burgers_self_similar(double mass, double x, double t, double a = 1.0) {
  require_positive_time(t, "burgers_self_similar");
  const double r = std::sqrt(t);
  return burgers_profile(mass, x / r, a) / r;
}

// Entropy solution of u_t + (1/q)(|u|^{q-1}u)_x = 0 with data M delta,
// (x/t)^{1/(q-1)} on (0, r(t)). Any other a < 0 reduces to this one by
// scaling u; a > 0 additionally mirrors x (see nwave_general).
class NWave {
 public:
  NWave(double q, double mass) : q_(q), mass_(mass) {
    if (!(q > 1.0 && q < 2.0)) throw Error(ErrorKind::InvalidExponent, "N-wave needs 1 < q < 2");
    if (!(mass > 0.0)) throw Error(ErrorKind::InvalidConfig, "N-wave needs M > 0");
  }

  double q() const noexcept { return q_; }
  double mass() const noexcept { return mass_; }
  double c() const { return std::pow(q_ / (q_ - 1.0), (q_ - 1.0) / q_); }

  double radius(double t) const {
    require_positive_time(t, "NWave::radius");
    return c() * std::pow(mass_, (q_ - 1.0) / q_) * std::pow(t, 1.0 / q_);
  }

  double operator()(double x, double t) const {
    const double r = radius(t);
    if (!(x > 0.0 && x < r)) return 0.0;
    return std::pow(x / t, 1.0 / (q_ - 1.0));
  }

  // (q M / ((q - 1) t))^{1/q}, the value at the right edge.
  double sup(double t) const {
    require_positive_time(t, "NWave::sup");
    return std::pow(q_ * mass_ / ((q_ - 1.0) * t), 1.0 / q_);
  }

 private:
  double q_;
  double mass_;
};

inline double nwave(double q, double mass, double x, double t) { return NWave(q, mass)(x, t); }

// Entropy N-wave of u_t = a (|u|^{q-1}u)_x for any a != 0.
inline double nwave_general(double q, double a, double mass, double x, double t) {
  if (a == 0.0) throw Error(ErrorKind::InvalidConfig, "N-wave needs a != 0");
  const double lambda = std::pow(1.0 / (q * std::abs(a)), 1.0 / (q - 1.0));
  const double xs = a < 0.0 ? x : -x;
  return lambda * NWave(q, mass / lambda)(xs, t);
}

}  // namespace cdasym::exact
