#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "cdasym/error.hpp"
#include "cdasym/grid.hpp"

namespace cdasym {

// Norm index p in [1, inf]. Infinity is a distinct state, not a large float.
class Lp {
 public:
  constexpr explicit Lp(double p) : p_(p), infinite_(false) {}
  static constexpr Lp inf() { return Lp(); }

  constexpr bool is_inf() const noexcept { return infinite_; }
  constexpr double value() const noexcept { return p_; }

  // 1/p, zero for p = inf.
  constexpr double reciprocal() const noexcept { return infinite_ ? 0.0 : 1.0 / p_; }

  std::string label() const {
    if (infinite_) return "inf";
    double r = std::round(p_);
    return r == p_ ? std::to_string(static_cast<long long>(r)) : std::to_string(p_);
  }

  friend constexpr bool operator==(Lp a, Lp b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.p_ == b.p_);
  }

 private:
  constexpr Lp() : p_(0.0), infinite_(true) {}
  double p_;
  bool infinite_;
};

inline double trapezoid(std::span<const double> v, double dx) {
  if (v.empty()) throw Error(ErrorKind::InvalidField, "trapezoid of an empty sequence");
  if (v.size() == 1) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * dx;
}

inline double trapezoid_integral(const Field& f) {
  if (f.size() == 0) throw Error(ErrorKind::InvalidField, "empty field");
  require_finite(f, "trapezoid_integral");
  return trapezoid(f.values(), f.grid().dx());
}

inline double lp_norm(std::span<const double> v, double dx, Lp p) {
  if (v.empty()) throw Error(ErrorKind::InvalidField, "lp_norm of an empty sequence");
  if (p.is_inf()) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (!(p.value() >= 1.0)) throw Error(ErrorKind::InvalidExponent, "lp_norm requires p >= 1");
  if (p.value() == 1.0) {
    double s = 0.5 * (std::abs(v.front()) + std::abs(v.back()));
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += std::abs(v[i]);
    return s * dx;
  }
  // Scale by the max to keep |u|^p representable.
  double m = lp_norm(v, dx, Lp::inf());
  if (m == 0.0) return 0.0;
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::pow(std::abs(v[i]) / m, p.value());
  return m * std::pow(trapezoid(w, dx), 1.0 / p.value());
}

inline double lp_norm(const Field& f, Lp p) {
  require_finite(f, "lp_norm");
  return lp_norm(f.values(), f.grid().dx(), p);
}

inline double lp_distance(const Field& u, const Field& v, Lp p) {
  require_same_grid(u, v, "lp_distance");
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = u[i] - v[i];
  return lp_norm(d, u.grid().dx(), p);
}

// Running trapezoid integral from the left end; result[0] = 0.
inline std::vector<double> cumulative_trapezoid(std::span<const double> v, double dx) {
  std::vector<double> c(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) c[i] = c[i - 1] + 0.5 * dx * (v[i - 1] + v[i]);
  return c;
}

// Second-order centered derivative, one-sided at the ends.
inline Field derivative(const Field& f) {
  const std::size_t n = f.size();
  const double dx = f.grid().dx();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  return Field(f.grid(), std::move(d), f.time(), f.frame());
}

}  // namespace cdasym
