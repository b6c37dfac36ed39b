#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cdasym/error.hpp"
#include "cdasym/grid.hpp"
#include "cdasym/io.hpp"
#include "cdasym/quadrature.hpp"

namespace cdasym::spectral {

// K(y) = exp(y^2 / 4). Weighted quadratures are restricted to |y| <= kMaxY so
// the weight stays representable.
inline constexpr double kMaxY = 15.0;

inline double log_weight(double y) { return 0.25 * y * y; }

namespace detail {

inline void require_weight_range(const Grid1D& g) {
  if (std::max(std::abs(g.x_min()), std::abs(g.x_max())) > kMaxY * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidConfig, "K-weighted quadrature needs |y| <= 15");
  }
}

// f(y) g(y) K(y), assembled in log space.
inline double weighted_product(double f, double g, double y) {
  if (f == 0.0 || g == 0.0) return 0.0;
  const double mag = std::exp(std::log(std::abs(f)) + std::log(std::abs(g)) + log_weight(y));
  return ((f < 0.0) != (g < 0.0)) ? -mag : mag;
}

inline std::vector<double> weighted_integrand(std::span<const double> f, std::span<const double> g, const Grid1D& grid) {
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = weighted_product(f[i], g[i], grid.node(i));
  return w;
}

// The integrand must be negligible at both ends relative to the integral of
// its absolute value, so orthogonal pairs are not flagged.
inline void require_decayed(std::span<const double> integrand, double dx, const char* where) {
  const double edge = std::max(std::abs(integrand.front()), std::abs(integrand.back()));
  if (edge == 0.0) return;
  std::vector<double> mag(integrand.size());
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(integrand[i]);
  if (edge > 1e-12 * trapezoid(mag, dx)) {
    throw Error(ErrorKind::DomainTooSmall, std::string(where) + ": K-weighted integrand not decayed at the boundary");
  }
}

}  // namespace detail

// (f, g)_K by trapezoid quadrature.
inline double k_inner(const Field& f, const Field& g) {
  require_same_grid(f, g, "k_inner");
  detail::require_weight_range(f.grid());
  auto w = detail::weighted_integrand(f.values(), g.values(), f.grid());
  double value = trapezoid(w, f.grid().dx());
  detail::require_decayed(w, f.grid().dx(), "k_inner");
  return value;
}

inline double k_norm(const Field& f) {
  require_finite(f, "k_norm");
  return std::sqrt(std::max(0.0, k_inner(f, f)));
}

// Eigenfunctions of L v = -v'' - y v' / 2 on L^2(K), N = 1:
//   phi_l proportional to D^{l-1} exp(-y^2/4) = (-1/sqrt 2)^{l-1} He_{l-1}(y/sqrt 2) exp(-y^2/4),
// with eigenvalue mu_l = l / 2.
class WeightedBasis {
 public:
  explicit WeightedBasis(std::size_t order = 16, Grid1D grid = Grid1D(-kMaxY, kMaxY, 6001)) : grid_(grid) {
    if (order < 1) throw Error(ErrorKind::InvalidConfig, "basis order must be >= 1");
    detail::require_weight_range(grid_);
    const std::size_t n = grid_.size();
    // Normalized probabilists' Hermite recurrence: psi_k = He_k / sqrt(k!).
    std::vector<std::vector<double>> psi(order, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid_.node(i) / std::numbers::sqrt2;
      psi[0][i] = 1.0;
      if (order > 1) psi[1][i] = x;
      for (std::size_t k = 1; k + 1 < order; ++k) {
        psi[k + 1][i] = (x * psi[k][i] - std::sqrt(static_cast<double>(k)) * psi[k - 1][i]) /
                        std::sqrt(static_cast<double>(k + 1));
      }
    }
    for (std::size_t k = 0; k < order; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double y = grid_.node(i);
        v[i] = sign * psi[k][i] * std::exp(-0.25 * y * y);
      }
      Field phi(grid_, std::move(v), 0.0, Frame::Similarity);
      auto w = detail::weighted_integrand(phi.values(), phi.values(), grid_);
      const double norm = std::sqrt(trapezoid(w, grid_.dx()));
      for (double& value : phi.data()) value /= norm;
      functions_.push_back(std::move(phi));
    }
  }

  std::size_t order() const noexcept { return functions_.size(); }
  const Grid1D& grid() const noexcept { return grid_; }

  // 1-based index l.
  const Field& phi(std::size_t l) const {
    if (l < 1 || l > order()) throw Error(ErrorKind::ShapeMismatch, "basis index out of range");
    return functions_[l - 1];
  }

  static double eigenvalue(std::size_t l, int dimension = 1) { return 0.5 * static_cast<double>(dimension + static_cast<int>(l) - 1); }

  // Analytic K-norm of the unnormalized (-1/sqrt 2)^k He_k(y/sqrt 2) exp(-y^2/4)
  // scaled by 1/sqrt(k!): sqrt(sqrt 2 * sqrt(2 pi)).
  static double analytic_scale() { return std::sqrt(std::numbers::sqrt2 * std::sqrt(2.0 * std::numbers::pi)); }

  // K-weighted Gram matrix, row-major.
  std::vector<double> gram() const {
    const std::size_t m = order();
    std::vector<double> g(m * m);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) {
        auto w = detail::weighted_integrand(functions_[a].values(), functions_[b].values(), grid_);
        g[a * m + b] = g[b * m + a] = trapezoid(w, grid_.dx());
      }
    }
    return g;
  }

  // CSV with header y,phi1,...,phim; rows are grid nodes.
  void write_csv(const std::filesystem::path& path) const {
    std::vector<std::string> header{"y"};
    std::vector<std::vector<double>> columns{grid_.nodes()};
    for (std::size_t l = 1; l <= order(); ++l) {
      header.push_back("phi" + std::to_string(l));
      columns.push_back(functions_[l - 1].data());
    }
    io::write_csv(path, header, columns);
  }

 private:
  Grid1D grid_;
  std::vector<Field> functions_;
};

// alpha_l = (f, phi_l)_K.
inline double project(const Field& f, const WeightedBasis& basis, std::size_t l) {
  require_finite(f, "project");
  if (!(f.grid() == basis.grid())) throw Error(ErrorKind::ShapeMismatch, "project: field is not on the basis grid");
  return k_inner(f, basis.phi(l));
}

inline std::vector<double> project_all(const Field& f, const WeightedBasis& basis) {
  std::vector<double> c(basis.order());
  for (std::size_t l = 1; l <= basis.order(); ++l) c[l - 1] = project(f, basis, l);
  return c;
}

// Exact evolution of v_s = v_yy + (y v)_y / 2 in coefficient space:
// alpha_l -> exp(-(mu_l - N/2) s) alpha_l.
inline std::vector<double> evolve_spectral(std::vector<double> coeffs, double s, int dimension = 1) {
  if (!(s >= 0.0)) throw Error(ErrorKind::NonPositiveTime, "evolve_spectral needs s >= 0");
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!std::isfinite(coeffs[k])) throw Error(ErrorKind::InvalidField, "non-finite coefficient");
    const double rate = WeightedBasis::eigenvalue(k + 1, dimension) - 0.5 * dimension;
    coeffs[k] *= std::exp(-rate * s);
  }
  return coeffs;
}

inline Field reconstruct(std::span<const double> coeffs, const WeightedBasis& basis) {
  if (coeffs.empty() || coeffs.size() > basis.order()) {
    throw Error(ErrorKind::ShapeMismatch, "reconstruct: " + std::to_string(coeffs.size()) +
                                              " coefficients for a basis of order " + std::to_string(basis.order()));
  }
  std::vector<double> v(basis.grid().size(), 0.0);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const auto& phi = basis.phi(k + 1).data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += coeffs[k] * phi[i];
  }
  return Field(basis.grid(), std::move(v), 0.0, Frame::Similarity);
}

// Solution at similarity time s of the linear similarity equation from f.
inline Field spectral_solution(const Field& f, const WeightedBasis& basis, double s) {
  Field v = reconstruct(evolve_spectral(project_all(f, basis), s), basis);
  v.set_time(f.time() + s);
  return v;
}

// (L_h f)_i = -(f_{i+1} - 2 f_i + f_{i-1}) / dy^2 - y_i (f_{i+1} - f_{i-1}) / (4 dy); zero at the ends.
inline Field apply_l(const Field& f) {
  const Grid1D& g = f.grid();
  const double h = g.dx();
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    out[i] = -(f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h) - g.node(i) * (f[i + 1] - f[i - 1]) / (4.0 * h);
  }
  return Field(g, std::move(out), f.time(), f.frame());
}

// ||L_h phi_l - mu_l phi_l||_K / ||phi_l||_K.
inline double eigen_residual(const WeightedBasis& basis, std::size_t l) {
  const Field& phi = basis.phi(l);
  Field r = apply_l(phi);
  const double mu = WeightedBasis::eigenvalue(l);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) r[i] -= mu * phi[i];
  return k_norm(r) / k_norm(phi);
}

struct PoincareCheck {
  double moment = 0.0;    // int v^2 y^2 K
  double gradient = 0.0;  // int (v')^2 K
  bool holds() const { return moment <= 16.0 * gradient; }
};

inline PoincareCheck poincare_check(const Field& v) {
  const Grid1D& g = v.grid();
  Field yv = Field::sample(g, [](double y) { return y; });
  for (std::size_t i = 0; i < v.size(); ++i) yv[i] *= v[i];
  Field dv = derivative(v);
  return {k_inner(yv, yv), k_inner(dv, dv)};
}

}  // namespace cdasym::spectral
