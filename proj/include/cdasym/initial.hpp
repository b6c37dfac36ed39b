#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "cdasym/error.hpp"
#include "cdasym/grid.hpp"
#include "cdasym/io.hpp"
#include "cdasym/quadrature.hpp"

namespace cdasym {

// Normal density with standard deviation `width`, scaled to `mass`.
struct Gaussian {
  double mass = 1.0;
  double width = 1.0;
  double center = 0.0;
};

// Constant mass/width on [center - width/2, center + width/2].
struct Box {
  double mass = 1.0;
  double width = 1.0;
  double center = 0.0;
};

// amplitude * (g(x - separation/2) - g(x + separation/2)) with g the unit
// normal density; zero mass, nonzero first moment.
struct Dipole {
  double amplitude = 1.0;
  double separation = 1.0;
};

// mass * G(x - center, time), the heat kernel at a positive time.
struct HeatKernelData {
  double mass = 1.0;
  double time = 1.0;
  double center = 0.0;
};

struct FromFile {
  std::string path;
};

using InitialData = std::variant<Gaussian, Box, Dipole, HeatKernelData, FromFile>;

namespace detail {

inline double normal_density(double x, double width) {
  return std::exp(-0.5 * (x / width) * (x / width)) / (width * std::sqrt(2.0 * std::numbers::pi));
}

inline void renormalize(Field& f, double mass) {
  double m = trapezoid_integral(f);
  if (m == 0.0) throw Error(ErrorKind::DomainTooSmall, "initial profile not resolved by the grid");
  for (double& v : f.data()) v *= mass / m;
}

inline void require_positive_width(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidConfig, "generator width must be > 0");
}

}  // namespace detail

inline Field make_initial(const Gaussian& g, const Grid1D& grid) {
  detail::require_positive_width(g.width);
  Field f = Field::sample(grid, [&](double x) { return detail::normal_density(x - g.center, g.width); });
  if (g.mass == 0.0) return Field::zeros(grid);
  detail::renormalize(f, g.mass);
  return f;
}

// Cell-average sampling: node i carries the fraction of [x_i - dx/2, x_i + dx/2]
// covered by the box, so the discrete mass is exact and interior nodes hold
// the full height.
inline Field make_initial(const Box& b, const Grid1D& grid) {
  detail::require_positive_width(b.width);
  const double height = b.mass / b.width;
  const double lo = b.center - 0.5 * b.width;
  const double hi = b.center + 0.5 * b.width;
  const double dx = grid.dx();
  if (lo < grid.x_min() + dx || hi > grid.x_max() - dx) {
    throw Error(ErrorKind::DomainTooSmall, "box does not fit inside the grid");
  }
  return Field::sample(grid, [&](double x) {
    double covered = std::min(x + 0.5 * dx, hi) - std::max(x - 0.5 * dx, lo);
    return covered > 0.0 ? height * covered / dx : 0.0;
  });
}

inline Field make_initial(const Dipole& d, const Grid1D& grid) {
  Field plus = Field::sample(grid, [&](double x) { return detail::normal_density(x - 0.5 * d.separation, 1.0); });
  Field minus = Field::sample(grid, [&](double x) { return detail::normal_density(x + 0.5 * d.separation, 1.0); });
  detail::renormalize(plus, 1.0);
  detail::renormalize(minus, 1.0);
  return linear_combination(d.amplitude, plus, -d.amplitude, minus);
}

inline Field make_initial(const HeatKernelData& h, const Grid1D& grid) {
  if (!(h.time > 0.0)) throw Error(ErrorKind::NonPositiveTime, "heat kernel data needs time > 0");
  return make_initial(Gaussian{h.mass, std::sqrt(2.0 * h.time), h.center}, grid);
}

inline Field make_initial(const FromFile& file, const Grid1D& grid) {
  Field f = io::read_field_csv(file.path, grid);
  require_finite(f, "make_initial(file)");
  return f;
}

inline Field make_initial(const InitialData& data, const Grid1D& grid) {
  return std::visit([&](const auto& g) { return make_initial(g, grid); }, data);
}

inline std::string describe(const InitialData& data) {
  struct Visitor {
    std::string operator()(const Gaussian& g) const {
      return "gaussian(mass=" + io::format_real(g.mass) + ", width=" + io::format_real(g.width) +
             ", center=" + io::format_real(g.center) + ")";
    }
    std::string operator()(const Box& b) const {
      return "box(mass=" + io::format_real(b.mass) + ", width=" + io::format_real(b.width) +
             ", center=" + io::format_real(b.center) + ")";
    }
    std::string operator()(const Dipole& d) const {
      return "dipole(amplitude=" + io::format_real(d.amplitude) + ", separation=" + io::format_real(d.separation) + ")";
    }
    std::string operator()(const HeatKernelData& h) const {
      return "heat_kernel(mass=" + io::format_real(h.mass) + ", time=" + io::format_real(h.time) +
             ", center=" + io::format_real(h.center) + ")";
    }
    std::string operator()(const FromFile& f) const { return "file(" + f.path + ")"; }
  };
  return std::visit(Visitor{}, data);
}

}  // namespace cdasym
