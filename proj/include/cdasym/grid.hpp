#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdasym/error.hpp"

namespace cdasym {

// Uniform lattice x_i = x_min + i*dx, i = 0..n-1.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
      throw Error(ErrorKind::InvalidConfig, "grid requires finite x_min < x_max");
    }
    if (n < 8) throw Error(ErrorKind::InvalidConfig, "grid requires at least 8 nodes");
    dx_ = (x_max - x_min) / static_cast<double>(n - 1);
  }

  static Grid1D symmetric(double half_width, std::size_t n) { return {-half_width, half_width, n}; }

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }

  double node(std::size_t i) const noexcept {
    return i + 1 == n_ ? x_max_ : x_min_ + static_cast<double>(i) * dx_;
  }

  std::vector<double> nodes() const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
    return x;
  }

  bool contains(double x) const noexcept { return x >= x_min_ && x <= x_max_; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
    return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
  }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

enum class Frame { Physical, Similarity };

inline const char* to_string(Frame f) { return f == Frame::Physical ? "physical" : "similarity"; }

// Samples of u on a grid. `time` is t in the physical frame and s in the
// similarity frame.
class Field {
 public:
  Field(Grid1D grid, std::vector<double> values, double time = 0.0, Frame frame = Frame::Physical)
      : grid_(grid), values_(std::move(values)), time_(time), frame_(frame) {
    if (values_.size() != grid_.size()) {
      throw Error(ErrorKind::ShapeMismatch, "field has " + std::to_string(values_.size()) +
                                                " values for a grid of " +
                                                std::to_string(grid_.size()) + " nodes");
    }
  }

  static Field zeros(const Grid1D& grid, double time = 0.0, Frame frame = Frame::Physical) {
    return Field(grid, std::vector<double>(grid.size(), 0.0), time, frame);
  }

  template <class Fn>
  static Field sample(const Grid1D& grid, Fn&& fn, double time = 0.0,
                      Frame frame = Frame::Physical) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
    return Field(grid, std::move(v), time, frame);
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }
  Frame frame() const noexcept { return frame_; }

  bool all_finite() const noexcept {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

 private:
  Grid1D grid_;
  std::vector<double> values_;
  double time_;
  Frame frame_;
};

inline void require_finite(const Field& f, const char* where) {
  if (!f.all_finite()) throw Error(ErrorKind::InvalidField, std::string(where) + ": non-finite value");
}

inline void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!(a.grid() == b.grid())) throw Error(ErrorKind::ShapeMismatch, std::string(where) + ": grids differ");
}

// Piecewise-linear interpolant of the samples; zero outside the grid.
inline double interpolate(const Field& f, double x) {
  const Grid1D& g = f.grid();
  if (x < g.x_min() || x > g.x_max()) return 0.0;
  double pos = (x - g.x_min()) / g.dx();
  auto i = static_cast<std::size_t>(pos);
  if (i >= g.size() - 1) return f[g.size() - 1];
  double theta = pos - static_cast<double>(i);
  return (1.0 - theta) * f[i] + theta * f[i + 1];
}

inline Field resample(const Field& f, const Grid1D& target) {
  return Field::sample(target, [&](double x) { return interpolate(f, x); }, f.time(), f.frame());
}

template <class Fn>
Field map_values(const Field& f, Fn&& fn) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(f[i]);
  return Field(f.grid(), std::move(v), f.time(), f.frame());
}

inline Field linear_combination(double alpha, const Field& u, double beta, const Field& v) {
  require_same_grid(u, v, "linear_combination");
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = alpha * u[i] + beta * v[i];
  return Field(u.grid(), std::move(w), u.time(), u.frame());
}

}  // namespace cdasym
