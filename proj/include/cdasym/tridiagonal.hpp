#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "cdasym/error.hpp"

namespace cdasym {

// LU factorization of a tridiagonal matrix (Thomas algorithm without
// pivoting); meant for diagonally dominant systems.
class TridiagonalSolver {
 public:
  TridiagonalSolver() = default;

  // lower[0] and upper[m-1] are ignored.
  TridiagonalSolver(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper)
      : lower_(lower.begin(), lower.end()), inv_pivot_(diag.size()), upper_star_(diag.size()) {
    const std::size_t m = diag.size();
    if (lower.size() != m || upper.size() != m) throw Error(ErrorKind::ShapeMismatch, "tridiagonal bands differ in length");
    double pivot = diag[0];
    for (std::size_t i = 0; i < m; ++i) {
      if (i > 0) pivot = diag[i] - lower[i] * upper_star_[i - 1];
      if (pivot == 0.0 || !std::isfinite(pivot)) throw Error(ErrorKind::InternalError, "singular tridiagonal system");
      inv_pivot_[i] = 1.0 / pivot;
      upper_star_[i] = upper[i] * inv_pivot_[i];
    }
  }

  std::size_t size() const noexcept { return inv_pivot_.size(); }

  // Solves in place.
  void solve(std::span<double> rhs) const {
    const std::size_t m = size();
    if (rhs.size() != m) throw Error(ErrorKind::ShapeMismatch, "tridiagonal rhs has wrong length");
    rhs[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < m; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
    for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= upper_star_[i] * rhs[i + 1];
  }

 private:
  std::vector<double> lower_;
  std::vector<double> inv_pivot_;
  std::vector<double> upper_star_;
};

}  // namespace cdasym
