#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "cdasym/initial.hpp"
#include "cdasym/solver.hpp"
#include "cdasym/spectral.hpp"

using namespace cdasym;
using namespace cdasym::spectral;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected cdasym::Error";
  return ErrorKind::InternalError;
}

const WeightedBasis& basis8() {
  static const WeightedBasis b(8);
  return b;
}

}  // namespace

TEST(Basis, GramIsIdentity) {
  const auto& b = basis8();
  auto g = b.gram();
  const std::size_t m = b.order();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(g[i * m + j], i == j ? 1.0 : 0.0, 1e-8) << i << "," << j;
  }
}

TEST(Basis, FirstElementIsNormalizedGaussian) {
  const auto& b = basis8();
  // exp(-y^2/4) has K-norm^2 equal to 2 sqrt(pi).
  const double c = 1.0 / std::sqrt(2.0 * std::sqrt(std::numbers::pi));
  for (std::size_t i = 0; i < b.grid().size(); i += 250) {
    const double y = b.grid().node(i);
    const double expected = c * std::exp(-0.25 * y * y);
    EXPECT_NEAR(b.phi(1)[i], expected, 1e-9 * expected);
  }
}

TEST(Basis, SecondElementIsDerivativeOfFirst) {
  const auto& b = basis8();
  // D exp(-y^2/4) = -y/2 exp(-y^2/4), so phi_2 has the sign of -y.
  EXPECT_LT(b.phi(2)[b.grid().size() - 2000], 0.0);
  EXPECT_GT(b.phi(2)[2000], 0.0);
}

TEST(Basis, EigenResidualsSmall) {
  for (std::size_t l = 1; l <= 6; ++l) EXPECT_LT(eigen_residual(basis8(), l), 1e-4) << l;
}

TEST(Basis, Eigenvalues) {
  EXPECT_DOUBLE_EQ(WeightedBasis::eigenvalue(1), 0.5);
  EXPECT_DOUBLE_EQ(WeightedBasis::eigenvalue(4), 2.0);
  EXPECT_DOUBLE_EQ(WeightedBasis::eigenvalue(1, 3), 1.5);
}

TEST(Basis, IndexAndGridGuards) {
  EXPECT_EQ(kind_of([] { basis8().phi(0); }), ErrorKind::ShapeMismatch);
  EXPECT_EQ(kind_of([] { basis8().phi(9); }), ErrorKind::ShapeMismatch);
  EXPECT_EQ(kind_of([] { WeightedBasis(0); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { WeightedBasis(4, Grid1D(-20.0, 20.0, 801)); }), ErrorKind::InvalidConfig);
}

TEST(Basis, CsvHasOneColumnPerElement) {
  auto path = std::filesystem::temp_directory_path() / "cdasym_basis.csv";
  WeightedBasis(3, Grid1D(-15.0, 15.0, 301)).write_csv(path);
  auto t = io::read_csv(path);
  EXPECT_EQ(t.header, (std::vector<std::string>{"y", "phi1", "phi2", "phi3"}));
  EXPECT_EQ(t.columns.at(0).size(), 301u);
}

TEST(Projection, ReconstructRoundTrip) {
  const auto& b = basis8();
  std::vector<double> c{0.3, -1.2, 0.0, 0.7, 0.05};
  Field f = reconstruct(c, b);
  auto back = project_all(f, b);
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(back[k], c[k], 1e-8);
  for (std::size_t k = c.size(); k < back.size(); ++k) EXPECT_NEAR(back[k], 0.0, 1e-8);
  EXPECT_EQ(kind_of([&] { reconstruct(std::vector<double>(9, 1.0), b); }), ErrorKind::ShapeMismatch);
}

TEST(Projection, FirstCoefficientIsProportionalToMass) {
  const auto& b = basis8();
  for (double m : {0.5, 1.0, -2.0}) {
    Field f = make_initial(Gaussian{m, 1.0, 0.3}, b.grid());
    // (f, phi_1)_K = c * int f since phi_1 K = c.
    EXPECT_NEAR(project(f, b, 1), m / std::sqrt(2.0 * std::sqrt(std::numbers::pi)), 1e-9);
  }
}

TEST(Projection, RequiresBasisGrid) {
  Field f = make_initial(Gaussian{}, Grid1D(-15.0, 15.0, 301));
  EXPECT_EQ(kind_of([&] { project(f, basis8(), 1); }), ErrorKind::ShapeMismatch);
}

TEST(Evolution, ModesDecayAtShiftedEigenvalues) {
  std::vector<double> c(5, 1.0);
  auto e = evolve_spectral(c, 2.0);
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(e[k], std::exp(-0.5 * static_cast<double>(k) * 2.0), 1e-15);
  EXPECT_EQ(kind_of([&] { evolve_spectral(c, -1.0); }), ErrorKind::NonPositiveTime);
}

TEST(Evolution, ZeroMassDecaysAtRateOneHalf) {
  const auto& b = basis8();
  Field f = Field::zeros(b.grid());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double y = b.grid().node(i);
    f[i] = -0.5 * y * std::exp(-0.25 * y * y) + 0.3 * (0.25 * y * y - 0.5) * std::exp(-0.25 * y * y);
  }
  const double n0 = k_norm(spectral_solution(f, b, 6.0));
  const double n1 = k_norm(spectral_solution(f, b, 8.0));
  EXPECT_NEAR(std::log(n0 / n1) / 2.0, 0.5, 0.05);
}

TEST(Evolution, AgreesWithTimestepper) {
  const auto& b = basis8();
  Field f(b.grid(), make_initial(Gaussian{1.0, 0.8, 0.4}, b.grid()).data(), 0.0, Frame::Similarity);
  RunConfig c{b.grid(), Nonlinearity::none(), Gaussian{}};
  c.frame = Frame::Similarity;
  c.initial_field = f;
  c.dt = 0.005;
  c.t_end = 5.0;
  auto traj = run(c);
  Field spectral = spectral_solution(f, b, 5.0);
  EXPECT_LT(lp_distance(traj.snapshots.back(), spectral, Lp(1)), 1e-5);
}

TEST(Weighted, NormGuards) {
  Grid1D g(-15.0, 15.0, 601);
  Field slow = Field::sample(g, [](double y) { return std::exp(-0.1 * y * y); });
  EXPECT_EQ(kind_of([&] { k_norm(slow); }), ErrorKind::DomainTooSmall);
  Field wide = Field::zeros(Grid1D(-16.0, 16.0, 641));
  EXPECT_EQ(kind_of([&] { k_norm(wide); }), ErrorKind::InvalidConfig);
}

TEST(Weighted, InnerProductIsSymmetricAndBilinear) {
  const auto& b = basis8();
  Field u = make_initial(Gaussian{1.0, 0.7, 0.2}, b.grid());
  Field v = make_initial(Gaussian{-0.5, 0.9, -0.4}, b.grid());
  EXPECT_NEAR(k_inner(u, v), k_inner(v, u), 1e-12 * std::abs(k_inner(u, v)));
  EXPECT_NEAR(k_inner(linear_combination(2.0, u, 1.0, v), v), 2.0 * k_inner(u, v) + k_inner(v, v),
              1e-10 * std::abs(k_inner(v, v)));
}

TEST(Poincare, HoldsOnBasisElements) {
  for (std::size_t l = 1; l <= 6; ++l) {
    auto p = poincare_check(basis8().phi(l));
    EXPECT_TRUE(p.holds()) << l << ": " << p.moment << " vs " << p.gradient;
    EXPECT_GT(p.gradient, 0.0);
  }
}

TEST(ApplyL, GaussianIsEigenfunction) {
  const auto& b = basis8();
  Field r = apply_l(b.phi(1));
  // Interior values match 0.5 phi_1 to O(dy^2).
  for (std::size_t i = 1000; i < 5000; i += 500) EXPECT_NEAR(r[i], 0.5 * b.phi(1)[i], 1e-6);
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[r.size() - 1], 0.0);
}
