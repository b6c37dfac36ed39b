#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cdasym/error.hpp"
#include "cdasym/exact.hpp"
#include "cdasym/grid.hpp"
#include "cdasym/initial.hpp"
#include "cdasym/io.hpp"
#include "cdasym/nonlinearity.hpp"
#include "cdasym/quadrature.hpp"
#include "cdasym/tridiagonal.hpp"

using namespace cdasym;

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

}  // namespace

TEST(Grid, NodesAndEndpoints) {
  Grid1D g(-2.0, 3.0, 11);
  EXPECT_DOUBLE_EQ(g.dx(), 0.5);
  EXPECT_EQ(g.node(0), -2.0);
  EXPECT_EQ(g.node(10), 3.0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.node(i), -2.0 + static_cast<double>(i) * g.dx());
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_EQ(kind_of([] { Grid1D(1.0, 1.0, 16); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { Grid1D(0.0, 1.0, 7); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { Grid1D(0.0, INFINITY, 16); }), ErrorKind::InvalidConfig);
}

TEST(Field, LengthMustMatchGrid) {
  EXPECT_EQ(kind_of([] { Field(Grid1D(0.0, 1.0, 9), std::vector<double>(8, 0.0)); }), ErrorKind::ShapeMismatch);
}

TEST(Trapezoid, ConstantIsExact) {
  Field one = Field::sample(Grid1D(0.0, 1.0, 11), [](double) { return 1.0; });
  EXPECT_DOUBLE_EQ(trapezoid_integral(one), 1.0);
}

TEST(Trapezoid, HeatKernelHasUnitMass) {
  Field g = exact::heat_kernel_field(Grid1D(-40.0, 40.0, 4096), 1.0);
  EXPECT_NEAR(trapezoid_integral(g), 1.0, 1e-10);
}

TEST(Trapezoid, DipoleHasZeroMass) {
  Field d = make_initial(Dipole{1.0, 2.0}, Grid1D(-20.0, 20.0, 801));
  EXPECT_NEAR(trapezoid_integral(d), 0.0, 1e-12);
}

TEST(Trapezoid, RejectsNonFinite) {
  Field f = Field::zeros(Grid1D(0.0, 1.0, 9));
  f[3] = NAN;
  EXPECT_EQ(kind_of([&] { trapezoid_integral(f); }), ErrorKind::InvalidField);
  EXPECT_EQ(kind_of([] { trapezoid(std::vector<double>{}, 0.1); }), ErrorKind::InvalidField);
}

TEST(Trapezoid, IsLinear) {
  Grid1D g(-10.0, 10.0, 401);
  Field u = make_initial(Gaussian{1.3, 0.8, -1.0}, g);
  Field v = make_initial(Box{0.7, 3.0, 2.0}, g);
  for (auto [alpha, beta] : {std::pair{2.0, -3.0}, std::pair{-0.25, 7.5}, std::pair{1e3, 1e-3}}) {
    const double lhs = trapezoid_integral(linear_combination(alpha, u, beta, v));
    const double rhs = alpha * trapezoid_integral(u) + beta * trapezoid_integral(v);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(LpNorm, HeatKernelClosedForms) {
  Field g = exact::heat_kernel_field(Grid1D(-40.0, 40.0, 4096), 1.0);
  EXPECT_NEAR(lp_norm(g, Lp(1)), 1.0, 1e-10);
  EXPECT_NEAR(lp_norm(g, Lp(2)), std::pow(8.0 * std::numbers::pi, -0.25), 1e-6);
  EXPECT_NEAR(lp_norm(g, Lp(2)), 0.44662, 1e-5);
  // n = 4096 has no node at 0.
  Field h = exact::heat_kernel_field(Grid1D(-40.0, 40.0, 4001), 1.0);
  EXPECT_NEAR(lp_norm(h, Lp::inf()), 0.2820948, 1e-7);
}

TEST(LpNorm, RejectsPBelowOne) {
  Field g = exact::heat_kernel_field(Grid1D(-10.0, 10.0, 101), 1.0);
  EXPECT_EQ(kind_of([&] { lp_norm(g, Lp(0.5)); }), ErrorKind::InvalidExponent);
}

TEST(LpNorm, MonotoneUnderDomination) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0), sign(-1.0, 1.0);
  Grid1D g(0.0, 1.0, 64);
  for (int trial = 0; trial < 20; ++trial) {
    Field v = Field::sample(g, [&](double) { return sign(rng); });
    Field u = v;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = v[i] * unit(rng) * (sign(rng) < 0 ? -1.0 : 1.0);
    for (Lp p : {Lp(1), Lp(1.5), Lp(2), Lp(7), Lp::inf()}) EXPECT_LE(lp_norm(u, p), lp_norm(v, p) * (1.0 + 1e-14));
  }
}

TEST(LpNorm, HeatKernelScalingIsTimeInvariant) {
  Grid1D g(-60.0, 60.0, 6001);
  for (Lp p : {Lp(1), Lp(2), Lp(4), Lp::inf()}) {
    auto scaled = [&](double t) { return lp_norm(exact::heat_kernel_field(g, t), p) * std::pow(t, 0.5 * (1.0 - p.reciprocal())); };
    const double ref = scaled(1.0);
    for (double t : {2.0, 4.0}) EXPECT_NEAR(scaled(t), ref, 1e-6 * ref) << p.label();
  }
}

TEST(Initial, GaussianMass) {
  Field f = make_initial(Gaussian{1.0, 1.0, 0.0}, Grid1D(-10.0, 10.0, 201));
  EXPECT_NEAR(trapezoid_integral(f), 1.0, 1e-8);
}

TEST(Initial, BoxPeak) {
  Field f = make_initial(Box{2.0, 4.0, 0.0}, Grid1D(-10.0, 10.0, 201));
  EXPECT_NEAR(lp_norm(f, Lp::inf()), 0.5, 1e-14);
  EXPECT_NEAR(trapezoid_integral(f), 2.0, 1e-12);
}

TEST(Initial, DipoleZeroMassPositiveNorm) {
  Field f = make_initial(Dipole{1.0, 2.0}, Grid1D(-20.0, 20.0, 401));
  EXPECT_NEAR(trapezoid_integral(f), 0.0, 1e-10);
  EXPECT_GT(lp_norm(f, Lp(1)), 0.0);
}

TEST(Initial, FileWithWrongLength) {
  auto dir = std::filesystem::temp_directory_path() / "cdasym_test_core";
  std::filesystem::create_directories(dir);
  Grid1D small(-1.0, 1.0, 9);
  io::write_field_csv(dir / "u.csv", make_initial(Gaussian{1.0, 0.2, 0.0}, small));
  EXPECT_EQ(kind_of([&] { make_initial(FromFile{(dir / "u.csv").string()}, Grid1D(-1.0, 1.0, 17)); }),
            ErrorKind::ShapeMismatch);
  Field back = make_initial(FromFile{(dir / "u.csv").string()}, small);
  EXPECT_EQ(back.data(), make_initial(Gaussian{1.0, 0.2, 0.0}, small).data());
}

TEST(Initial, RejectsNonPositiveWidth) {
  EXPECT_EQ(kind_of([] { make_initial(Gaussian{1.0, 0.0, 0.0}, Grid1D(-1.0, 1.0, 9)); }), ErrorKind::InvalidConfig);
}

TEST(Nonlinearity, PowerLawFlux) {
  auto n = Nonlinearity::power_law(1.5, 2.0);
  EXPECT_DOUBLE_EQ(n.flux(4.0), 16.0);
  EXPECT_DOUBLE_EQ(n.flux(-4.0), -16.0);
  EXPECT_EQ(n.flux(0.0), 0.0);
  EXPECT_EQ(n.drift(), 0.0);
  EXPECT_EQ(kind_of([] { Nonlinearity::power_law(1.0, 1.0); }), ErrorKind::InvalidExponent);
}

TEST(Nonlinearity, DriftIsDerivativeAtZero) {
  EXPECT_EQ(Nonlinearity::linear(-0.75).drift(), -0.75);
  auto c = Nonlinearity::custom([](double u) { return u + u * u; }, [](double u) { return 1.0 + 2.0 * u; });
  EXPECT_NEAR(c.drift(), 1.0, 1e-8);
  EXPECT_EQ(kind_of([] {
              Nonlinearity::custom([](double u) { return u + u * u; }, [](double u) { return 2.0 + 2.0 * u; });
            }),
            ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] {
              Nonlinearity::custom([](double u) { return 1.0 + u; }, [](double) { return 1.0; });
            }),
            ErrorKind::InvalidConfig);
}

TEST(Nonlinearity, EngquistOsherSplitSumsToFlux) {
  auto c = Nonlinearity::custom([](double u) { return u * u * u - u * u; }, [](double u) { return 3.0 * u * u - 2.0 * u; });
  for (double u : {-1.5, -0.2, 0.0, 0.4, 2.0}) {
    auto [plus, minus] = c.split_flux(u);
    EXPECT_NEAR(plus + minus, -c.flux(u), 1e-12);
  }
}

TEST(Tridiagonal, SolvesAgainstDirectProduct) {
  std::vector<double> lo{0.0, -1.0, -1.0, -1.0, -1.0}, d{4.0, 4.0, 4.0, 4.0, 4.0}, up{-1.0, -1.0, -1.0, -1.0, 0.0};
  TridiagonalSolver s(lo, d, up);
  std::vector<double> x{1.0, -2.0, 3.0, 0.5, -1.0};
  std::vector<double> b(5);
  for (std::size_t i = 0; i < 5; ++i) {
    b[i] = d[i] * x[i] + (i > 0 ? lo[i] * x[i - 1] : 0.0) + (i < 4 ? up[i] * x[i + 1] : 0.0);
  }
  s.solve(b);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(b[i], x[i], 1e-14);
  std::vector<double> wrong(4);
  EXPECT_EQ(kind_of([&] { s.solve(wrong); }), ErrorKind::ShapeMismatch);
}

TEST(Io, FieldCsvRoundTripIsExact) {
  auto dir = std::filesystem::temp_directory_path() / "cdasym_test_core";
  std::filesystem::create_directories(dir);
  Grid1D g(-3.0, 3.0, 31);
  Field f = Field::sample(g, [](double x) { return std::sin(x) / 3.0; });
  io::write_field_csv(dir / "rt.csv", f);
  auto t = io::read_csv(dir / "rt.csv");
  ASSERT_EQ(t.header, (std::vector<std::string>{"x", "u"}));
  Field back = io::read_field_csv(dir / "rt.csv", g);
  EXPECT_EQ(back.data(), f.data());
}

TEST(Interpolate, LinearBetweenNodesZeroOutside) {
  Field f = Field::sample(Grid1D(0.0, 7.0, 8), [](double x) { return 2.0 * x + 1.0; });
  EXPECT_DOUBLE_EQ(interpolate(f, 2.25), 5.5);
  EXPECT_EQ(interpolate(f, -0.1), 0.0);
  EXPECT_EQ(interpolate(f, 7.1), 0.0);
  EXPECT_DOUBLE_EQ(interpolate(f, 7.0), 15.0);
}
