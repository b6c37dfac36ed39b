#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cdasym/exact.hpp"
#include "cdasym/initial.hpp"
#include "cdasym/solver.hpp"

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

RunConfig heat_config(Grid1D g, double dt, double t_end) {
  RunConfig c{g, Nonlinearity::none(), Gaussian{}};
  c.dt = dt;
  c.t_end = t_end;
  return c;
}

// Sup error against G(., 2) after running G(., 1) to t = 1.
double heat_error(std::size_t n, double dt) {
  Grid1D g(-30.0, 30.0, n);
  RunConfig c = heat_config(g, dt, 1.0);
  c.initial_field = exact::heat_kernel_field(g, 1.0);
  auto traj = run(c);
  return lp_distance(traj.snapshots.back(), exact::heat_kernel_field(g, 2.0), Lp::inf());
}

}  // namespace

TEST(Heat, HundredStepsMatchKernel) {
  const double coarse = heat_error(513, 0.01);
  EXPECT_LT(coarse, 1e-4);
  const double fine = heat_error(1025, 0.005);
  EXPECT_NEAR(coarse / fine, 4.0, 0.4);
}

TEST(Heat, MassAndMaximumPrinciple) {
  Grid1D g(-40.0, 40.0, 801);
  RunConfig c = heat_config(g, 0.05, 10.0);
  c.output.cadence = 20;
  auto traj = run(c);
  ASSERT_EQ(traj.snapshots.size(), 11u);
  for (const auto& row : traj.series) EXPECT_NEAR(row.mass, 1.0, 1e-8);
  for (std::size_t k = 1; k < traj.series.size(); ++k) EXPECT_LE(traj.series[k].linf, traj.series[k - 1].linf);
  EXPECT_TRUE(traj.mass_conserved());
}

TEST(Burgers, MatchesHopfCole) {
  Grid1D g(-36.0, 36.0, 2048);
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{1.0, 1.0, 0.0}};
  c.dt = 0.01;
  c.t_end = 1.0;
  auto traj = run(c);
  Field exact_u = exact::burgers_exact(traj.snapshots.front(), 1.0);
  EXPECT_LT(lp_distance(traj.snapshots.back(), exact_u, Lp(1)), 1e-4);
}

TEST(Burgers, NonnegativeDataStaysNonnegative) {
  Grid1D g(-20.0, 20.0, 801);
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Box{2.0, 2.0, 0.0}};
  c.dt = 0.01;
  c.t_end = 3.0;
  c.output.cadence = 10;
  auto traj = run(c);
  for (const auto& u : traj.snapshots) {
    for (double v : u.values()) EXPECT_GE(v, -1e-12);
  }
}

TEST(Run, L1NonIncreasingForNonlinearRuns) {
  Grid1D g(-30.0, 30.0, 601);
  Field u0 = linear_combination(1.0, make_initial(Gaussian{1.0, 1.0, -2.0}, g), 1.0, make_initial(Dipole{1.0, 3.0}, g));
  for (double q : {1.5, 2.0, 3.0}) {
    RunConfig c{g, Nonlinearity::power_law(q, q < 2.0 ? -1.0 / q : 1.0), Gaussian{}};
    c.initial_field = u0;
    c.scheme = q < 2.0 ? Scheme::UpwindExplicit : Scheme::ImexCN;
    c.dt = q < 2.0 ? 0.2 * g.dx() * g.dx() : 0.02;
    c.t_end = 4.0;
    c.output.times = log_spaced(0.05, 4.0, 12);
    auto traj = run(c);
    EXPECT_TRUE(traj.mass_conserved()) << q;
    for (std::size_t k = 1; k < traj.series.size(); ++k) {
      EXPECT_LE(traj.series[k].l1, traj.series[k - 1].l1 + 1e-8) << "q=" << q << " k=" << k;
    }
  }
}

TEST(Run, StepRejectedSuggestsStableStep) {
  Grid1D g(-10.0, 10.0, 201);
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{5.0, 0.5, 0.0}};
  c.dt = 0.5;
  c.t_end = 1.0;
  try {
    run(c);
    FAIL() << "expected StepRejected";
  } catch (const StepRejected& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StepRejected);
    EXPECT_GT(e.suggested_dt(), 0.0);
    EXPECT_LT(e.suggested_dt(), 0.5);
    Integrator integrator(c.nonlinearity, g, Frame::Physical, Scheme::ImexCN);
    Field u = make_initial(c.initial, g);
    EXPECT_NO_THROW(integrator.step(u, e.suggested_dt()));
  }
}

TEST(Run, UpwindDiffusionGuard) {
  Grid1D g(-10.0, 10.0, 201);
  Integrator integrator(Nonlinearity::power_law(1.5, -1.0 / 1.5), g, Frame::Physical, Scheme::UpwindExplicit);
  Field u = make_initial(Gaussian{}, g);
  EXPECT_LE(integrator.stable_dt(u), 0.4 * g.dx() * g.dx() / 2.0);
  EXPECT_EQ(kind_of([&] { integrator.step(u, g.dx() * g.dx()); }), ErrorKind::StepRejected);
}

TEST(Run, CadenceMustDivideSteps) {
  RunConfig c = heat_config(Grid1D(-10.0, 10.0, 101), 0.1, 1.0);
  c.output.cadence = 3;
  EXPECT_EQ(kind_of([&] { run(c); }), ErrorKind::InvalidConfig);
  c.dt = 0.0;
  EXPECT_EQ(kind_of([&] { run(c); }), ErrorKind::InvalidConfig);
}

TEST(Run, BoundaryGuard) {
  RunConfig c = heat_config(Grid1D(-5.0, 5.0, 101), 0.05, 5.0);
  EXPECT_EQ(kind_of([&] { run(c); }), ErrorKind::DomainTooSmall);
}

TEST(Run, GrowingDomainKeepsMass) {
  Grid1D g(-8.0, 8.0, 161);
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{1.0, 1.0, 0.0}};
  c.dt = 0.01;
  c.t_end = 50.0;
  c.grow_domain = true;
  c.grow_dt_factor = 2.0;
  c.output.times = log_spaced(1.0, 50.0, 8);
  auto traj = run(c);
  EXPECT_GE(traj.regrids, 2u);
  EXPECT_TRUE(traj.mass_conserved()) << traj.max_mass_drift;
  EXPECT_GT(traj.snapshots.back().grid().length(), g.length());
}

TEST(GrowDomain, FullWeightingConservesMass) {
  Grid1D g(-4.0, 4.0, 81);
  Field u = make_initial(Gaussian{1.0, 0.5, 0.3}, g);
  Field w = grow_domain(u);
  EXPECT_EQ(w.size(), u.size());
  EXPECT_DOUBLE_EQ(w.grid().x_min(), -8.0);
  EXPECT_DOUBLE_EQ(w.grid().x_max(), 8.0);
  EXPECT_NEAR(trapezoid_integral(w), trapezoid_integral(u), 1e-12);
  EXPECT_EQ(kind_of([] { grow_domain(Field::zeros(Grid1D(0.0, 1.0, 10))); }), ErrorKind::InvalidConfig);
}

TEST(Similarity, HeatSteadyStateIsGaussianProfile) {
  Grid1D g(-15.0, 15.0, 3001);
  RunConfig c{g, Nonlinearity::none(), Gaussian{1.0, 1.5, 0.0}};
  c.frame = Frame::Similarity;
  c.dt = 0.01;
  c.t_end = 20.0;
  auto traj = run(c);
  Field profile = Field::sample(g, [](double y) { return std::exp(-0.25 * y * y) / std::sqrt(4.0 * std::numbers::pi); });
  EXPECT_LT(lp_distance(traj.snapshots.back(), profile, Lp(1)), 1e-5);
  EXPECT_TRUE(traj.mass_conserved());
}

TEST(Similarity, BurgersSteadyStateIsProfile) {
  Grid1D g(-15.0, 15.0, 3001);
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{1.0, 1.0, 0.0}};
  c.frame = Frame::Similarity;
  c.dt = 0.004;
  c.t_end = 25.0;
  auto traj = run(c);
  EXPECT_LT(lp_distance(traj.snapshots.back(), exact::burgers_profile_field(1.0, g), Lp(1)), 1e-4);
  EXPECT_LE(traj.max_mass_drift, 1e-8);
}

TEST(Similarity, OnlyClosedForQuadraticFlux) {
  Grid1D g(-15.0, 15.0, 301);
  EXPECT_EQ(kind_of([&] { Integrator(Nonlinearity::power_law(3.0, 1.0), g, Frame::Similarity, Scheme::ImexCN); }),
            ErrorKind::InvalidConfig);
  SolverState s{make_initial(Gaussian{}, g), 0, 0.01, Scheme::ImexCN};
  EXPECT_EQ(kind_of([&] { step_similarity(s, Nonlinearity::none()); }), ErrorKind::InvalidConfig);
  auto next = step_physical(s, Nonlinearity::none());
  EXPECT_EQ(next.step, 1);
  EXPECT_DOUBLE_EQ(next.time(), 0.01);
}

TEST(Contraction, IdenticalDataStayIdentical) {
  Grid1D g(-20.0, 20.0, 401);
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{}};
  c.dt = 0.01;
  c.t_end = 1.0;
  Field u0 = make_initial(Gaussian{1.0, 1.0, 0.0}, g);
  for (const auto& s : contraction_pair(c, u0, u0)) EXPECT_LE(s.distance, 1e-12);
}

TEST(Contraction, OrderedPairKeepsMassGap) {
  Grid1D g(-20.0, 20.0, 401);
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{}};
  c.dt = 0.01;
  c.t_end = 2.0;
  auto samples = contraction_pair(c, make_initial(Gaussian{2.0, 1.0, 0.0}, g), make_initial(Gaussian{1.0, 1.0, 0.0}, g));
  for (const auto& s : samples) EXPECT_NEAR(s.distance, 1.0, 1e-8);
}

TEST(Contraction, EqualMassPairStrictlyDecreasesInSimilarityFrame) {
  Grid1D g(-15.0, 15.0, 1501);
  RunConfig c{g, Nonlinearity::power_law(2.0, 1.0), Gaussian{}};
  c.frame = Frame::Similarity;
  c.dt = g.dx() * g.dx();
  c.t_end = 0.5;
  auto s = contraction_pair(c, make_initial(Gaussian{1.0, 1.0, 0.0}, g), make_initial(Box{1.0, 2.0, 0.0}, g));
  for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LE(s[k].distance, s[k - 1].distance + 1e-8);
  for (std::size_t k = 10; k < s.size(); k += 10) EXPECT_LT(s[k].distance, s[k - 10].distance - 1e-8);
}

TEST(Contraction, GridsMustMatch) {
  RunConfig c = heat_config(Grid1D(-10.0, 10.0, 101), 0.1, 1.0);
  EXPECT_EQ(kind_of([&] {
              contraction_pair(c, make_initial(Gaussian{}, Grid1D(-10.0, 10.0, 101)),
                               make_initial(Gaussian{}, Grid1D(-10.0, 10.0, 201)));
            }),
            ErrorKind::ShapeMismatch);
}

TEST(LogSpaced, EndpointsAndRatio) {
  auto t = log_spaced(1.0, 100.0, 5);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_DOUBLE_EQ(t.front(), 1.0);
  EXPECT_DOUBLE_EQ(t.back(), 100.0);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_NEAR(t[k] / t[k - 1], std::sqrt(10.0), 1e-12);
}
