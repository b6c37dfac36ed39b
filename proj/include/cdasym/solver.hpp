#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cdasym/error.hpp"
#include "cdasym/grid.hpp"
#include "cdasym/initial.hpp"
#include "cdasym/nonlinearity.hpp"
#include "cdasym/quadrature.hpp"
#include "cdasym/tridiagonal.hpp"

namespace cdasym {

// ImexCN: Crank-Nicolson for the linear part, explicit centered flux
// differences for convection, combined in a two-stage (Heun) predictor-
// corrector so the step is second order. UpwindExplicit: forward Euler with an
// Engquist-Osher flux and explicit diffusion; monotone under its step guard.
enum class Scheme { ImexCN, UpwindExplicit };

inline const char* to_string(Scheme s) { return s == Scheme::ImexCN ? "imex_cn" : "upwind_explicit"; }

struct SolverState {
  Field field;
  long step = 0;
  double dt = 0.0;
  Scheme scheme = Scheme::ImexCN;

  Frame frame() const noexcept { return field.frame(); }
  double time() const noexcept { return field.time(); }
};

// Stability limits, as fractions of the classical bounds.
inline constexpr double kDiffusionSafety = 0.4;
inline constexpr double kConvectionCfl = 0.8;

// Advances u_t - u_xx = d/dx flux(u) (physical frame) or its similarity form
//   v_s = v_yy + (y v)_y / 2 + d/dy flux(v)        (N = 1, flux of degree 2)
// with homogeneous Dirichlet ends. The linear operator and its factorization
// are cached per step size.
class Integrator {
 public:
  Integrator(Nonlinearity nonlinearity, Grid1D grid, Frame frame, Scheme scheme)
      : nl_(std::move(nonlinearity)), grid_(grid), frame_(frame), scheme_(scheme) {
    if (frame == Frame::Similarity && !nl_.is_zero() &&
        !(nl_.kind() == Nonlinearity::Kind::PowerLaw && nl_.q() == 2.0)) {
      throw Error(ErrorKind::InvalidConfig,
                  "similarity frame is closed only for q = 2 power law (N = 1) or no convection");
    }
    build_operator();
  }

  const Grid1D& grid() const noexcept { return grid_; }
  const Nonlinearity& nonlinearity() const noexcept { return nl_; }
  Frame frame() const noexcept { return frame_; }
  Scheme scheme() const noexcept { return scheme_; }

  // Largest admissible step for the current field.
  double stable_dt(const Field& u) const {
    const double dx = grid_.dx();
    double speed = 0.0;
    for (double v : u.values()) speed = std::max(speed, std::abs(nl_.dflux(v)));
    double limit = std::numeric_limits<double>::infinity();
    if (scheme_ == Scheme::UpwindExplicit) {
      if (frame_ == Frame::Similarity) speed += 0.5 * std::max(std::abs(grid_.x_min()), std::abs(grid_.x_max()));
      limit = kDiffusionSafety * dx * dx / 2.0;
    }
    if (speed > 0.0) limit = std::min(limit, kConvectionCfl * dx / speed);
    return limit;
  }

  // One step of size dt; throws StepRejected if a guard fails.
  void step(Field& u, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidConfig, "dt must be > 0");
    if (!(u.grid() == grid_)) throw Error(ErrorKind::ShapeMismatch, "field grid differs from integrator grid");
    const double limit = stable_dt(u);
    if (dt > limit * (1.0 + 1e-12)) {
      throw StepRejected(0.9 * limit, "dt = " + std::to_string(dt) + " exceeds stability limit " + std::to_string(limit));
    }
    if (scheme_ == Scheme::ImexCN) {
      step_imex(u.data(), dt);
    } else {
      step_upwind(u.data(), dt);
    }
    u.set_time(u.time() + dt);
    if (!u.all_finite()) throw Error(ErrorKind::InternalError, "solver produced a non-finite value");
  }

 private:
  void build_operator() {
    const std::size_t n = grid_.size();
    const double dx = grid_.dx();
    lower_.assign(n, 0.0);
    diag_.assign(n, 0.0);
    upper_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      lower_[i] = 1.0 / (dx * dx);
      diag_[i] = -2.0 / (dx * dx);
      upper_[i] = 1.0 / (dx * dx);
      if (frame_ == Frame::Similarity) {
        // (y v)_y / 2 in conservative centered form.
        lower_[i] -= grid_.node(i - 1) / (4.0 * dx);
        upper_[i] += grid_.node(i + 1) / (4.0 * dx);
      }
    }
  }

  // out_i = (A u)_i on interior nodes.
  void apply_operator(const std::vector<double>& u, std::vector<double>& out) const {
    const std::size_t n = u.size();
    out.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = lower_[i] * u[i - 1] + diag_[i] * u[i] + upper_[i] * u[i + 1];
  }

  // out_i = (flux(u_{i+1}) - flux(u_{i-1})) / (2 dx).
  void convection(const std::vector<double>& u, std::vector<double>& out) {
    const std::size_t n = u.size();
    flux_.resize(n);
    for (std::size_t i = 0; i < n; ++i) flux_[i] = nl_.flux(u[i]);
    out.assign(n, 0.0);
    const double inv2dx = 1.0 / (2.0 * grid_.dx());
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (flux_[i + 1] - flux_[i - 1]) * inv2dx;
  }

  const TridiagonalSolver& implicit_solver(double dt) {
    for (auto& [h, solver] : factorizations_) {
      if (h == dt) return solver;
    }
    const std::size_t m = grid_.size() - 2;
    std::vector<double> lo(m), di(m), up(m);
    for (std::size_t k = 0; k < m; ++k) {
      lo[k] = -0.5 * dt * lower_[k + 1];
      di[k] = 1.0 - 0.5 * dt * diag_[k + 1];
      up[k] = -0.5 * dt * upper_[k + 1];
    }
    if (factorizations_.size() >= 4) factorizations_.erase(factorizations_.begin());
    factorizations_.emplace_back(dt, TridiagonalSolver(lo, di, up));
    return factorizations_.back().second;
  }

  void step_imex(std::vector<double>& u, double dt) {
    const std::size_t n = u.size();
    const TridiagonalSolver& solver = implicit_solver(dt);
    apply_operator(u, au_);
    const bool convective = !nl_.is_zero();
    if (convective) convection(u, c0_);

    rhs_.resize(n - 2);
    auto solve_into = [&](std::vector<double>& target, double c0_weight, const std::vector<double>* c1) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        double r = u[i] + 0.5 * dt * au_[i];
        if (convective) r += dt * c0_weight * c0_[i] + (c1 ? 0.5 * dt * (*c1)[i] : 0.0);
        rhs_[i - 1] = r;
      }
      solver.solve(rhs_);
      target.assign(n, 0.0);
      std::copy(rhs_.begin(), rhs_.end(), target.begin() + 1);
    };

    if (!convective) {
      solve_into(u, 0.0, nullptr);
      return;
    }
    solve_into(predictor_, 1.0, nullptr);
    convection(predictor_, c1_);
    solve_into(u, 0.5, &c1_);
  }

  void step_upwind(std::vector<double>& u, double dt) {
    const std::size_t n = u.size();
    const double dx = grid_.dx();
    apply_operator(u, au_);
    plus_.resize(n);
    minus_.resize(n);
    for (std::size_t i = 0; i < n; ++i) std::tie(plus_[i], minus_[i]) = nl_.split_flux(u[i]);
    // Engquist-Osher interface flux h_{i+1/2} = g+(u_i) + g-(u_{i+1}).
    flux_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) flux_[i] = plus_[i] + minus_[i + 1];
    predictor_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      predictor_[i] = u[i] + dt * au_[i] - dt / dx * (flux_[i] - flux_[i - 1]);
    }
    u.swap(predictor_);
  }

  Nonlinearity nl_;
  Grid1D grid_;
  Frame frame_;
  Scheme scheme_;
  std::vector<double> lower_, diag_, upper_;
  std::vector<std::pair<double, TridiagonalSolver>> factorizations_;
  std::vector<double> au_, c0_, c1_, flux_, rhs_, predictor_, plus_, minus_;
};

inline SolverState step_physical(SolverState state, const Nonlinearity& nl) {
  if (state.frame() != Frame::Physical) throw Error(ErrorKind::InvalidConfig, "step_physical needs a physical-frame field");
  Integrator integrator(nl, state.field.grid(), Frame::Physical, state.scheme);
  integrator.step(state.field, state.dt);
  ++state.step;
  return state;
}

inline SolverState step_similarity(SolverState state, const Nonlinearity& nl) {
  if (state.frame() != Frame::Similarity) throw Error(ErrorKind::InvalidConfig, "step_similarity needs a similarity-frame field");
  Integrator integrator(nl, state.field.grid(), Frame::Similarity, state.scheme);
  integrator.step(state.field, state.dt);
  ++state.step;
  return state;
}

// ---------------------------------------------------------------------------
// Runs

struct OutputSpec {
  // Snapshot every `cadence` steps of size dt (0 = unused).
  std::size_t cadence = 0;
  // Explicit snapshot times; takes precedence over cadence when non-empty.
  std::vector<double> times;
};

struct RunConfig {
  Grid1D grid;
  Nonlinearity nonlinearity;
  InitialData initial;
  double t_end = 1.0;
  double dt = 1e-3;
  Frame frame = Frame::Physical;
  Scheme scheme = Scheme::ImexCN;
  OutputSpec output;
  // Re-embed into a domain twice as wide (same node count) when the solution
  // approaches the boundary; dt is multiplied by grow_dt_factor each time.
  bool grow_domain = false;
  double grow_dt_factor = 1.0;
  // Snapshot boundary guard relative to the sup norm.
  double boundary_tol = 1e-10;
  // Overrides `initial` when set.
  std::optional<Field> initial_field;
};

struct SeriesRow {
  double t = 0.0;
  double mass = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double grad_l2 = 0.0;
  double grad_linf = 0.0;
};

struct Trajectory {
  std::vector<Field> snapshots;
  std::vector<SeriesRow> series;
  double initial_mass = 0.0;
  double max_mass_drift = 0.0;
  std::size_t steps = 0;
  std::size_t regrids = 0;

  double mass_drift_bound() const { return 1e-8 * (1.0 + std::abs(initial_mass)); }
  bool mass_conserved() const { return max_mass_drift <= mass_drift_bound(); }
};

inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw Error(ErrorKind::InvalidConfig, "log_spaced needs 0 < lo < hi, count >= 2");
  std::vector<double> t(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) t[k] = lo * std::exp(step * static_cast<double>(k));
  t.back() = hi;
  return t;
}

inline SeriesRow measure(const Field& u) {
  SeriesRow row;
  row.t = u.time();
  row.mass = trapezoid_integral(u);
  row.l1 = lp_norm(u, Lp(1));
  row.l2 = lp_norm(u, Lp(2));
  row.linf = lp_norm(u, Lp::inf());
  Field du = derivative(u);
  row.grad_l2 = lp_norm(du, Lp(2));
  row.grad_linf = lp_norm(du, Lp::inf());
  return row;
}

// Max |u| over the outer eighth of the grid on either side.
inline double edge_magnitude(const Field& u) {
  const std::size_t n = u.size();
  const std::size_t band = std::max<std::size_t>(2, n / 8);
  double m = 0.0;
  for (std::size_t i = 0; i < band; ++i) m = std::max({m, std::abs(u[i]), std::abs(u[n - 1 - i])});
  return m;
}

inline bool boundary_decayed(const Field& u, double tol) {
  const std::size_t n = u.size();
  const double peak = lp_norm(u, Lp::inf());
  const double edge = std::max({std::abs(u[0]), std::abs(u[1]), std::abs(u[n - 2]), std::abs(u[n - 1])});
  return edge <= tol * peak;
}

// Doubles the domain about its center with the same node count. New nodes
// coincide with every other old node and take full-weighting averages, which
// preserves the trapezoid mass when the boundary values vanish.
inline Field grow_domain(const Field& u) {
  const Grid1D& g = u.grid();
  const std::size_t n = g.size();
  if ((n - 1) % 2 != 0) throw Error(ErrorKind::InvalidConfig, "domain growth needs an odd node count");
  const double half = 0.5 * g.length();
  Grid1D wide(g.x_min() - half, g.x_max() + half, n);
  const long offset = static_cast<long>((n - 1) / 2);
  auto at = [&](long i) { return (i >= 0 && i < static_cast<long>(n)) ? u[static_cast<std::size_t>(i)] : 0.0; };
  std::vector<double> v(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    long i = 2 * static_cast<long>(j) - offset;
    v[j] = 0.25 * (at(i - 1) + 2.0 * at(i) + at(i + 1));
  }
  return Field(wide, std::move(v), u.time(), u.frame());
}

inline Field initial_field(const RunConfig& config) {
  Field u = config.initial_field ? *config.initial_field : make_initial(config.initial, config.grid);
  if (!(u.grid() == config.grid)) throw Error(ErrorKind::ShapeMismatch, "initial field grid differs from config grid");
  Field out(u.grid(), u.data(), 0.0, config.frame);
  // Dirichlet ends.
  out[0] = 0.0;
  out[out.size() - 1] = 0.0;
  return out;
}

inline void validate(const RunConfig& c) {
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw Error(ErrorKind::InvalidConfig, "dt must be > 0");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw Error(ErrorKind::InvalidConfig, "t_end must be > 0");
  if (c.output.times.empty() && c.output.cadence > 0) {
    double steps = c.t_end / c.dt;
    long rounded = std::lround(steps);
    if (std::abs(steps - static_cast<double>(rounded)) > 1e-9 * std::max(1.0, steps)) {
      throw Error(ErrorKind::InvalidConfig, "t_end is not a whole number of steps");
    }
    if (rounded % static_cast<long>(c.output.cadence) != 0) {
      throw Error(ErrorKind::InvalidConfig, "cadence does not divide the step count");
    }
  }
  if (c.grow_domain && c.frame != Frame::Physical) throw Error(ErrorKind::InvalidConfig, "domain growth is for physical runs");
  if (!(c.grow_dt_factor >= 1.0)) throw Error(ErrorKind::InvalidConfig, "grow_dt_factor must be >= 1");
}

inline std::vector<double> snapshot_schedule(const RunConfig& c) {
  std::vector<double> times;
  if (!c.output.times.empty()) {
    for (double t : c.output.times) {
      if (t > 0.0 && t <= c.t_end * (1.0 + 1e-12)) times.push_back(std::min(t, c.t_end));
    }
  } else if (c.output.cadence > 0) {
    long steps = std::lround(c.t_end / c.dt);
    for (long k = static_cast<long>(c.output.cadence); k <= steps; k += static_cast<long>(c.output.cadence)) {
      times.push_back(k == steps ? c.t_end : static_cast<double>(k) * c.dt);
    }
  }
  if (times.empty() || times.back() < c.t_end) times.push_back(c.t_end);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

namespace detail {

// Steps `fields` together from their common time to `target`.
template <class OnStep>
void advance_to(std::vector<Field*> fields, std::optional<Integrator>& integrator, const RunConfig& config,
                double& dt, double target, std::size_t& regrids, OnStep&& on_step) {
  const double eps = 1e-12 * std::max(1.0, std::abs(target));
  while (fields.front()->time() < target - eps) {
    const double h = std::min(dt, target - fields.front()->time());
    for (Field* f : fields) {
      integrator->step(*f, h);
    }
    on_step();
    if (config.grow_domain) {
      bool grow = false;
      for (Field* f : fields) {
        const double peak = lp_norm(*f, Lp::inf());
        grow = grow || edge_magnitude(*f) > config.boundary_tol * peak;
      }
      if (grow) {
        for (Field* f : fields) *f = grow_domain(*f);
        integrator.emplace(config.nonlinearity, fields.front()->grid(), config.frame, config.scheme);
        dt *= config.grow_dt_factor;
        ++regrids;
      }
    }
  }
  for (Field* f : fields) f->set_time(target);
}

}  // namespace detail

// Integrates config to t_end, recording a snapshot and norms at t = 0 and at
// every scheduled output time.
inline Trajectory run(const RunConfig& config) {
  validate(config);
  Field u = initial_field(config);
  std::optional<Integrator> integrator;
  integrator.emplace(config.nonlinearity, u.grid(), config.frame, config.scheme);

  Trajectory traj;
  traj.initial_mass = trapezoid_integral(u);
  traj.snapshots.push_back(u);
  traj.series.push_back(measure(u));

  double dt = config.dt;
  for (double target : snapshot_schedule(config)) {
    detail::advance_to({&u}, integrator, config, dt, target, traj.regrids, [&] {
      ++traj.steps;
      traj.max_mass_drift = std::max(traj.max_mass_drift, std::abs(trapezoid_integral(u) - traj.initial_mass));
    });
    if (!boundary_decayed(u, config.boundary_tol)) {
      throw Error(ErrorKind::DomainTooSmall, "solution reaches the boundary at t = " + std::to_string(u.time()));
    }
    traj.snapshots.push_back(u);
    traj.series.push_back(measure(u));
  }
  return traj;
}

struct ContractionSample {
  double t = 0.0;
  double distance = 0.0;
};

// Co-evolves u0 and v0 under config and records ||u(t) - v(t)||_1 after every step.
inline std::vector<ContractionSample> contraction_pair(const RunConfig& config, const Field& u0, const Field& v0) {
  require_same_grid(u0, v0, "contraction_pair");
  RunConfig cu = config;
  cu.initial_field = u0;
  validate(cu);
  Field u = initial_field(cu);
  cu.initial_field = v0;
  Field v = initial_field(cu);

  std::optional<Integrator> integrator;
  integrator.emplace(config.nonlinearity, u.grid(), config.frame, config.scheme);
  std::vector<ContractionSample> out{{0.0, lp_distance(u, v, Lp(1))}};
  double dt = config.dt;
  std::size_t regrids = 0;
  detail::advance_to({&u, &v}, integrator, config, dt, config.t_end, regrids,
                     [&] { out.push_back({u.time(), lp_distance(u, v, Lp(1))}); });
  out.back().t = config.t_end;
  return out;
}

}  // namespace cdasym
