#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>

#include "cdasym/error.hpp"

namespace cdasym {

// Convective flux of u_t - u_xx = d/dx flux(u).
//
//   PowerLaw(q, a): flux(u) = a |u|^{q-1} u
//   Linear(a):      flux(u) = a u
//   Custom:         flux(u) given directly, with its derivative
//
// drift() is flux'(0), the transport speed that can be removed by moving to
// the frame x -> x - drift * t.
class Nonlinearity {
 public:
  enum class Kind { PowerLaw, Linear, Custom };

  static Nonlinearity power_law(double q, double a) {
    if (!(q > 1.0) || !std::isfinite(q)) throw Error(ErrorKind::InvalidExponent, "power law requires q > 1");
    if (!std::isfinite(a)) throw Error(ErrorKind::InvalidConfig, "non-finite convection coefficient");
    Nonlinearity n;
    n.kind_ = Kind::PowerLaw;
    n.q_ = q;
    n.a_ = a;
    n.drift_ = 0.0;
    return n;
  }

  static Nonlinearity linear(double a) {
    if (!std::isfinite(a)) throw Error(ErrorKind::InvalidConfig, "non-finite convection coefficient");
    Nonlinearity n;
    n.kind_ = Kind::Linear;
    n.q_ = 1.0;
    n.a_ = a;
    n.drift_ = a;
    return n;
  }

  // No convection at all: the heat equation.
  static Nonlinearity none() { return linear(0.0); }

  static Nonlinearity custom(std::function<double(double)> flux, std::function<double(double)> dflux,
                             std::string name = "custom") {
    if (!flux || !dflux) throw Error(ErrorKind::InvalidConfig, "custom nonlinearity needs both callables");
    if (std::abs(flux(0.0)) > 1e-14) throw Error(ErrorKind::InvalidConfig, "custom flux must vanish at 0");
    // Odd fluxes like u |u|^{q-1} carry an O(h^{q-1}) central-difference
    // error, so several step sizes are tried.
    double b = dflux(0.0);
    bool agrees = false;
    for (double h : {1e-5, 1e-8, 1e-12, 1e-16}) {
      double fd = (flux(h) - flux(-h)) / (2.0 * h);
      if (std::abs(fd - b) <= 1e-8) agrees = true;
    }
    if (!agrees) {
      throw Error(ErrorKind::InvalidConfig, "custom derivative at 0 disagrees with finite difference");
    }
    Nonlinearity n;
    n.kind_ = Kind::Custom;
    n.q_ = 0.0;
    n.a_ = 1.0;
    n.drift_ = b;
    n.flux_ = std::move(flux);
    n.dflux_ = std::move(dflux);
    n.name_ = std::move(name);
    return n;
  }

  Kind kind() const noexcept { return kind_; }
  double q() const noexcept { return q_; }
  double a() const noexcept { return a_; }
  double drift() const noexcept { return drift_; }
  bool is_zero() const noexcept { return kind_ != Kind::Custom && a_ == 0.0; }

  double flux(double u) const {
    switch (kind_) {
      case Kind::PowerLaw:
        if (q_ == 2.0) return a_ * std::abs(u) * u;
        return a_ * std::copysign(std::pow(std::abs(u), q_), u);
      case Kind::Linear: return a_ * u;
      case Kind::Custom: return flux_(u);
    }
    return 0.0;
  }

  double dflux(double u) const {
    switch (kind_) {
      case Kind::PowerLaw:
        if (q_ == 2.0) return 2.0 * a_ * std::abs(u);
        return a_ * q_ * std::pow(std::abs(u), q_ - 1.0);
      case Kind::Linear: return a_;
      case Kind::Custom: return dflux_(u);
    }
    return 0.0;
  }

  // Split of g = -flux into nondecreasing and nonincreasing parts,
  // g(u) = g_plus(u) + g_minus(u), used by the Engquist-Osher flux.
  std::pair<double, double> split_flux(double u) const {
    if (kind_ != Kind::Custom) {
      double g = -flux(u);
      return a_ <= 0.0 ? std::pair{g, 0.0} : std::pair{0.0, g};
    }
    // 8-point Gauss-Legendre on [0, u].
    static constexpr std::array<double, 4> node{0.1834346424956498, 0.5255324099163290,
                                                0.7966664774136267, 0.9602898564975363};
    static constexpr std::array<double, 4> weight{0.3626837833783620, 0.3137066458778873,
                                                  0.2223810344533745, 0.1012285362903763};
    double plus = 0.0, minus = 0.0;
    const double half = 0.5 * u;
    for (std::size_t k = 0; k < node.size(); ++k) {
      for (double sgn : {-1.0, 1.0}) {
        double gp = -dflux_(half * (1.0 + sgn * node[k]));
        plus += weight[k] * std::max(gp, 0.0);
        minus += weight[k] * std::min(gp, 0.0);
      }
    }
    return {plus * half, minus * half};
  }

  // The same nonlinearity with the linear part at 0 removed.
  Nonlinearity without_drift() const {
    if (drift_ == 0.0) return *this;
    if (kind_ == Kind::Linear) return none();
    auto f = flux_;
    auto df = dflux_;
    double b = drift_;
    return custom([f, b](double u) { return f(u) - b * u; }, [df, b](double u) { return df(u) - b; },
                  name_ + " - drift");
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::PowerLaw: os << "power_law(q=" << q_ << ", a=" << a_ << ")"; break;
      case Kind::Linear: os << "linear(a=" << a_ << ")"; break;
      case Kind::Custom: os << name_; break;
    }
    return os.str();
  }

 private:
  Nonlinearity() = default;

  Kind kind_ = Kind::Linear;
  double q_ = 1.0;
  double a_ = 0.0;
  double drift_ = 0.0;
  std::function<double(double)> flux_;
  std::function<double(double)> dflux_;
  std::string name_;
};

}  // namespace cdasym
