#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "kgspec/numerics.hpp"

namespace kgspec {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double min_dt = 1e-13;
  long max_steps = 200'000'000;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) driver with a caller-supplied step cap.
///
/// The cap is re-evaluated before every trial step, which is how callers bound
/// the step by a fraction of the local oscillation period. The driver is
/// restartable: `advance` may be called repeatedly on consecutive intervals
/// and keeps its step-size guess between calls.
template <std::size_t N>
class AdaptiveIntegrator {
 public:
  using state_type = std::array<double, N>;

  explicit AdaptiveIntegrator(OdeOptions opt = {})
      : opt_(opt),
        stepper_(boost::numeric::odeint::make_controlled(
            opt.abs_tol, opt.rel_tol,
            boost::numeric::odeint::runge_kutta_fehlberg78<state_type>())) {}

  template <class Rhs, class MaxDt>
  void advance(Rhs&& rhs, state_type& x, double& t, double t_end,
               MaxDt&& max_dt) {
    namespace odeint = boost::numeric::odeint;
    if (t_end < t) throw DomainError("integration must move forward in time");
    auto system = [&rhs](const state_type& y, state_type& dy, double tt) {
      rhs(y, dy, tt);
    };
    while (t < t_end) {
      double cap = std::min(max_dt(t), t_end - t);
      if (dt_ <= 0.0 || dt_ > cap) dt_ = cap;
      const bool last = dt_ >= t_end - t;
      double dt = last ? t_end - t : dt_;
      const double t_before = t;
      odeint::controlled_step_result res = stepper_.try_step(system, x, t, dt);
      if (res == odeint::success) {
        ++steps_;
        if (last || t_end - t <= 1e-13 * std::max(1.0, std::abs(t_end))) t = t_end;
        if (!last) dt_ = dt;
      } else {
        dt_ = dt;
        t = t_before;
        if (dt_ < opt_.min_dt * std::max(1.0, std::abs(t))) {
          throw NumericalError("ODE step underflow at t = " + std::to_string(t));
        }
      }
      if (steps_ > opt_.max_steps) {
        throw NumericalError("ODE step budget exhausted at t = " + std::to_string(t));
      }
      for (double v : x) {
        if (!std::isfinite(v)) {
          throw NumericalError("ODE state became non-finite at t = " + std::to_string(t));
        }
      }
    }
  }

  template <class Rhs>
  void advance(Rhs&& rhs, state_type& x, double& t, double t_end) {
    advance(std::forward<Rhs>(rhs), x, t, t_end,
            [](double) { return std::numeric_limits<double>::infinity(); });
  }

  long steps() const { return steps_; }
  double dt_guess() const { return dt_; }

 private:
  using controlled_type = decltype(boost::numeric::odeint::make_controlled(
      0.0, 0.0, boost::numeric::odeint::runge_kutta_fehlberg78<state_type>()));
  OdeOptions opt_;
  controlled_type stepper_;
  double dt_ = 0.0;
  long steps_ = 0;
};

/// Packs a complex 2x2 matrix into 8 reals and back.
inline std::array<double, 8> pack(const Mat2c& m) {
  return {m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(),
          m(1, 0).real(), m(1, 0).imag(), m(1, 1).real(), m(1, 1).imag()};
}

template <std::size_t N>
inline Mat2c unpack(const std::array<double, N>& s, std::size_t off = 0) {
  Mat2c m;
  m << cplx(s[off + 0], s[off + 1]), cplx(s[off + 2], s[off + 3]),
      cplx(s[off + 4], s[off + 5]), cplx(s[off + 6], s[off + 7]);
  return m;
}

template <std::size_t N>
inline void pack_into(const Mat2c& m, std::array<double, N>& s, std::size_t off = 0) {
  const auto p = pack(m);
  for (std::size_t i = 0; i < 8; ++i) s[off + i] = p[i];
}

}  // namespace kgspec
