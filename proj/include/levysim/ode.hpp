#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "levysim/linalg.hpp"

namespace levysim {

/// Adaptive Dormand-Prince 5(4) integration of x' = f(t, x) from t0 to t1.
/// Returns the state at t1; throws when the step size underflows.
template <class F>
Vec integrate_ode(const F& f, Vec x, double t0, double t1, double tol) {
  if (t1 <= t0) return x;
  // Dormand-Prince tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                   e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                   e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  double t = t0;
  double h = t1 - t0;
  Vec k1 = f(t, x);
  int halvings_in_a_row = 0;
  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    const Vec k2 = f(t + c2 * h, x + h * a21 * k1);
    const Vec k3 = f(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
    const Vec k4 = f(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = f(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = f(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec x5 = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = f(t + h, x5);
    const Vec err_v = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = err_v.norm_inf() / tol;
    if (err <= 1.0) {
      t += h;
      x = x5;
      k1 = k7;  // FSAL
      halvings_in_a_row = 0;
      const double grow = err > 1e-10 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::min(5.0, grow);
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
      if (++halvings_in_a_row > 60 || h < 1e-15 * (t1 - t0))
        throw std::runtime_error("integrate_ode: step size underflow");
    }
  }
  return x;
}

}  // namespace levysim
