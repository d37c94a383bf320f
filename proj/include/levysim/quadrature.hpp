#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "levysim/linalg.hpp"

namespace levysim {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // the relative floor keeps rounding noise in f from driving refinement
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol ||
      std::abs(delta) <= 4e-16 * (std::abs(left) + std::abs(right)))
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson rule with Richardson correction.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, int max_depth = 48) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Gauss-Legendre nodes and weights on [-1,1], computed by Newton iteration
/// on the Legendre recurrence.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(3.141592653589793238462643383279 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  return {x, w};
}

/// Integral of f over the unit sphere S^{d-1} in ambient dimension d.
/// d=1 sums the two-point sphere, d=2 uses the periodic trapezoid rule,
/// d=3 a product Gauss(cos latitude) x trapezoid(azimuth) rule. Refinement
/// continues until the relative change drops below rel_tol; hitting the cap
/// signals a pathological integrand.
template <class F>
double sphere_integral(int dim, const F& f, double rel_tol = 1e-8) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  switch (dim) {
    case 1: {
      Vec plus(1), minus(1);
      plus[0] = 1.0;
      minus[0] = -1.0;
      return f(plus) + f(minus);
    }
    case 2: {
      double prev = 0.0;
      for (int m = 32; m <= (1 << 20); m *= 2) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) {
          const double phi = two_pi * k / m;
          Vec theta(2);
          theta[0] = std::cos(phi);
          theta[1] = std::sin(phi);
          s += f(theta);
        }
        s *= two_pi / m;
        if (m > 32 && std::abs(s - prev) <= rel_tol * std::abs(s) + 1e-13) return s;
        prev = s;
      }
      throw std::runtime_error("sphere_integral: refinement cap reached on S^1");
    }
    case 3: {
      double prev = 0.0;
      for (int n = 16; n <= 4096; n *= 2) {
        const auto [xs, ws] = gauss_legendre(n);
        const int m = 2 * n;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          const double z = xs[static_cast<std::size_t>(i)];
          const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
          double ring = 0.0;
          for (int k = 0; k < m; ++k) {
            const double phi = two_pi * k / m;
            Vec theta(3);
            theta[0] = r * std::cos(phi);
            theta[1] = r * std::sin(phi);
            theta[2] = z;
            ring += f(theta);
          }
          s += ws[static_cast<std::size_t>(i)] * ring * two_pi / m;
        }
        if (n > 16 && std::abs(s - prev) <= rel_tol * std::abs(s) + 1e-13) return s;
        prev = s;
      }
      throw std::runtime_error("sphere_integral: refinement cap reached on S^2");
    }
    default:
      throw std::invalid_argument("sphere_integral: ambient dimension must be 1..3");
  }
}

/// c_alpha = 2 * int_0^inf (1 - cos v) v^{-1-alpha} dv for alpha in (1,2).
/// Head [0,1] is regularized by the substitution v = u^{1/(2-alpha)}; the
/// tail beyond V is handled by two integrations by parts (remainder
/// O(V^{-2-alpha})). Links the unit isotropic jump measure in d=1 to the
/// marginal characteristic function exp(-t c_alpha |u|^alpha).
inline double stable_scale_constant(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw std::invalid_argument("stable_scale_constant: alpha must be in (1,2)");
  // series branch reaches v = 0.5: the direct difference loses ~9 digits
  // near v = 1e-4 and adaptive refinement would chase that noise
  const auto one_minus_cos = [](double v) {
    if (v < 0.5) {
      const double v2 = v * v;
      return 0.5 * v2 *
             (1.0 - v2 / 12.0 * (1.0 - v2 / 30.0 * (1.0 - v2 / 56.0 * (1.0 - v2 / 90.0))));
    }
    return 1.0 - std::cos(v);
  };
  const double pw = 1.0 / (2.0 - alpha);
  const auto head_integrand = [&](double u) {
    if (u <= 0.0) return 0.5 * pw;
    const double v = std::pow(u, pw);
    return one_minus_cos(v) * std::pow(v, -1.0 - alpha) * pw * std::pow(u, pw - 1.0);
  };
  const double head = adaptive_simpson(head_integrand, 0.0, 1.0, 1e-13);

  // Tail over [1, V] in per-period blocks (one global interval over many
  // oscillations can alias to a spuriously small error estimate), then the
  // remainder beyond V by four integrations by parts: the leftover integral
  // is bounded by ~60 V^{-4-alpha}, below 1e-11 at V ~ 240.
  const double cut = 1.0 + 38.0 * 6.283185307179586476925286766559;
  const auto tail_integrand = [&](double v) { return one_minus_cos(v) * std::pow(v, -1.0 - alpha); };
  KahanAccumulator tail;
  {
    const int blocks = 38;
    double lo = 1.0;
    for (int k = 0; k < blocks; ++k) {
      const double hi = 1.0 + (cut - 1.0) * (k + 1.0) / blocks;
      tail.add(adaptive_simpson(tail_integrand, lo, hi, 1e-14));
      lo = hi;
    }
  }
  {
    const double V = cut;
    const double s = std::sin(V), c = std::cos(V);
    const double a1 = 1.0 + alpha, a2 = 2.0 + alpha, a3 = 3.0 + alpha;
    // J = int_V^inf cos(v) v^{-1-alpha} dv expanded by parts
    const double j = -s * std::pow(V, -a1) + a1 * c * std::pow(V, -a2) +
                     a1 * a2 * s * std::pow(V, -a3) - a1 * a2 * a3 * c * std::pow(V, -4.0 - alpha);
    tail.add(std::pow(V, -alpha) / alpha - j);
  }
  return 2.0 * (head + tail.value);
}

}  // namespace levysim
