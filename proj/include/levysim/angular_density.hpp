#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levysim/linalg.hpp"
#include "levysim/quadrature.hpp"

namespace levysim {

/// Angular part of the jump measure rho(y) dy / |y|^{d+alpha}: a weight on
/// the unit sphere together with its declared bounds. Zero-homogeneity holds
/// by construction because the density is stored as a direction-only
/// callable; evaluate_direction normalizes its argument before evaluating.
struct AngularDensity {
  int dimension = 1;
  std::function<double(const Vec&)> evaluate;  // argument is a unit vector
  double upper_bound = 1.0;                    // K >= sup rho
  double lower_bound = 1.0;                    // c0 > 0 when nondegeneracy is claimed
  bool symmetric = true;                       // rho(-theta) == rho(theta)
  std::optional<double> holder_beta;           // sphere-Holder exponent, metadata only
  std::string name = "custom";

  double evaluate_direction(const Vec& y) const {
    const double n = y.norm();
    if (!(n > 0.0)) throw std::invalid_argument("AngularDensity: zero vector has no direction");
    return evaluate(y * (1.0 / n));
  }

  /// Sphere mass m_rho = int_{S^{d-1}} rho(theta) dtheta.
  double sphere_mass() const {
    return sphere_integral(dimension, [&](const Vec& t) { return evaluate(t); });
  }

  /// int_{S^{d-1}} theta rho(theta) dtheta. Exactly zero for symmetric rho.
  Vec mean_direction() const {
    Vec v(dimension);
    if (symmetric) return v;
    for (int i = 0; i < dimension; ++i)
      v[i] = sphere_integral(dimension, [&](const Vec& t) { return t[i] * evaluate(t); });
    return v;
  }

  /// int_{S^{d-1}} theta theta^T rho(theta) dtheta (symmetric PSD).
  Mat direction_second_moment() const {
    Mat m(dimension);
    for (int i = 0; i < dimension; ++i)
      for (int j = i; j < dimension; ++j) {
        const double v =
            sphere_integral(dimension, [&](const Vec& t) { return t[i] * t[j] * evaluate(t); });
        m(i, j) = v;
        m(j, i) = v;
      }
    return m;
  }
};

inline AngularDensity make_isotropic(int dim, double value = 1.0) {
  if (!(value > 0.0)) throw std::invalid_argument("isotropic density: value must be positive");
  AngularDensity d;
  d.dimension = dim;
  d.evaluate = [value](const Vec&) { return value; };
  d.upper_bound = value;
  d.lower_bound = value;
  d.symmetric = true;
  d.name = "isotropic";
  return d;
}

/// rho(theta) = 1 + a cos(theta) on the circle (d=2); |a| < 1 keeps the
/// lower bound positive.
inline AngularDensity make_cosine_tilt(double a) {
  if (!(std::abs(a) < 1.0)) throw std::invalid_argument("cosine-tilt: |a| must be < 1");
  AngularDensity d;
  d.dimension = 2;
  d.evaluate = [a](const Vec& t) { return 1.0 + a * t[0]; };
  d.upper_bound = 1.0 + std::abs(a);
  d.lower_bound = 1.0 - std::abs(a);
  d.symmetric = (a == 0.0);
  d.holder_beta = 1.0;
  d.name = "cosine-tilt";
  return d;
}

/// Two-point density on S^0 (d=1) with weights w+ at +1 and w- at -1.
inline AngularDensity make_two_sided(double w_pos, double w_neg) {
  if (!(w_pos > 0.0 && w_neg > 0.0))
    throw std::invalid_argument("two-sided: weights must be positive");
  AngularDensity d;
  d.dimension = 1;
  d.evaluate = [w_pos, w_neg](const Vec& t) { return t[0] > 0.0 ? w_pos : w_neg; };
  d.upper_bound = std::max(w_pos, w_neg);
  d.lower_bound = std::min(w_pos, w_neg);
  d.symmetric = (w_pos == w_neg);
  d.name = "two-sided";
  return d;
}

namespace detail {

inline std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(':', pos);
    if (next == std::string::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

inline double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": cannot parse number '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument(what + ": trailing characters in '" + s + "'");
  return v;
}

}  // namespace detail

/// Built-in density registry: "isotropic", "cosine-tilt:<a>" (d=2),
/// "two-sided:<w+>:<w->" (d=1). The dimension argument is checked against
/// the family's requirement.
inline AngularDensity density_from_name(const std::string& name, int dim) {
  const auto parts = detail::split_colon(name);
  if (parts[0] == "isotropic") {
    if (parts.size() == 1) return make_isotropic(dim);
    if (parts.size() == 2)
      return make_isotropic(dim, detail::parse_double(parts[1], "isotropic"));
  } else if (parts[0] == "cosine-tilt") {
    if (parts.size() != 2) throw std::invalid_argument("cosine-tilt requires one parameter");
    if (dim != 2) throw std::invalid_argument("cosine-tilt is a d=2 density");
    return make_cosine_tilt(detail::parse_double(parts[1], "cosine-tilt"));
  } else if (parts[0] == "two-sided") {
    if (parts.size() != 3) throw std::invalid_argument("two-sided requires two parameters");
    if (dim != 1) throw std::invalid_argument("two-sided is a d=1 density");
    return make_two_sided(detail::parse_double(parts[1], "two-sided"),
                          detail::parse_double(parts[2], "two-sided"));
  }
  throw std::invalid_argument("unknown density '" + name + "'");
}

/// Quasi-random sweep over the sphere (golden-angle sequence) checking the
/// declared bounds and, when claimed, symmetry. Throws on violation.
inline void check_density_invariants(const AngularDensity& d, int n_points = 10000,
                                     double sym_tol = 1e-12) {
  constexpr double golden = 0.61803398874989484820;
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (int k = 0; k < n_points; ++k) {
    Vec theta(d.dimension);
    switch (d.dimension) {
      case 1:
        theta[0] = (k % 2 == 0) ? 1.0 : -1.0;
        break;
      case 2: {
        const double phi = two_pi * std::fmod(golden * k, 1.0);
        theta[0] = std::cos(phi);
        theta[1] = std::sin(phi);
        break;
      }
      default: {
        const double z = 2.0 * ((k + 0.5) / n_points) - 1.0;
        const double phi = two_pi * std::fmod(golden * k, 1.0);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        theta[0] = r * std::cos(phi);
        theta[1] = r * std::sin(phi);
        theta[2] = z;
        break;
      }
    }
    const double v = d.evaluate(theta);
    if (!(v >= d.lower_bound - 1e-12 && v <= d.upper_bound + 1e-12))
      throw std::runtime_error("angular density violates declared bounds");
    if (d.symmetric) {
      const double w = d.evaluate(theta * -1.0);
      if (std::abs(v - w) > sym_tol)
        throw std::runtime_error("angular density violates declared symmetry");
    }
  }
}

}  // namespace levysim
