#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "levysim/angular_density.hpp"
#include "levysim/linalg.hpp"
#include "levysim/rng.hpp"

namespace levysim {

/// Stability index together with the driver flavor. alpha = 1 without
/// truncation is only defined for symmetric densities.
struct StableIndex {
  double alpha = 1.5;
  bool truncated = false;
};

inline void validate_index(const StableIndex& idx, const AngularDensity& density) {
  if (!(idx.alpha >= 1.0 && idx.alpha < 2.0))
    throw std::invalid_argument("StableIndex: alpha must lie in [1,2)");
  if (idx.alpha == 1.0 && !idx.truncated && !density.symmetric)
    throw std::invalid_argument(
        "StableIndex: alpha = 1 with the nontruncated driver requires a symmetric density (sym)");
}

/// Uniform direction on S^{d-1}.
inline Vec uniform_direction(RngStream& rng, int dim) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  Vec theta(dim);
  switch (dim) {
    case 1:
      theta[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
      return theta;
    case 2: {
      const double phi = two_pi * rng.uniform();
      theta[0] = std::cos(phi);
      theta[1] = std::sin(phi);
      return theta;
    }
    default: {
      const double z = 2.0 * rng.uniform() - 1.0;
      const double phi = two_pi * rng.uniform();
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      theta[0] = r * std::cos(phi);
      theta[1] = r * std::sin(phi);
      theta[2] = z;
      return theta;
    }
  }
}

/// Direction with law rho(theta)/m_rho, by rejection against the uniform
/// sphere law with acceptance probability rho/K. A stuck acceptance loop
/// means the declared upper bound underestimates sup rho.
inline Vec sample_direction(RngStream& rng, const AngularDensity& density) {
  if (!(density.upper_bound > 0.0) || !std::isfinite(density.upper_bound))
    throw std::invalid_argument("sample_direction: upper_bound must be positive and finite");
  for (long attempt = 0; attempt < 1000000; ++attempt) {
    Vec theta = uniform_direction(rng, density.dimension);
    const double u = rng.uniform();
    if (u * density.upper_bound <= density.evaluate(theta)) return theta;
  }
  throw std::runtime_error(
      "sample_direction: acceptance loop exceeded 1e6 proposals; upper_bound inconsistent");
}

/// Inverse CDF of the radial density ~ r^{-1-alpha} on [r_min, r_max];
/// r_max may be infinite.
inline double radius_inverse_cdf(double u, double alpha, double r_min, double r_max) {
  const double a = std::pow(r_min, -alpha);
  const double b = std::isinf(r_max) ? 0.0 : std::pow(r_max, -alpha);
  return std::pow(a - u * (a - b), -1.0 / alpha);
}

inline double sample_radius(RngStream& rng, double alpha, double r_min, double r_max) {
  if (!(r_min > 0.0)) throw std::invalid_argument("sample_radius: r_min must be positive");
  if (!(r_min < r_max)) throw std::invalid_argument("sample_radius: r_min must be below r_max");
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_radius: alpha must be positive");
  return radius_inverse_cdf(rng.uniform(), alpha, r_min, r_max);
}

/// Total mass of the jump measure on {epsilon < |y| <= r_max}:
/// lambda = m_rho (eps^-alpha - r_max^-alpha) / alpha.
inline double jump_intensity(const AngularDensity& density, double alpha, double epsilon,
                             double r_max) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("jump_intensity: epsilon must be positive");
  if (!(epsilon <= r_max)) throw std::invalid_argument("jump_intensity: epsilon must not exceed r_max");
  if (!(alpha > 0.0)) throw std::invalid_argument("jump_intensity: alpha must be positive");
  if (epsilon == r_max) return 0.0;
  const double tail = std::isinf(r_max) ? 0.0 : std::pow(r_max, -alpha);
  return density.sphere_mass() * (std::pow(epsilon, -alpha) - tail) / alpha;
}

/// Covariance of the compensated jumps below the cutoff, plus the sphere
/// mass. Sigma(eps) = eps^{2-alpha}/(2-alpha) * int theta theta^T rho.
struct SmallJumpMoments {
  double epsilon = 0.0;
  Mat covariance;
  double mass_sphere = 0.0;
};

inline SmallJumpMoments small_jump_moments(const AngularDensity& density, double alpha,
                                           double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("small_jump_moments: epsilon must lie in (0,1]");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("small_jump_moments: alpha must lie in (0,2)");
  SmallJumpMoments m;
  m.epsilon = epsilon;
  m.mass_sphere = density.sphere_mass();
  m.covariance = density.direction_second_moment();
  m.covariance *= std::pow(epsilon, 2.0 - alpha) / (2.0 - alpha);
  return m;
}

/// c = int_{|y|>1} y rho(y) |y|^{-d-alpha} dy = mean_direction / (alpha-1)
/// for alpha in (1,2). For alpha = 1 the big jumps are never compensated;
/// the nontruncated driver then requires symmetry and the result is zero.
inline Vec big_jump_compensator(const AngularDensity& density, double alpha,
                                bool truncated = false) {
  if (!(alpha >= 1.0 && alpha < 2.0))
    throw std::invalid_argument("big_jump_compensator: alpha must lie in [1,2)");
  if (alpha == 1.0) {
    if (!truncated && !density.symmetric)
      throw std::invalid_argument(
          "big_jump_compensator: alpha = 1 nontruncated driver undefined for asymmetric density");
    return Vec::zero(density.dimension);
  }
  Vec c = density.mean_direction();
  c *= 1.0 / (alpha - 1.0);
  return c;
}

/// int_{lo < |y| <= hi} y rho(y)|y|^{-d-alpha} dy. The radial factor is
/// (lo^{1-alpha} - hi^{1-alpha})/(alpha-1) for alpha > 1 and log(hi/lo) at
/// alpha = 1. hi may be infinite only when alpha > 1.
inline Vec compensator_between(const AngularDensity& density, double alpha, double lo, double hi) {
  if (!(lo > 0.0 && lo <= hi)) throw std::invalid_argument("compensator_between: need 0 < lo <= hi");
  if (density.symmetric) return Vec::zero(density.dimension);
  double radial = 0.0;
  if (alpha > 1.0) {
    const double top = std::isinf(hi) ? 0.0 : std::pow(hi, 1.0 - alpha);
    radial = (std::pow(lo, 1.0 - alpha) - top) / (alpha - 1.0);
  } else {
    if (std::isinf(hi))
      throw std::invalid_argument("compensator_between: diverges for alpha = 1 with hi = inf");
    radial = std::log(hi / lo);
  }
  Vec c = density.mean_direction();
  c *= radial;
  return c;
}

}  // namespace levysim
