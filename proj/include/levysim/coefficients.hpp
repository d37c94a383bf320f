#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levysim/levy_measure.hpp"
#include "levysim/linalg.hpp"
#include "levysim/rng.hpp"

namespace levysim {

/// Drift/diffusion pair with declared regularity constants. The constants
/// are contracts checked statistically by validate_coefficients, not proved.
/// Matrix norms are Frobenius throughout.
struct SdeCoefficients {
  int dim = 1;
  std::function<Vec(const Vec&)> drift;
  std::function<Mat(const Vec&)> diffusion;
  double beta = 1.0;                      // Holder exponent of the drift
  double drift_bound = 0.0;               // |b|_0
  double drift_holder = 0.0;              // [b]_beta
  double diffusion_bound = 0.0;           // sup ||G||_F
  double diffusion_lipschitz = 0.0;
  std::optional<double> nondegeneracy;    // c0 <= |det G| when claimed
  Vec x0;
  std::string name = "custom";
};

namespace detail {

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

inline double signed_power(double x, double beta) {
  return x >= 0.0 ? std::pow(x, beta) : -std::pow(-x, beta);
}

}  // namespace detail

/// Holder drift b_i(x) = clamp(sign(x_i - a_i) |x_i - a_i|^beta, +-1) with
/// G = I + 0.2 diag(tanh x). The clamp keeps b bounded; the offset (default
/// 0) places the Holder singularity on the typical path range.
inline SdeCoefficients make_holder_drift(int dim, double beta, const Vec& offset) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("holder-drift: beta must lie in (0,1)");
  SdeCoefficients c;
  c.dim = dim;
  c.beta = beta;
  c.drift = [beta, offset, dim](const Vec& x) {
    Vec b(dim);
    for (int i = 0; i < dim; ++i)
      b[i] = detail::clamp_unit(detail::signed_power(x[i] - offset[i], beta));
    return b;
  };
  c.diffusion = [dim](const Vec& x) {
    Mat g = Mat::identity(dim);
    for (int i = 0; i < dim; ++i) g(i, i) += 0.2 * std::tanh(x[i]);
    return g;
  };
  c.drift_bound = std::sqrt(static_cast<double>(dim));
  // signed power has Holder seminorm 2^{1-beta} per component
  c.drift_holder = std::pow(2.0, 1.0 - beta) * std::sqrt(static_cast<double>(dim));
  c.diffusion_bound = 1.2 * std::sqrt(static_cast<double>(dim));
  c.diffusion_lipschitz = 0.2;
  c.nondegeneracy = std::pow(0.8, dim);
  c.x0 = Vec::zero(dim);
  return c;
}

/// Lipschitz pair: b_i = sin 2x_i, G = I + 0.3 diag(sin(x/2)).
inline SdeCoefficients make_lipschitz(int dim) {
  SdeCoefficients c;
  c.dim = dim;
  c.beta = 1.0;
  c.drift = [dim](const Vec& x) {
    Vec b(dim);
    for (int i = 0; i < dim; ++i) b[i] = std::sin(2.0 * x[i]);
    return b;
  };
  c.diffusion = [dim](const Vec& x) {
    Mat g = Mat::identity(dim);
    for (int i = 0; i < dim; ++i) g(i, i) += 0.3 * std::sin(0.5 * x[i]);
    return g;
  };
  c.drift_bound = std::sqrt(static_cast<double>(dim));
  c.drift_holder = 2.0;
  c.diffusion_bound = 1.3 * std::sqrt(static_cast<double>(dim));
  c.diffusion_lipschitz = 0.15;
  c.nondegeneracy = std::pow(0.7, dim);
  c.x0 = Vec::zero(dim);
  return c;
}

/// Lipschitz pair whose diffusion loses rank at the origin (allowed by the
/// Lipschitz-case rates): G = diag(tanh x).
inline SdeCoefficients make_degenerate(int dim) {
  SdeCoefficients c;
  c.dim = dim;
  c.beta = 1.0;
  c.drift = [dim](const Vec& x) {
    Vec b(dim);
    for (int i = 0; i < dim; ++i) b[i] = 0.5 * std::cos(x[i]);
    return b;
  };
  c.diffusion = [dim](const Vec& x) {
    Mat g(dim);
    for (int i = 0; i < dim; ++i) g(i, i) = std::tanh(x[i]);
    return g;
  };
  c.drift_bound = 0.5 * std::sqrt(static_cast<double>(dim));
  c.drift_holder = 0.5;
  c.diffusion_bound = std::sqrt(static_cast<double>(dim));
  c.diffusion_lipschitz = 1.0;
  c.x0 = Vec::zero(dim);
  c.x0[0] = 0.5;
  return c;
}

inline SdeCoefficients make_constant(int dim, double b0, double g0) {
  SdeCoefficients c;
  c.dim = dim;
  c.beta = 1.0;
  c.drift = [dim, b0](const Vec&) {
    Vec b(dim);
    for (int i = 0; i < dim; ++i) b[i] = b0;
    return b;
  };
  c.diffusion = [dim, g0](const Vec&) { return g0 * Mat::identity(dim); };
  c.drift_bound = std::abs(b0) * std::sqrt(static_cast<double>(dim));
  c.drift_holder = 0.0;
  c.diffusion_bound = std::abs(g0) * std::sqrt(static_cast<double>(dim));
  c.diffusion_lipschitz = 0.0;
  if (g0 != 0.0) c.nondegeneracy = std::pow(std::abs(g0), dim);
  c.x0 = Vec::zero(dim);
  return c;
}

/// Registry: "holder-drift:<beta>", "lipschitz", "degenerate",
/// "constant:<b0>:<g0>".
inline SdeCoefficients builtin_coefficients(const std::string& name, int dim) {
  const auto parts = detail::split_colon(name);
  SdeCoefficients c;
  if (parts[0] == "holder-drift" && parts.size() == 2) {
    c = make_holder_drift(dim, detail::parse_double(parts[1], "holder-drift"), Vec::zero(dim));
  } else if (parts[0] == "lipschitz" && parts.size() == 1) {
    c = make_lipschitz(dim);
  } else if (parts[0] == "degenerate" && parts.size() == 1) {
    c = make_degenerate(dim);
  } else if (parts[0] == "constant" && parts.size() == 3) {
    c = make_constant(dim, detail::parse_double(parts[1], "constant"),
                      detail::parse_double(parts[2], "constant"));
  } else {
    throw std::invalid_argument("unknown coefficient family '" + name + "'");
  }
  c.name = name;
  return c;
}

/// Empirical regularity report over random point pairs. Pair separations are
/// log-uniform so the Holder quotient actually probes the singular scale.
struct RegularityReport {
  double drift_sup = 0.0;
  double holder_quotient_max = 0.0;
  double lipschitz_quotient_max = 0.0;
  double min_abs_det = std::numeric_limits<double>::infinity();
  bool all_finite = true;
  std::vector<std::string> violations;
  bool ok() const { return all_finite && violations.empty(); }
};

inline RegularityReport validate_coefficients(const SdeCoefficients& c, int n_samples,
                                              std::uint64_t seed = 0x5EEDC0FFEEULL) {
  if (n_samples < 1000)
    throw std::invalid_argument("validate_coefficients: need at least 1e3 samples");
  RegularityReport rep;
  RngStream rng(derive_key(seed, stream_tag::validate));
  for (int s = 0; s < n_samples; ++s) {
    Vec x(c.dim);
    for (int i = 0; i < c.dim; ++i) x[i] = 2.0 * rng.normal();
    const double delta = std::pow(10.0, -6.0 * rng.uniform());  // |x-y| in [1e-6, 1]
    Vec dir = uniform_direction(rng, c.dim);
    Vec y = x + dir * delta;

    const Vec bx = c.drift(x);
    const Vec by = c.drift(y);
    const Mat gx = c.diffusion(x);
    const Mat gy = c.diffusion(y);
    if (!bx.finite() || !gx.finite()) {
      rep.all_finite = false;
      continue;
    }
    rep.drift_sup = std::max(rep.drift_sup, bx.norm());
    const double dist = (y - x).norm();
    if (dist > 0.0) {
      rep.holder_quotient_max =
          std::max(rep.holder_quotient_max, (by - bx).norm() / std::pow(dist, c.beta));
      Mat dg = gy;
      dg += -1.0 * gx;
      rep.lipschitz_quotient_max = std::max(rep.lipschitz_quotient_max, dg.frobenius() / dist);
    }
    rep.min_abs_det = std::min(rep.min_abs_det, std::abs(gx.det()));
  }
  const double slack = 1.0 + 1e-6;
  if (rep.drift_sup > c.drift_bound * slack)
    rep.violations.push_back("drift bound exceeded: observed " + std::to_string(rep.drift_sup));
  if (c.drift_holder > 0.0 && rep.holder_quotient_max > c.drift_holder * slack)
    rep.violations.push_back("drift Holder constant exceeded: observed " +
                             std::to_string(rep.holder_quotient_max));
  if (rep.lipschitz_quotient_max > c.diffusion_lipschitz * slack)
    rep.violations.push_back("diffusion Lipschitz constant exceeded: observed " +
                             std::to_string(rep.lipschitz_quotient_max));
  if (c.nondegeneracy && rep.min_abs_det < *c.nondegeneracy / slack)
    rep.violations.push_back("nondegeneracy bound violated: observed min |det G| " +
                             std::to_string(rep.min_abs_det));
  return rep;
}

}  // namespace levysim
