#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "levysim/coefficients.hpp"
#include "levysim/driver.hpp"
#include "levysim/linalg.hpp"
#include "levysim/ode.hpp"

namespace levysim {

/// States X_{k/n}, k = 0..n, of one Euler run. Kahan compensation keeps the
/// 2^14-step recursions well below statistical error. A non-finite update
/// aborts the path; consumers count aborted paths rather than dropping them
/// silently.
struct EulerPath {
  int resolution = 0;
  int dim = 0;
  std::vector<double> states;  // (n+1) x dim
  bool aborted = false;
  int abort_step = -1;

  Vec state(int k) const {
    Vec v(dim);
    const double* p = states.data() + static_cast<std::size_t>(k) * dim;
    for (int i = 0; i < dim; ++i) v[i] = p[i];
    return v;
  }
};

/// Euler scheme on precomputed driver increments: the coefficients are
/// frozen at the left endpoint of each cell, so the recursion
/// X_{(k+1)/n} = X_{k/n} + b(X_{k/n})/n + G(X_{k/n}) dL_k reproduces the
/// scheme with no additional intra-cell error.
inline EulerPath euler_path_from_increments(const SdeCoefficients& coeffs,
                                            const GridIncrements& inc) {
  const int n = inc.resolution();
  const int d = coeffs.dim;
  if (inc.dim() != d) throw std::invalid_argument("euler: increment/coefficient dimension mismatch");
  const double h = 1.0 / n;

  EulerPath path;
  path.resolution = n;
  path.dim = d;
  path.states.resize(static_cast<std::size_t>(n + 1) * d);

  std::vector<KahanAccumulator> acc(static_cast<std::size_t>(d));
  Vec x = coeffs.x0;
  for (int i = 0; i < d; ++i) {
    acc[static_cast<std::size_t>(i)].value = x[i];
    path.states[static_cast<std::size_t>(i)] = x[i];
  }
  for (int k = 0; k < n; ++k) {
    const Vec b = coeffs.drift(x);
    const Mat g = coeffs.diffusion(x);
    const double* dl = inc.cell(k);
    bool finite = true;
    for (int i = 0; i < d; ++i) {
      double gi = 0.0;
      for (int j = 0; j < d; ++j) gi += g(i, j) * dl[j];
      acc[static_cast<std::size_t>(i)].add(b[i] * h + gi);
      const double v = acc[static_cast<std::size_t>(i)].value;
      path.states[static_cast<std::size_t>(k + 1) * d + i] = v;
      x[i] = v;
      finite &= std::isfinite(v);
    }
    if (!finite) {
      path.aborted = true;
      path.abort_step = k + 1;
      path.states.resize(static_cast<std::size_t>(k + 2) * d);
      break;
    }
  }
  return path;
}

/// Euler run of scheme (coefficients frozen on the grid {k/n}) at dyadic
/// resolution n on the given skeleton. Routes through the exact-marginal
/// sampler when the spec requests it.
inline EulerPath euler_path(const SdeCoefficients& coeffs, const PathSkeleton& skel,
                            const DriverSpec& spec, int n) {
  if (spec.exact_marginals)
    return euler_path_from_increments(
        coeffs, exact_stable_increments(skel.master_seed, skel.path_index, spec, n));
  return euler_path_from_increments(coeffs, driver_increments(skel, spec, n));
}

/// Fine-grid surrogate truth: the Euler run at the base resolution. The
/// scheme converges, so the base-grid path stands in for the solution as
/// long as experiment ladders stop a few levels short of it.
inline EulerPath reference_path(const SdeCoefficients& coeffs, const PathSkeleton& skel,
                                const DriverSpec& spec) {
  return euler_path(coeffs, skel, spec, spec.base_resolution());
}

/// Event-driven oracle for finite-activity (drop-mode) drivers: between
/// jumps the state follows dx/dt = b(x) - G(x) c with the compensator rate
/// c, integrated adaptively; at a jump x gains G(x-) y. Sampled on the base
/// grid, this is an independent ground truth for Euler error measurements.
inline EulerPath exact_finite_activity_path(const SdeCoefficients& coeffs,
                                            const PathSkeleton& skel, const DriverSpec& spec,
                                            double ode_tol = 1e-10) {
  if (spec.small_jump_mode != SmallJumpMode::drop)
    throw std::invalid_argument("exact_finite_activity_path: requires drop-mode skeleton");
  const int n = spec.base_resolution();
  const int d = coeffs.dim;
  const Vec comp = skel.compensator_drift;
  const auto rhs = [&](double, const Vec& x) {
    const Vec b = coeffs.drift(x);
    const Mat g = coeffs.diffusion(x);
    return b - g.apply(comp);
  };

  EulerPath path;
  path.resolution = n;
  path.dim = d;
  path.states.resize(static_cast<std::size_t>(n + 1) * d);

  Vec x = coeffs.x0;
  std::size_t jump_idx = 0;
  double t = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t_grid = static_cast<double>(k) / n;
    while (jump_idx < skel.jumps.size() && skel.jumps[jump_idx].time <= t_grid) {
      const Jump& j = skel.jumps[jump_idx];
      x = integrate_ode(rhs, x, t, j.time, ode_tol);
      x += coeffs.diffusion(x).apply(j.mark);
      t = j.time;
      ++jump_idx;
    }
    x = integrate_ode(rhs, x, t, t_grid, ode_tol);
    t = t_grid;
    for (int i = 0; i < d; ++i) path.states[static_cast<std::size_t>(k) * d + i] = x[i];
    if (!x.finite()) {
      path.aborted = true;
      path.abort_step = k;
      break;
    }
  }
  return path;
}

}  // namespace levysim
