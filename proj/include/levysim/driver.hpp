#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "levysim/levy_measure.hpp"
#include "levysim/linalg.hpp"
#include "levysim/quadrature.hpp"
#include "levysim/rng.hpp"

namespace levysim {

enum class SmallJumpMode { gaussian_surrogate, drop };

/// Configuration of one driving-noise law on the unit horizon. The base grid
/// {k/2^J} is the finest resolution at which paths are realized; every
/// coarser dyadic grid sees exact block sums of the same realization.
struct DriverSpec {
  StableIndex index;
  AngularDensity density;
  double epsilon_cut = 1e-3;
  SmallJumpMode small_jump_mode = SmallJumpMode::gaussian_surrogate;
  int base_log2 = 14;
  bool exact_marginals = false;

  double r_max() const {
    return index.truncated ? 1.0 : std::numeric_limits<double>::infinity();
  }
  int base_resolution() const { return 1 << base_log2; }

  void validate() const {
    validate_index(index, density);
    if (!(epsilon_cut > 0.0 && epsilon_cut <= 1.0))
      throw std::invalid_argument("DriverSpec: epsilon_cut must lie in (0,1]");
    if (base_log2 < 6 || base_log2 > 24)
      throw std::invalid_argument("DriverSpec: base_log2 must lie in [6,24]");
    if (exact_marginals) {
      if (density.dimension != 1 || index.truncated || !(index.alpha > 1.0))
        throw std::invalid_argument(
            "DriverSpec: exact_marginals requires d=1, alpha in (1,2), nontruncated driver");
      Vec plus(1), minus(1);
      plus[0] = 1.0;
      minus[0] = -1.0;
      if (density.evaluate(plus) != density.evaluate(minus))
        throw std::invalid_argument("DriverSpec: exact_marginals requires a constant density");
    }
  }
};

/// Driver increments on a dyadic grid, flat storage (resolution x dim).
class GridIncrements {
 public:
  GridIncrements() : dim_(0), res_(0) {}
  GridIncrements(int dim, int resolution)
      : dim_(dim), res_(resolution),
        data_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(resolution), 0.0) {}

  int dim() const { return dim_; }
  int resolution() const { return res_; }
  const double* cell(int k) const { return data_.data() + static_cast<std::size_t>(k) * dim_; }
  double* cell(int k) { return data_.data() + static_cast<std::size_t>(k) * dim_; }

  Vec cell_vec(int k) const {
    Vec v(dim_);
    const double* p = cell(k);
    for (int i = 0; i < dim_; ++i) v[i] = p[i];
    return v;
  }
  void add_to_cell(int k, const Vec& y) {
    double* p = cell(k);
    for (int i = 0; i < dim_; ++i) p[i] += y[i];
  }

  /// Pairwise aggregation to half the resolution: coarse cell k is computed
  /// as exactly fine[2k] + fine[2k+1], so the grid-coupling identity holds
  /// bit-for-bit.
  GridIncrements halved() const {
    GridIncrements out(dim_, res_ / 2);
    for (int k = 0; k < res_ / 2; ++k) {
      const double* a = cell(2 * k);
      const double* b = cell(2 * k + 1);
      double* o = out.cell(k);
      for (int i = 0; i < dim_; ++i) o[i] = a[i] + b[i];
    }
    return out;
  }

  /// Compensated per-component total over all cells.
  Vec total() const {
    Vec t(dim_);
    for (int i = 0; i < dim_; ++i) {
      KahanAccumulator acc;
      for (int k = 0; k < res_; ++k) acc.add(cell(k)[i]);
      t[i] = acc.value;
    }
    return t;
  }

 private:
  int dim_, res_;
  std::vector<double> data_;
};

/// Dyadic Gaussian field over [0,1): increments of a Brownian-type process
/// with covariance sigma per unit time, built by midpoint bisection. Every
/// node's split variable is keyed by the node index, so a rebuild at a
/// deeper base level refines the same realization and block sums stay
/// consistent across levels.
class DyadicBridge {
 public:
  DyadicBridge() : dim_(0), key_(0) {}
  DyadicBridge(std::uint64_t key, const Mat& covariance_per_unit_time)
      : dim_(covariance_per_unit_time.dim()), key_(key),
        chol_(covariance_per_unit_time.cholesky()) {}

  int dim() const { return dim_; }

  /// Adds all 2^J leaf increments into the cells of out.
  void add_leaves(int level, GridIncrements& out) const {
    descend(root_increment(), 0, 0, level, out);
  }

  /// Increment over [0, k/2^level); O(level) node evaluations along the
  /// bisection path, consistent with the materialized leaves.
  Vec prefix(int level, std::uint64_t k) const {
    if (k > (1ULL << level)) throw std::invalid_argument("DyadicBridge::prefix: k out of range");
    if (k == (1ULL << level)) return root_increment();  // the whole horizon
    Vec acc(dim_);
    Vec inc = root_increment();
    for (int l = 0; l < level; ++l) {
      const std::uint64_t cell = k >> (level - l);
      const Vec xi = split_draw(l, cell);
      if (((k >> (level - 1 - l)) & 1ULL) != 0) {
        acc += 0.5 * inc + xi;      // whole left child lies inside [0, k/2^level)
        inc = 0.5 * inc - xi;
      } else {
        inc = 0.5 * inc + xi;
      }
    }
    return acc;
  }

 private:
  Vec gauss_vec(std::uint64_t node_key) const {
    RngStream s(derive_key(key_, stream_tag::bridge, node_key));
    Vec z(dim_);
    for (int i = 0; i < dim_; ++i) z[i] = s.normal();
    return chol_.apply(z);
  }

  Vec root_increment() const { return gauss_vec(0); }

  // Split draw of the node (level l, cell c): N(0, Sigma * width/4), keyed by
  // the heap index so refinement reuses the realization.
  Vec split_draw(int level, std::uint64_t cell) const {
    const std::uint64_t heap = (1ULL << level) + cell;
    const double scale = 0.5 * std::pow(2.0, -0.5 * level);
    return scale * gauss_vec(heap);
  }

  void descend(const Vec& inc, int level, std::uint64_t cell, int target,
               GridIncrements& out) const {
    if (level == target) {
      out.add_to_cell(static_cast<int>(cell), inc);
      return;
    }
    const Vec xi = split_draw(level, cell);
    descend(0.5 * inc + xi, level + 1, 2 * cell, target, out);
    descend(0.5 * inc - xi, level + 1, 2 * cell + 1, target, out);
  }

  int dim_;
  std::uint64_t key_;
  Mat chol_;
};

struct Jump {
  double time = 0.0;
  Vec mark;
};

/// One realization of the driving noise, reproducible from
/// (master_seed, path_index, spec). Jumps above the cutoff are explicit;
/// the compensated sub-cutoff activity is carried by the Gaussian bridge
/// (or absent in drop mode); the compensator drift is per unit time.
struct PathSkeleton {
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;
  std::vector<Jump> jumps;       // time-ordered, radii in (epsilon_cut, r_max]
  Vec compensator_drift;         // per unit time
  DyadicBridge small_bridge;     // present iff gaussian_surrogate mode
  bool has_bridge = false;
  double time_cutoff = 1.0;      // jumps generated on [0, time_cutoff)

  /// The compensated small-jump surrogate per base cell (zero in drop mode).
  GridIncrements base_small_increments(int base_log2, int dim) const {
    GridIncrements out(dim, 1 << base_log2);
    if (has_bridge) small_bridge.add_leaves(base_log2, out);
    return out;
  }
};

namespace detail {

struct JumpShell {
  std::uint64_t key;
  double lo, hi;
  double lambda;
};

/// Radial shells partitioning (epsilon, r_max]: dyadic below 1 plus one tail
/// shell above 1. Keying streams by shell makes realizations with different
/// cutoffs share all jumps in the shells they have in common.
inline std::vector<JumpShell> make_shells(double sphere_mass, double alpha, double epsilon,
                                          double r_max) {
  std::vector<JumpShell> shells;
  const auto lambda_between = [&](double lo, double hi) {
    const double tail = std::isinf(hi) ? 0.0 : std::pow(hi, -alpha);
    return sphere_mass * (std::pow(lo, -alpha) - tail) / alpha;
  };
  if (std::isinf(r_max)) {
    shells.push_back({0xFFFFULL, 1.0, r_max, lambda_between(1.0, r_max)});
  }
  for (int k = 0;; ++k) {
    const double hi = std::pow(2.0, -k);
    if (hi <= epsilon) break;
    const double lo = std::max(epsilon, 0.5 * hi);
    const double lam = lambda_between(lo, hi);
    if (lam > 0.0) shells.push_back({static_cast<std::uint64_t>(k), lo, hi, lam});
  }
  return shells;
}

/// Jump times landing exactly on a dyadic point of resolution 2^26 (or
/// coarser) are re-drawn; cell assignment is then unambiguous for every
/// supported base grid.
inline bool on_fine_dyadic_grid(double t) {
  const double scaled = std::ldexp(t, 26);
  return scaled == std::floor(scaled);
}

}  // namespace detail

/// Builds the noise realization. time_cutoff < 1 restricts jump generation
/// to [0, time_cutoff); by the restriction property of Poisson measures the
/// skeleton restricted to that window is unchanged, which the driver-moment
/// experiments exploit.
inline PathSkeleton build_skeleton(std::uint64_t master_seed, std::uint64_t path_index,
                                   const DriverSpec& spec, double time_cutoff = 1.0) {
  spec.validate();
  if (!(time_cutoff > 0.0 && time_cutoff <= 1.0))
    throw std::invalid_argument("build_skeleton: time_cutoff must lie in (0,1]");
  const int dim = spec.density.dimension;
  const double alpha = spec.index.alpha;

  PathSkeleton skel;
  skel.master_seed = master_seed;
  skel.path_index = path_index;
  skel.time_cutoff = time_cutoff;

  const double sphere_mass = spec.density.sphere_mass();
  const auto shells = detail::make_shells(sphere_mass, alpha, spec.epsilon_cut, spec.r_max());
  double expected = 0.0;
  for (const auto& sh : shells) expected += sh.lambda;
  skel.jumps.reserve(static_cast<std::size_t>(expected * time_cutoff * 1.2) + 16);

  for (const auto& sh : shells) {
    RngStream rng(derive_key(master_seed, path_index, stream_tag::jumps, sh.key));
    double t = 0.0;
    while (true) {
      double next = t + rng.exponential() / sh.lambda;
      while (detail::on_fine_dyadic_grid(next)) next = t + rng.exponential() / sh.lambda;
      t = next;
      if (t >= time_cutoff) break;
      const double r = radius_inverse_cdf(rng.uniform(), alpha, sh.lo, sh.hi);
      Jump j;
      j.time = t;
      j.mark = sample_direction(rng, spec.density) * r;
      skel.jumps.push_back(j);
    }
  }
  std::stable_sort(skel.jumps.begin(), skel.jumps.end(),
                   [](const Jump& a, const Jump& b) { return a.time < b.time; });

  // Compensator of the explicit jumps: everything above the cutoff for
  // alpha > 1, only radii <= 1 at alpha = 1 (big jumps are not compensated
  // there). Exactly zero for symmetric densities.
  if (spec.density.symmetric) {
    skel.compensator_drift = Vec::zero(dim);
  } else {
    const double top = (alpha > 1.0) ? spec.r_max() : std::min(spec.r_max(), 1.0);
    skel.compensator_drift = compensator_between(spec.density, alpha, spec.epsilon_cut, top);
  }

  if (spec.small_jump_mode == SmallJumpMode::gaussian_surrogate) {
    const SmallJumpMoments m = small_jump_moments(spec.density, alpha, spec.epsilon_cut);
    skel.small_bridge =
        DyadicBridge(derive_key(master_seed, path_index, stream_tag::bridge), m.covariance);
    skel.has_bridge = true;
  }
  return skel;
}

/// Driver increments at the base resolution 2^J. Jumps are binned in time
/// order, then the bridge leaves and the compensator share are added; all
/// coarser resolutions must be produced from this object by halving.
inline GridIncrements base_increments(const PathSkeleton& skel, const DriverSpec& spec) {
  if (skel.time_cutoff < 1.0)
    throw std::logic_error("base_increments: skeleton was built with a time cutoff");
  const int n = spec.base_resolution();
  const int dim = spec.density.dimension;
  GridIncrements inc(dim, n);
  for (const Jump& j : skel.jumps) {
    const int cell = std::min(static_cast<int>(j.time * n), n - 1);
    inc.add_to_cell(cell, j.mark);
  }
  if (skel.has_bridge) skel.small_bridge.add_leaves(spec.base_log2, inc);
  bool drift_nonzero = false;
  for (int i = 0; i < dim; ++i) drift_nonzero |= (skel.compensator_drift[i] != 0.0);
  if (drift_nonzero) {
    const Vec per_cell = skel.compensator_drift * (-1.0 / n);
    for (int k = 0; k < n; ++k) inc.add_to_cell(k, per_cell);
  }
  return inc;
}

/// Increments at dyadic resolution n = 2^j, j <= base_log2.
inline GridIncrements driver_increments(const PathSkeleton& skel, const DriverSpec& spec, int n) {
  if (n <= 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("driver_increments: resolution must be a power of two");
  if (n > spec.base_resolution())
    throw std::invalid_argument("driver_increments: resolution exceeds the base grid");
  GridIncrements inc = base_increments(skel, spec);
  while (inc.resolution() > n) inc = inc.halved();
  return inc;
}

/// Driver value L_t (or L0_t) at the dyadic time t = k / 2^level, evaluated
/// without materializing the base grid. Exact for skeletons built with a
/// time cutoff >= t.
inline Vec driver_prefix_value(const PathSkeleton& skel, const DriverSpec& spec, int level,
                               std::uint64_t k) {
  if (level < 0 || level > spec.base_log2)
    throw std::invalid_argument("driver_prefix_value: level outside the base grid");
  const double t = std::ldexp(static_cast<double>(k), -level);
  if (t > skel.time_cutoff + 1e-15)
    throw std::invalid_argument("driver_prefix_value: time beyond the skeleton cutoff");
  Vec acc(spec.density.dimension);
  for (const Jump& j : skel.jumps) {
    if (j.time >= t) break;
    acc += j.mark;
  }
  if (skel.has_bridge) acc += skel.small_bridge.prefix(level, k);
  acc += skel.compensator_drift * (-t);
  return acc;
}

/// Result of dropping the big jumps: the truncated skeleton/spec pair plus
/// the removed jumps V and the unit-time compensator P-rate needed to
/// reconstruct the original driver pathwise (L = L0 + V - P, with P = 0 at
/// alpha = 1).
struct TruncationResult {
  PathSkeleton skeleton;
  DriverSpec spec;
  std::vector<Jump> removed;
  Vec big_compensator_rate;
};

inline TruncationResult truncate_driver(const PathSkeleton& skel, const DriverSpec& spec) {
  if (spec.index.truncated)
    throw std::invalid_argument("truncate_driver: driver is already truncated");
  TruncationResult out;
  out.spec = spec;
  out.spec.index.truncated = true;
  out.spec.exact_marginals = false;
  out.skeleton = skel;
  out.skeleton.jumps.clear();
  for (const Jump& j : skel.jumps) {
    if (j.mark.norm() > 1.0)
      out.removed.push_back(j);
    else
      out.skeleton.jumps.push_back(j);
  }
  out.big_compensator_rate = big_jump_compensator(spec.density, spec.index.alpha, false);
  if (spec.density.symmetric) {
    out.skeleton.compensator_drift = Vec::zero(spec.density.dimension);
  } else {
    out.skeleton.compensator_drift =
        compensator_between(spec.density, spec.index.alpha, spec.epsilon_cut, 1.0);
  }
  return out;
}

/// Exact symmetric alpha-stable increments for the d=1 isotropic
/// nontruncated driver: i.i.d. base-cell draws by the trigonometric
/// transform of one uniform and one exponential variate, aggregated to the
/// requested resolution. Marginal characteristic function over a cell of
/// width h is exp(-h c rho c_alpha |u|^alpha).
inline GridIncrements exact_stable_increments(std::uint64_t master_seed, std::uint64_t path_index,
                                              const DriverSpec& spec, int n) {
  spec.validate();
  if (!spec.exact_marginals)
    throw std::invalid_argument("exact_stable_increments: spec.exact_marginals is not set");
  if (n <= 0 || (n & (n - 1)) != 0 || n > spec.base_resolution())
    throw std::invalid_argument("exact_stable_increments: invalid resolution");
  const double alpha = spec.index.alpha;
  Vec plus(1);
  plus[0] = 1.0;
  const double rho_const = spec.density.evaluate(plus);
  const double c_alpha = stable_scale_constant(alpha);
  const int base = spec.base_resolution();
  const double scale = std::pow(rho_const * c_alpha / base, 1.0 / alpha);

  GridIncrements inc(1, base);
  constexpr double pi = 3.141592653589793238462643383279;
  for (int k = 0; k < base; ++k) {
    RngStream rng(derive_key(master_seed, path_index, stream_tag::stable_cell,
                             static_cast<std::uint64_t>(k)));
    const double phi = pi * (rng.uniform_open() - 0.5);
    const double w = rng.exponential();
    const double x = std::sin(alpha * phi) / std::pow(std::cos(phi), 1.0 / alpha) *
                     std::pow(std::cos((1.0 - alpha) * phi) / w, (1.0 - alpha) / alpha);
    inc.cell(k)[0] = scale * x;
  }
  while (inc.resolution() > n) inc = inc.halved();
  return inc;
}

}  // namespace levysim
