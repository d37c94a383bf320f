#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "levysim/driver.hpp"
#include "levysim/euler.hpp"
#include "levysim/parallel.hpp"

namespace levysim {

// ---------------------------------------------------------------------------
// Median-of-means estimation
// ---------------------------------------------------------------------------

/// Robust mean estimate for heavy-tailed summands: batch by path index mod B,
/// take the median of the batch means. The spread is the scaled median
/// absolute deviation of the batch means, a robust scale for the estimator's
/// dispersion.
struct MomEstimate {
  double estimate = 0.0;
  double spread = 0.0;
};

namespace detail {

inline double median_inplace(std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
  }
  return hi;
}

}  // namespace detail

namespace detail {

inline std::vector<double> batch_means(const std::vector<double>& values,
                                       const std::vector<std::uint8_t>& aborted, int batches) {
  if (batches < 2) throw std::invalid_argument("batch_means: need at least 2 batches");
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    KahanAccumulator sum;
    std::uint64_t count = 0;
    for (std::size_t i = static_cast<std::size_t>(b); i < values.size();
         i += static_cast<std::size_t>(batches)) {
      if (!aborted.empty() && aborted[i]) continue;
      sum.add(values[i]);
      ++count;
    }
    if (count == 0) throw std::runtime_error("batch_means: empty batch");
    means.push_back(sum.value / static_cast<double>(count));
  }
  return means;
}

inline double mad_spread(const std::vector<double>& means, double center) {
  std::vector<double> dev(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) dev[i] = std::abs(means[i] - center);
  return 1.4826 * median_inplace(dev);
}

}  // namespace detail

inline MomEstimate median_of_means(const std::vector<double>& values,
                                   const std::vector<std::uint8_t>& aborted, int batches = 32) {
  const std::vector<double> means = detail::batch_means(values, aborted, batches);
  MomEstimate out;
  std::vector<double> tmp = means;
  out.estimate = detail::median_inplace(tmp);
  out.spread = detail::mad_spread(means, out.estimate);
  return out;
}

/// Plain mean with the same batch-spread diagnostic. The median of batch
/// means is systematically below the mean when each batch sees only a
/// handful of jump events (the batch-mean law is Poisson-skewed, and the
/// skew varies along a t-ladder, tilting slope fits); when the summands
/// have finite variance the plain mean is the consistent choice.
inline MomEstimate mean_with_spread(const std::vector<double>& values,
                                    const std::vector<std::uint8_t>& aborted, int batches = 32) {
  const std::vector<double> means = detail::batch_means(values, aborted, batches);
  MomEstimate out;
  KahanAccumulator sum;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!aborted.empty() && aborted[i]) continue;
    sum.add(values[i]);
    ++count;
  }
  out.estimate = sum.value / static_cast<double>(count);
  out.spread = detail::mad_spread(means, out.estimate);
  return out;
}

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

enum class FitMode { slope_at_most, slope_at_least, slope_within };
enum class FitVerdict { pass, fail, exact };

inline const char* to_string(FitMode m) {
  switch (m) {
    case FitMode::slope_at_most: return "at-most";
    case FitMode::slope_at_least: return "at-least";
    default: return "within";
  }
}
inline const char* to_string(FitVerdict v) {
  switch (v) {
    case FitVerdict::pass: return "pass";
    case FitVerdict::fail: return "fail";
    default: return "exact";
  }
}

/// Log-log regression of an estimate ladder against the predicted exponent.
/// Rates from the tables are bounds, so the default verdicts are one-sided;
/// log-corrected regimes widen tolerance rather than asserting the log power.
struct RateFit {
  bool fitted = false;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r2 = 1.0;
  double predicted = 0.0;
  double tolerance = 0.0;
  bool log_corrected = false;
  FitMode mode = FitMode::slope_at_most;
  FitVerdict verdict = FitVerdict::exact;

  double fitted_value(double x) const {
    return fitted ? std::exp(intercept + slope * std::log(x)) : 0.0;
  }
};

struct LadderPoint {
  double x = 0.0;         // n or t
  double estimate = 0.0;  // MoM estimate of the p-th moment
  double spread = 0.0;
};

inline RateFit fit_rate(const std::vector<LadderPoint>& points, double predicted,
                        double tolerance, FitMode mode = FitMode::slope_at_most,
                        bool log_corrected = false) {
  RateFit fit;
  fit.predicted = predicted;
  fit.tolerance = tolerance;
  fit.mode = mode;
  fit.log_corrected = log_corrected;
  if (points.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 ladder points");
  // Nonpositive estimates cannot be fitted in log space, and a ladder that
  // sits entirely at rounding level (an exact scheme) carries no rate signal.
  bool all_tiny = true;
  for (const auto& pt : points) {
    all_tiny &= pt.estimate <= 1e-12;
    if (!(pt.estimate > 0.0)) {
      fit.verdict = FitVerdict::exact;
      return fit;
    }
  }
  if (all_tiny) {
    fit.verdict = FitVerdict::exact;
    return fit;
  }

  const std::size_t n = points.size();
  double sx = 0.0, sy = 0.0;
  for (const auto& pt : points) {
    sx += std::log(pt.x);
    sy += std::log(pt.estimate);
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& pt : points) {
    const double dx = std::log(pt.x) - mx;
    const double dy = std::log(pt.estimate) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.fitted = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& pt : points) {
    const double r = std::log(pt.estimate) - (fit.intercept + fit.slope * std::log(pt.x));
    ssr += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  fit.slope_se = n > 2 ? std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
  switch (mode) {
    case FitMode::slope_at_most:
      fit.verdict = fit.slope <= predicted + tolerance ? FitVerdict::pass : FitVerdict::fail;
      break;
    case FitMode::slope_at_least:
      fit.verdict = fit.slope >= predicted - tolerance ? FitVerdict::pass : FitVerdict::fail;
      break;
    case FitMode::slope_within:
      fit.verdict =
          std::abs(fit.slope - predicted) <= tolerance ? FitVerdict::pass : FitVerdict::fail;
      break;
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Predicted exponents
// ---------------------------------------------------------------------------

struct PredictedRate {
  double exponent = 0.0;
  bool log_corrected = false;
};

/// Strong-error decay exponent in n for E[sup_t |X_t^n - X_t|^p]. The
/// Lipschitz table applies when beta = 1, the Holder table (nondegenerate
/// diffusion) when beta < 1.
inline PredictedRate predicted_strong_rate(double alpha, double beta, double p, bool truncated,
                                           bool symmetric_density) {
  const bool lipschitz = beta >= 1.0;
  if (lipschitz) {
    if (!truncated) {
      if (alpha > 1.0) return {-p / alpha, true};
      return {-p, true};  // alpha = 1; symmetric has one log, general two
    }
    if (alpha > 1.0) {
      if (p < alpha) return {-p / alpha, true};
      if (p == alpha) return {-1.0, true};
      return {-1.0, false};
    }
    // alpha = 1, truncated
    if (p < 1.0) return {-p, true};
    if (p == 1.0) return {-1.0, true};
    return {-1.0, false};
  }
  if (!truncated) return {-p * beta / alpha, false};
  const double crit = alpha / beta;
  if (p < crit) return {-p * beta / alpha, false};
  if (p == crit) return {-1.0, true};
  return {-1.0, false};
}

/// Moment growth exponent in t for E|L_t|^p (nontruncated) or E|L0_t|^p
/// (truncated).
inline PredictedRate predicted_driver_moment(double alpha, double p, bool truncated,
                                             bool symmetric_density) {
  if (truncated) {
    if (p > alpha) return {1.0, false};
    if (p == alpha) return {1.0, true};
    if (alpha > 1.0) return {p / alpha, false};
    return symmetric_density ? PredictedRate{p, false} : PredictedRate{p, true};
  }
  if (!(p < alpha))
    throw std::invalid_argument("predicted_driver_moment: nontruncated driver has moments only below alpha");
  if (alpha > 1.0) return {p / alpha, false};
  return symmetric_density ? PredictedRate{p, false} : PredictedRate{p, true};
}

/// Grid-increment decay exponent in n for E|X_t^n - X_{pi_n(t)}^n|^p.
inline PredictedRate predicted_increment_rate(double alpha, double p, bool truncated,
                                              bool symmetric_density) {
  if (!truncated) {
    if (!(p < alpha))
      throw std::invalid_argument("predicted_increment_rate: nontruncated driver requires p < alpha");
    if (alpha > 1.0) return {-p / alpha, false};
    return symmetric_density ? PredictedRate{-p, false} : PredictedRate{-p, true};
  }
  if (p > alpha) return {-1.0, false};
  if (p == alpha) return {-1.0, true};
  if (alpha > 1.0) return {-p / alpha, false};
  return symmetric_density ? PredictedRate{-p, false} : PredictedRate{-p, true};
}

// ---------------------------------------------------------------------------
// Ladder experiments
// ---------------------------------------------------------------------------

/// p-th moment sup-error ladder against the coupled fine-grid reference.
struct ErrorReport {
  std::string x_name = "n";
  double p = 1.0;
  std::vector<LadderPoint> points;
  std::uint64_t paths = 0;
  std::uint64_t aborted = 0;
  RateFit fit;  // populated by the scaling operations / experiment layer

  double aborted_fraction() const {
    return paths == 0 ? 0.0 : static_cast<double>(aborted) / static_cast<double>(paths);
  }
};

namespace detail {

inline void require_dyadic_ladder(const std::vector<int>& ladder_log2, int base_log2,
                                  int headroom) {
  if (ladder_log2.size() < 4)
    throw std::invalid_argument("ladder must contain at least 4 dyadic points");
  for (std::size_t i = 1; i < ladder_log2.size(); ++i)
    if (ladder_log2[i] <= ladder_log2[i - 1])
      throw std::invalid_argument("ladder must be strictly increasing");
  if (ladder_log2.back() > base_log2 - headroom)
    throw std::invalid_argument("ladder top too close to the base grid (reference headroom)");
  if (ladder_log2.front() < 1) throw std::invalid_argument("ladder bottom below resolution 2");
}

inline double sup_error_p(const EulerPath& coarse, const EulerPath& ref, double p) {
  const int stride = ref.resolution / coarse.resolution;
  double sup = 0.0;
  for (int k = 0; k <= coarse.resolution; ++k) {
    double d2 = 0.0;
    const double* a = coarse.states.data() + static_cast<std::size_t>(k) * coarse.dim;
    const double* b =
        ref.states.data() + static_cast<std::size_t>(k) * stride * static_cast<std::size_t>(ref.dim);
    for (int i = 0; i < coarse.dim; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    sup = std::max(sup, d2);
  }
  return std::pow(sup, 0.5 * p);
}

}  // namespace detail

/// Strong error E[sup_k |X^n_{k/n} - X^ref_{k/n}|^p] over a dyadic n-ladder.
/// One skeleton per path drives the reference and every ladder resolution,
/// so differences reflect discretization only. Median-of-means aggregation;
/// deterministic in (master_seed, path count) regardless of worker count.
inline ErrorReport strong_error(const SdeCoefficients& coeffs, const DriverSpec& spec,
                                const std::vector<int>& ladder_log2, double p,
                                std::uint64_t paths, std::uint64_t master_seed, int workers = 0,
                                int batches = 32) {
  spec.validate();
  detail::require_dyadic_ladder(ladder_log2, spec.base_log2, 3);
  if (!spec.index.truncated && !(p < spec.index.alpha))
    throw std::invalid_argument(
        "strong_error: nontruncated driver has moments only below alpha (p < alpha required)");
  if (paths < static_cast<std::uint64_t>(4 * batches))
    throw std::invalid_argument("strong_error: need at least 4 paths per batch");

  const std::size_t levels = ladder_log2.size();
  std::vector<double> values(levels * paths, 0.0);
  std::vector<std::uint8_t> aborted(paths, 0);

  parallel_for_index(paths, workers, [&](std::uint64_t i) {
    GridIncrements inc;
    if (spec.exact_marginals) {
      inc = exact_stable_increments(master_seed, i, spec, spec.base_resolution());
    } else {
      const PathSkeleton skel = build_skeleton(master_seed, i, spec);
      inc = base_increments(skel, spec);
    }
    const EulerPath ref = euler_path_from_increments(coeffs, inc);
    bool bad = ref.aborted;
    int level_idx = static_cast<int>(levels) - 1;
    for (int j = spec.base_log2 - 1; j >= ladder_log2.front() && level_idx >= 0; --j) {
      inc = inc.halved();
      if (j != ladder_log2[static_cast<std::size_t>(level_idx)]) continue;
      const EulerPath coarse = euler_path_from_increments(coeffs, inc);
      if (coarse.aborted || bad) {
        bad = true;
      } else {
        values[static_cast<std::size_t>(level_idx) * paths + i] =
            detail::sup_error_p(coarse, ref, p);
      }
      --level_idx;
    }
    aborted[i] = bad ? 1 : 0;
  });

  ErrorReport rep;
  rep.x_name = "n";
  rep.p = p;
  rep.paths = paths;
  for (std::uint64_t i = 0; i < paths; ++i) rep.aborted += aborted[i];
  for (std::size_t l = 0; l < levels; ++l) {
    std::vector<double> col(values.begin() + static_cast<std::ptrdiff_t>(l * paths),
                            values.begin() + static_cast<std::ptrdiff_t>((l + 1) * paths));
    const MomEstimate est = median_of_means(col, aborted, batches);
    rep.points.push_back({std::ldexp(1.0, ladder_log2[l]), est.estimate, est.spread});
  }
  return rep;
}

/// Coupled weak-error ladder |E phi(X^n_1) - E phi(X^ref_1)| with the
/// pointwise Holder domination quantity |phi|_beta E|X^n_1 - X^ref_1|^beta.
/// Plain paired means: phi is bounded, and the domination inequality then
/// holds sample-by-sample.
struct WeakErrorPoint {
  double n = 0.0;
  double weak_error = 0.0;
  double paired_se = 0.0;
  double bound_rhs = 0.0;  // |phi|_beta * mean |X^n - X^ref|^beta
};

struct WeakErrorReport {
  std::vector<WeakErrorPoint> points;
  std::uint64_t paths = 0;
  std::uint64_t aborted = 0;
  double beta_phi = 0.0;
  double phi_holder = 0.0;
};

inline WeakErrorReport weak_error(const SdeCoefficients& coeffs, const DriverSpec& spec,
                                  const std::vector<int>& ladder_log2,
                                  const std::function<double(const Vec&)>& phi, double beta_phi,
                                  double phi_holder, std::uint64_t paths,
                                  std::uint64_t master_seed, int workers = 0) {
  spec.validate();
  detail::require_dyadic_ladder(ladder_log2, spec.base_log2, 3);
  if (!(beta_phi > 0.0 && beta_phi <= 1.0))
    throw std::invalid_argument("weak_error: beta_phi must lie in (0,1]");

  const std::size_t levels = ladder_log2.size();
  std::vector<double> diffs(levels * paths, 0.0);
  std::vector<double> dists(levels * paths, 0.0);
  std::vector<std::uint8_t> aborted(paths, 0);

  parallel_for_index(paths, workers, [&](std::uint64_t i) {
    GridIncrements inc;
    if (spec.exact_marginals) {
      inc = exact_stable_increments(master_seed, i, spec, spec.base_resolution());
    } else {
      const PathSkeleton skel = build_skeleton(master_seed, i, spec);
      inc = base_increments(skel, spec);
    }
    const EulerPath ref = euler_path_from_increments(coeffs, inc);
    bool bad = ref.aborted;
    const Vec xr = bad ? coeffs.x0 : ref.state(ref.resolution);
    int level_idx = static_cast<int>(levels) - 1;
    for (int j = spec.base_log2 - 1; j >= ladder_log2.front() && level_idx >= 0; --j) {
      inc = inc.halved();
      if (j != ladder_log2[static_cast<std::size_t>(level_idx)]) continue;
      const EulerPath coarse = euler_path_from_increments(coeffs, inc);
      if (coarse.aborted || bad) {
        bad = true;
      } else {
        const Vec xn = coarse.state(coarse.resolution);
        diffs[static_cast<std::size_t>(level_idx) * paths + i] = phi(xn) - phi(xr);
        dists[static_cast<std::size_t>(level_idx) * paths + i] =
            std::pow((xn - xr).norm(), beta_phi);
      }
      --level_idx;
    }
    aborted[i] = bad ? 1 : 0;
  });

  WeakErrorReport rep;
  rep.paths = paths;
  rep.beta_phi = beta_phi;
  rep.phi_holder = phi_holder;
  for (std::uint64_t i = 0; i < paths; ++i) rep.aborted += aborted[i];
  const double m_eff = static_cast<double>(paths - rep.aborted);
  for (std::size_t l = 0; l < levels; ++l) {
    KahanAccumulator sum_w, sum_w2, sum_d;
    for (std::uint64_t i = 0; i < paths; ++i) {
      if (aborted[i]) continue;
      const double w = diffs[l * paths + i];
      sum_w.add(w);
      sum_w2.add(w * w);
      sum_d.add(dists[l * paths + i]);
    }
    WeakErrorPoint pt;
    pt.n = std::ldexp(1.0, ladder_log2[l]);
    const double mean_w = sum_w.value / m_eff;
    pt.weak_error = std::abs(mean_w);
    const double var_w = std::max(0.0, sum_w2.value / m_eff - mean_w * mean_w);
    pt.paired_se = std::sqrt(var_w / m_eff);
    pt.bound_rhs = phi_holder * sum_d.value / m_eff;
    rep.points.push_back(pt);
  }
  return rep;
}

/// Moment scaling of the driver itself: log E|L_t|^p versus log t over a
/// dyadic t-ladder, fitted against the case table. Jump generation is
/// restricted to [0, max t], which leaves the restricted realization
/// unchanged.
inline ErrorReport moment_scaling_driver(const DriverSpec& spec, double p,
                                         const std::vector<int>& t_ladder_neg_log2,
                                         std::uint64_t paths, std::uint64_t master_seed,
                                         int workers = 0, int batches = 32,
                                         FitMode mode = FitMode::slope_at_least,
                                         double tolerance = 0.07) {
  spec.validate();
  if (t_ladder_neg_log2.size() < 4)
    throw std::invalid_argument("moment_scaling_driver: need at least 4 ladder points");
  for (int m : t_ladder_neg_log2)
    if (m < 0 || m > spec.base_log2)
      throw std::invalid_argument("moment_scaling_driver: t-ladder outside the base grid");
  if (!spec.index.truncated && !(p < spec.index.alpha))
    throw std::invalid_argument(
        "moment_scaling_driver: nontruncated driver has moments only below alpha");
  const PredictedRate pred =
      predicted_driver_moment(spec.index.alpha, p, spec.index.truncated, spec.density.symmetric);

  std::vector<int> ladder = t_ladder_neg_log2;  // descending exponents = ascending t
  std::sort(ladder.begin(), ladder.end(), std::greater<int>());
  const double t_max = std::ldexp(1.0, -ladder.back());
  const std::size_t levels = ladder.size();
  std::vector<double> values(levels * paths, 0.0);
  std::vector<std::uint8_t> no_aborts;

  parallel_for_index(paths, workers, [&](std::uint64_t i) {
    const PathSkeleton skel = build_skeleton(master_seed, i, spec, t_max);
    for (std::size_t l = 0; l < levels; ++l) {
      const Vec v = driver_prefix_value(skel, spec, ladder[l], 1);
      values[l * paths + i] = std::pow(v.norm(), p);
    }
  });

  // Super-alpha moments of the truncated driver have finite variance and
  // live in the sparse-jump regime where median-of-means is biased; use the
  // plain mean there, median-of-means everywhere else.
  const bool use_mean = spec.index.truncated && p > spec.index.alpha;

  ErrorReport rep;
  rep.x_name = "t";
  rep.p = p;
  rep.paths = paths;
  for (std::size_t l = 0; l < levels; ++l) {
    std::vector<double> col(values.begin() + static_cast<std::ptrdiff_t>(l * paths),
                            values.begin() + static_cast<std::ptrdiff_t>((l + 1) * paths));
    const MomEstimate est = use_mean ? mean_with_spread(col, no_aborts, batches)
                                     : median_of_means(col, no_aborts, batches);
    rep.points.push_back({std::ldexp(1.0, -ladder[l]), est.estimate, est.spread});
  }
  const double tol = tolerance + (pred.log_corrected ? 0.05 : 0.0);
  rep.fit = fit_rate(rep.points, pred.exponent, tol, mode, pred.log_corrected);
  return rep;
}

/// Scaling of the scheme's own grid increments E|X^n_t - X^n_{pi_n(t)}|^p
/// at a probe time t in mid-cell position; the probe cell per resolution is
/// a deterministic function of the master seed.
inline ErrorReport grid_increment_scaling(const SdeCoefficients& coeffs, const DriverSpec& spec,
                                          double p, const std::vector<int>& ladder_log2,
                                          std::uint64_t paths, std::uint64_t master_seed,
                                          int workers = 0, int batches = 32,
                                          FitMode mode = FitMode::slope_at_most,
                                          double tolerance = 0.08) {
  spec.validate();
  detail::require_dyadic_ladder(ladder_log2, spec.base_log2, 1);
  if (!spec.index.truncated && !(p < spec.index.alpha))
    throw std::invalid_argument(
        "grid_increment_scaling: nontruncated driver has moments only below alpha");
  const PredictedRate pred =
      predicted_increment_rate(spec.index.alpha, p, spec.index.truncated, spec.density.symmetric);

  const std::size_t levels = ladder_log2.size();
  std::vector<int> probe_cell(levels);
  for (std::size_t l = 0; l < levels; ++l) {
    RngStream s(derive_key(master_seed, stream_tag::probe,
                           static_cast<std::uint64_t>(ladder_log2[l])));
    probe_cell[l] = static_cast<int>(s.uniform() * std::ldexp(1.0, ladder_log2[l]));
  }

  std::vector<double> values(levels * paths, 0.0);
  std::vector<std::uint8_t> aborted(paths, 0);

  parallel_for_index(paths, workers, [&](std::uint64_t i) {
    const PathSkeleton skel = build_skeleton(master_seed, i, spec);
    GridIncrements fine = base_increments(skel, spec);
    bool bad = false;
    int level_idx = static_cast<int>(levels) - 1;
    for (int j = spec.base_log2 - 1; j >= ladder_log2.front() && level_idx >= 0; --j) {
      const GridIncrements cur = fine.halved();
      if (j == ladder_log2[static_cast<std::size_t>(level_idx)]) {
        const EulerPath path = euler_path_from_increments(coeffs, cur);
        if (path.aborted) {
          bad = true;
        } else {
          const int k = probe_cell[static_cast<std::size_t>(level_idx)];
          const Vec xk = path.state(k);
          const Vec half = fine.cell_vec(2 * k);  // increment over [k/n, k/n + 1/(2n))
          const double dt_half = 0.5 / cur.resolution();
          const Vec delta = coeffs.drift(xk) * dt_half + coeffs.diffusion(xk).apply(half);
          values[static_cast<std::size_t>(level_idx) * paths + i] = std::pow(delta.norm(), p);
        }
        --level_idx;
      }
      fine = cur;
    }
    aborted[i] = bad ? 1 : 0;
  });

  const bool use_mean = spec.index.truncated && p > spec.index.alpha;

  ErrorReport rep;
  rep.x_name = "n";
  rep.p = p;
  rep.paths = paths;
  for (std::uint64_t i = 0; i < paths; ++i) rep.aborted += aborted[i];
  for (std::size_t l = 0; l < levels; ++l) {
    std::vector<double> col(values.begin() + static_cast<std::ptrdiff_t>(l * paths),
                            values.begin() + static_cast<std::ptrdiff_t>((l + 1) * paths));
    const MomEstimate est = use_mean ? mean_with_spread(col, aborted, batches)
                                     : median_of_means(col, aborted, batches);
    rep.points.push_back({std::ldexp(1.0, ladder_log2[l]), est.estimate, est.spread});
  }
  const double tol = tolerance + (pred.log_corrected ? 0.05 : 0.0);
  rep.fit = fit_rate(rep.points, pred.exponent, tol, mode, pred.log_corrected);
  return rep;
}

}  // namespace levysim
