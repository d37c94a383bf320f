#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "levysim/experiment.hpp"

namespace levysim {

/// Strong error against the event-driven finite-activity oracle and against
/// the fine-grid Euler reference, on the same paths. Requires drop mode.
struct OracleCompareReport {
  ErrorReport vs_oracle;
  ErrorReport vs_reference;
};

inline OracleCompareReport oracle_equivalence(const SdeCoefficients& coeffs,
                                              const DriverSpec& spec,
                                              const std::vector<int>& ladder_log2, double p,
                                              std::uint64_t paths, std::uint64_t master_seed,
                                              double ode_tol, int workers = 0, int batches = 32) {
  spec.validate();
  if (spec.small_jump_mode != SmallJumpMode::drop)
    throw std::invalid_argument("oracle_equivalence: requires drop-mode driver");
  detail::require_dyadic_ladder(ladder_log2, spec.base_log2, 3);

  const std::size_t levels = ladder_log2.size();
  std::vector<double> vs_oracle(levels * paths, 0.0);
  std::vector<double> vs_ref(levels * paths, 0.0);
  std::vector<std::uint8_t> aborted(paths, 0);

  parallel_for_index(paths, workers, [&](std::uint64_t i) {
    const PathSkeleton skel = build_skeleton(master_seed, i, spec);
    const EulerPath oracle = exact_finite_activity_path(coeffs, skel, spec, ode_tol);
    GridIncrements inc = base_increments(skel, spec);
    const EulerPath ref = euler_path_from_increments(coeffs, inc);
    bool bad = oracle.aborted || ref.aborted;
    int level_idx = static_cast<int>(levels) - 1;
    for (int j = spec.base_log2 - 1; j >= ladder_log2.front() && level_idx >= 0; --j) {
      inc = inc.halved();
      if (j != ladder_log2[static_cast<std::size_t>(level_idx)]) continue;
      const EulerPath coarse = euler_path_from_increments(coeffs, inc);
      if (coarse.aborted || bad) {
        bad = true;
      } else {
        vs_oracle[static_cast<std::size_t>(level_idx) * paths + i] =
            detail::sup_error_p(coarse, oracle, p);
        vs_ref[static_cast<std::size_t>(level_idx) * paths + i] =
            detail::sup_error_p(coarse, ref, p);
      }
      --level_idx;
    }
    aborted[i] = bad ? 1 : 0;
  });

  OracleCompareReport rep;
  for (ErrorReport* r : {&rep.vs_oracle, &rep.vs_reference}) {
    r->x_name = "n";
    r->p = p;
    r->paths = paths;
    for (std::uint64_t i = 0; i < paths; ++i) r->aborted += aborted[i];
  }
  for (std::size_t l = 0; l < levels; ++l) {
    const auto column = [&](const std::vector<double>& all) {
      return std::vector<double>(all.begin() + static_cast<std::ptrdiff_t>(l * paths),
                                 all.begin() + static_cast<std::ptrdiff_t>((l + 1) * paths));
    };
    const auto a = median_of_means(column(vs_oracle), aborted, batches);
    const auto b = median_of_means(column(vs_ref), aborted, batches);
    const double n = std::ldexp(1.0, ladder_log2[l]);
    rep.vs_oracle.points.push_back({n, a.estimate, a.spread});
    rep.vs_reference.points.push_back({n, b.estimate, b.spread});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Run results and artifact writers
// ---------------------------------------------------------------------------

struct ExperimentOutcome {
  double p = 0.0;
  ErrorReport report;             // strong-rate / driver-moment / increment-moment
  WeakErrorReport weak;           // weak-error
  OracleCompareReport oracle;     // oracle-compare
  bool weak_dominated = true;     // weak-error verdict
  bool oracle_pass = true;        // oracle-compare verdict
  std::string verdict = "pass";
};

struct RunResult {
  ExperimentConfig config;
  std::string hash;
  std::vector<ExperimentOutcome> outcomes;
  bool all_pass = true;
  bool aborted_ok = true;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;

  int exit_code() const { return (all_pass && aborted_ok) ? 0 : 1; }
};

/// Aborted paths above this fraction invalidate an experiment (silently
/// dropping them would bias heavy-tail moment estimates).
inline constexpr double kAbortThreshold = 1e-4;

inline FitMode fit_mode_from_string(const std::string& s) {
  if (s == "at-most") return FitMode::slope_at_most;
  if (s == "at-least") return FitMode::slope_at_least;
  return FitMode::slope_within;
}

/// Executes a validated config. Deterministic artifacts: report.csv and
/// summary.json depend only on (config, master_seed), never on worker count
/// or wall time.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  result.config = cfg;
  result.hash = config_hash(cfg);

  const DriverSpec spec = driver_spec_from_config(cfg);
  const FitMode mode = fit_mode_from_string(cfg.rate_mode);

  if (cfg.kind == "driver-moment") {
    std::vector<int> ladder;
    for (int m : cfg.t_ladder) ladder.push_back(-m);
    for (double p : cfg.p_list) {
      ExperimentOutcome out;
      out.p = p;
      out.report = moment_scaling_driver(spec, p, ladder, cfg.paths, cfg.master_seed, cfg.workers,
                                         cfg.batches, mode, cfg.tolerance);
      if (cfg.predicted) {
        out.report.fit = fit_rate(out.report.points, *cfg.predicted, cfg.tolerance, mode,
                                  out.report.fit.log_corrected);
      }
      out.verdict = to_string(out.report.fit.verdict);
      result.outcomes.push_back(std::move(out));
    }
  } else if (cfg.kind == "strong-rate") {
    const SdeCoefficients coeffs = coefficients_from_config(cfg);
    if (coeffs.beta < 1.0 && coeffs.beta <= 1.0 - cfg.alpha / 2.0)
      result.warnings.push_back("drift Holder exponent beta = " +
                                detail::format_double(coeffs.beta) +
                                " does not satisfy beta > 1 - alpha/2; the Holder-case rate "
                                "table is outside its hypothesis");
    for (double p : cfg.p_list) {
      ExperimentOutcome out;
      out.p = p;
      out.report = strong_error(coeffs, spec, cfg.n_ladder, p, cfg.paths, cfg.master_seed,
                                cfg.workers, cfg.batches);
      double predicted = 0.0;
      bool log_corrected = false;
      if (cfg.predicted) {
        predicted = *cfg.predicted;
      } else {
        const PredictedRate pr = predicted_strong_rate(cfg.alpha, coeffs.beta, p, cfg.truncated,
                                                       spec.density.symmetric);
        predicted = pr.exponent;
        log_corrected = pr.log_corrected;
      }
      out.report.fit = fit_rate(out.report.points, predicted,
                                cfg.tolerance + (log_corrected ? 0.05 : 0.0), mode, log_corrected);
      out.verdict = to_string(out.report.fit.verdict);
      result.outcomes.push_back(std::move(out));
    }
  } else if (cfg.kind == "increment-moment") {
    const SdeCoefficients coeffs = coefficients_from_config(cfg);
    for (double p : cfg.p_list) {
      ExperimentOutcome out;
      out.p = p;
      out.report = grid_increment_scaling(coeffs, spec, p, cfg.n_ladder, cfg.paths,
                                          cfg.master_seed, cfg.workers, cfg.batches, mode,
                                          cfg.tolerance);
      if (cfg.predicted)
        out.report.fit = fit_rate(out.report.points, *cfg.predicted, cfg.tolerance, mode,
                                  out.report.fit.log_corrected);
      out.verdict = to_string(out.report.fit.verdict);
      result.outcomes.push_back(std::move(out));
    }
  } else if (cfg.kind == "weak-error") {
    const SdeCoefficients coeffs = coefficients_from_config(cfg);
    const WeakTestFunction phi = weak_function_from_name(cfg.phi);
    ExperimentOutcome out;
    out.p = phi.beta;
    out.weak = weak_error(coeffs, spec, cfg.n_ladder, phi.fn, phi.beta, phi.holder, cfg.paths,
                          cfg.master_seed, cfg.workers);
    for (const auto& pt : out.weak.points)
      out.weak_dominated &= pt.weak_error <= pt.bound_rhs + 4.0 * pt.paired_se;
    out.verdict = out.weak_dominated ? "pass" : "fail";
    result.outcomes.push_back(std::move(out));
  } else if (cfg.kind == "oracle-compare") {
    const SdeCoefficients coeffs = coefficients_from_config(cfg);
    for (double p : cfg.p_list) {
      ExperimentOutcome out;
      out.p = p;
      out.oracle = oracle_equivalence(coeffs, spec, cfg.n_ladder, p, cfg.paths, cfg.master_seed,
                                      cfg.ode_tol, cfg.workers, cfg.batches);
      out.oracle.vs_oracle.fit =
          fit_rate(out.oracle.vs_oracle.points, cfg.slope_cap, 0.0, FitMode::slope_at_most);
      out.oracle.vs_reference.fit =
          fit_rate(out.oracle.vs_reference.points, cfg.slope_cap, 0.0, FitMode::slope_at_most);
      const double s1 = out.oracle.vs_oracle.fit.slope;
      const double s2 = out.oracle.vs_reference.fit.slope;
      out.oracle_pass = out.oracle.vs_oracle.fit.verdict != FitVerdict::fail &&
                        out.oracle.vs_reference.fit.verdict != FitVerdict::fail &&
                        std::abs(s1 - s2) <= cfg.slope_gap;
      out.verdict = out.oracle_pass ? "pass" : "fail";
      result.outcomes.push_back(std::move(out));
    }
  } else {
    throw std::invalid_argument("run_experiment: unknown kind '" + cfg.kind + "'");
  }

  for (const auto& out : result.outcomes) {
    result.all_pass &= (out.verdict == "pass" || out.verdict == "exact");
    const double frac = cfg.kind == "weak-error"
                            ? (out.weak.paths ? static_cast<double>(out.weak.aborted) /
                                                    static_cast<double>(out.weak.paths)
                                              : 0.0)
                        : cfg.kind == "oracle-compare" ? out.oracle.vs_oracle.aborted_fraction()
                                                       : out.report.aborted_fraction();
    result.aborted_ok &= frac <= kAbortThreshold;
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// ---------------------------------------------------------------------------
// Artifact serialization (byte-stable: LF, UTF-8, fixed column order,
// sorted JSON keys)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_num(double v) { return format_double(v); }

inline std::string csv_log2(double v) {
  return v > 0.0 ? format_double(std::log2(v)) : std::string();
}

}  // namespace detail

inline std::string report_csv(const RunResult& r) {
  std::ostringstream out;
  out << "config_hash,name,kind,p,x_name,x,log2_x,estimate,log2_estimate,spread,fit_value,"
         "bound_rhs,paired_se,paths,aborted\n";
  const auto row_prefix = [&](double p) {
    return r.hash + "," + r.config.name + "," + r.config.kind + "," + detail::csv_num(p) + ",";
  };
  for (const auto& out_exp : r.outcomes) {
    if (r.config.kind == "weak-error") {
      for (const auto& pt : out_exp.weak.points) {
        out << row_prefix(out_exp.p) << "n," << detail::csv_num(pt.n) << ","
            << detail::csv_log2(pt.n) << "," << detail::csv_num(pt.weak_error) << ","
            << detail::csv_log2(pt.weak_error) << ",,," << detail::csv_num(pt.bound_rhs) << ","
            << detail::csv_num(pt.paired_se) << "," << out_exp.weak.paths << ","
            << out_exp.weak.aborted << "\n";
      }
    } else if (r.config.kind == "oracle-compare") {
      const auto emit = [&](const ErrorReport& rep, const std::string& tag) {
        for (const auto& pt : rep.points) {
          out << r.hash + "," + r.config.name + "-" + tag + "," + r.config.kind + "," +
                     detail::csv_num(out_exp.p) + ","
              << rep.x_name << "," << detail::csv_num(pt.x) << "," << detail::csv_log2(pt.x) << ","
              << detail::csv_num(pt.estimate) << "," << detail::csv_log2(pt.estimate) << ","
              << detail::csv_num(pt.spread) << "," << detail::csv_num(rep.fit.fitted_value(pt.x))
              << ",,," << rep.paths << "," << rep.aborted << "\n";
        }
      };
      emit(out_exp.oracle.vs_oracle, "vs-oracle");
      emit(out_exp.oracle.vs_reference, "vs-reference");
    } else {
      const ErrorReport& rep = out_exp.report;
      for (const auto& pt : rep.points) {
        out << row_prefix(out_exp.p) << rep.x_name << "," << detail::csv_num(pt.x) << ","
            << detail::csv_log2(pt.x) << "," << detail::csv_num(pt.estimate) << ","
            << detail::csv_log2(pt.estimate) << "," << detail::csv_num(pt.spread) << ","
            << detail::csv_num(rep.fit.fitted_value(pt.x)) << ",,," << rep.paths << ","
            << rep.aborted << "\n";
      }
    }
  }
  return out.str();
}

inline nlohmann::json fit_to_json(const RateFit& fit) {
  nlohmann::json j;
  j["fitted"] = fit.fitted;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["slope_se"] = fit.slope_se;
  j["r2"] = fit.r2;
  j["predicted"] = fit.predicted;
  j["tolerance"] = fit.tolerance;
  j["log_corrected"] = fit.log_corrected;
  j["mode"] = to_string(fit.mode);
  j["verdict"] = to_string(fit.verdict);
  return j;
}

inline std::string summary_json(const RunResult& r) {
  nlohmann::json j;
  j["config_hash"] = r.hash;
  j["name"] = r.config.name;
  j["kind"] = r.config.kind;
  j["seed"] = r.config.master_seed;
  j["all_pass"] = r.all_pass;
  j["aborted_ok"] = r.aborted_ok;
  j["warnings"] = r.warnings;
  nlohmann::json exps = nlohmann::json::array();
  for (const auto& out : r.outcomes) {
    nlohmann::json e;
    e["p"] = out.p;
    e["verdict"] = out.verdict;
    if (r.config.kind == "weak-error") {
      e["beta_phi"] = out.weak.beta_phi;
      e["phi_holder"] = out.weak.phi_holder;
      e["paths"] = out.weak.paths;
      e["aborted"] = out.weak.aborted;
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& pt : out.weak.points) {
        pts.push_back({{"n", pt.n},
                       {"weak_error", pt.weak_error},
                       {"paired_se", pt.paired_se},
                       {"bound_rhs", pt.bound_rhs}});
      }
      e["points"] = pts;
    } else if (r.config.kind == "oracle-compare") {
      e["vs_oracle"] = fit_to_json(out.oracle.vs_oracle.fit);
      e["vs_reference"] = fit_to_json(out.oracle.vs_reference.fit);
      e["slope_gap"] =
          std::abs(out.oracle.vs_oracle.fit.slope - out.oracle.vs_reference.fit.slope);
      e["paths"] = out.oracle.vs_oracle.paths;
      e["aborted"] = out.oracle.vs_oracle.aborted;
    } else {
      e["fit"] = fit_to_json(out.report.fit);
      e["paths"] = out.report.paths;
      e["aborted"] = out.report.aborted;
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& pt : out.report.points)
        pts.push_back({{"x", pt.x}, {"estimate", pt.estimate}, {"spread", pt.spread}});
      e["points"] = pts;
    }
    exps.push_back(e);
  }
  j["experiments"] = exps;
  return j.dump(2) + "\n";
}

inline std::string manifest_json(const RunResult& r) {
  nlohmann::json j;
  j["config_hash"] = r.hash;
  j["config_text"] = emit_config(r.config);
  j["version"] = kVersion;
  j["master_seed"] = r.config.master_seed;
  j["wall_seconds"] = r.wall_seconds;
  return j.dump(2) + "\n";
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

/// Runs a config and persists report.csv, summary.json, manifest.json into
/// the output directory. Returns the process exit code contract:
/// 0 all verdicts pass, 1 verdict failure or abort threshold exceeded.
inline int run_and_persist(const ExperimentConfig& cfg, const std::string& output_override = "") {
  ExperimentConfig effective = cfg;
  if (!output_override.empty()) effective.directory = output_override;
  const RunResult result = run_experiment(effective);
  const std::filesystem::path dir(effective.directory);
  std::filesystem::create_directories(dir);
  write_file(dir / "report.csv", report_csv(result));
  write_file(dir / "summary.json", summary_json(result));
  write_file(dir / "manifest.json", manifest_json(result));
  return result.exit_code();
}

// ---------------------------------------------------------------------------
// Preset registry
// ---------------------------------------------------------------------------

struct Preset {
  std::string name;
  std::string claim;  // which rate statement the preset targets
  ExperimentConfig config;
};

/// Shipped experiment presets: one per verified rate statement plus the
/// calibration and control runs used by the acceptance suite.
inline std::vector<Preset> presets() {
  std::vector<Preset> out;
  const auto add = [&](const std::string& name, const std::string& claim, ExperimentConfig cfg) {
    cfg.name = name;
    cfg.directory = "out/" + name;
    out.push_back({name, claim, cfg});
  };

  {
    // truncated driver: bounded jumps keep the exactness check at rounding level
    ExperimentConfig c;
    c.kind = "strong-rate";
    c.family = "constant:0.3:1.0";
    c.alpha = 1.5;
    c.truncated = true;
    c.epsilon = 1e-2;
    c.base_log2 = 12;
    c.n_ladder = {4, 5, 6, 7, 8, 9};
    c.p_list = {1.0};
    c.paths = 256;
    c.batches = 16;
    add("exactness-constant", "constant coefficients make the scheme exact on every grid", c);
  }
  {
    ExperimentConfig c;
    c.kind = "driver-moment";
    c.alpha = 1.5;
    c.truncated = true;
    c.p_list = {0.75};
    c.t_ladder = {-12, -11, -10, -9, -8, -7, -6, -5};
    c.epsilon = 2e-3;
    c.base_log2 = 14;
    c.paths = 200000;
    c.rate_mode = "within";
    c.tolerance = 0.07;
    add("lemma-c1-sub-alpha",
        "truncated driver, p < alpha: p-th moment grows like t^{p/alpha}, slope 0.5", c);
  }
  {
    // Deep window and drop mode keep the experiment in the single-jump
    // regime where the t-linear term dominates the fit.
    ExperimentConfig c;
    c.kind = "driver-moment";
    c.alpha = 1.5;
    c.truncated = true;
    c.p_list = {3.0};
    c.t_ladder = {-15, -14, -13, -12, -11, -10, -9, -8};
    c.epsilon = 0.1;
    c.small_jump_mode = "drop";
    c.base_log2 = 15;
    c.paths = 2000000;
    c.rate_mode = "within";
    c.tolerance = 0.10;
    add("lemma-c1-super-alpha",
        "truncated driver, p > alpha: p-th moment grows linearly in t, slope 1", c);
  }
  {
    ExperimentConfig c;
    c.kind = "driver-moment";
    c.alpha = 1.0;
    c.truncated = false;
    c.p_list = {0.5};
    c.t_ladder = {-12, -11, -10, -9, -8, -7, -6, -5};
    c.epsilon = 1e-4;
    c.base_log2 = 14;
    c.paths = 200000;
    c.rate_mode = "within";
    c.tolerance = 0.07;
    add("lemma-c2-alpha1-symmetric",
        "symmetric alpha = 1 nontruncated driver: p-th moment grows like t^p", c);
  }
  {
    ExperimentConfig c;
    c.kind = "strong-rate";
    c.family = "lipschitz";
    c.alpha = 1.5;
    c.truncated = false;
    c.p_list = {1.0};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 1e-3;
    c.base_log2 = 14;
    c.paths = 5000;
    c.predicted = -1.0 / 1.5;
    c.tolerance = 0.10;
    add("prop-pro3-lipschitz",
        "Lipschitz pair, nontruncated: strong p-moment error decays at least n^{-p/alpha} "
        "up to a log factor",
        c);
  }
  {
    ExperimentConfig c;
    c.kind = "strong-rate";
    c.family = "holder-drift:0.4";
    c.alpha = 1.5;
    c.truncated = false;
    c.p_list = {1.0};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 1e-3;
    c.base_log2 = 14;
    c.paths = 5000;
    c.predicted = -0.4 / 1.5;
    c.tolerance = 0.08;
    add("prop-pro2-holder",
        "beta-Holder drift, nondegenerate diffusion, nontruncated: error decays at least "
        "n^{-p beta/alpha}",
        c);
  }
  {
    ExperimentConfig c;
    c.kind = "strong-rate";
    c.family = "lipschitz";
    c.alpha = 1.0;
    c.truncated = false;
    c.p_list = {0.5};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 1e-4;
    c.base_log2 = 14;
    c.paths = 4000;
    c.predicted = -0.5;
    c.tolerance = 0.12;
    add("prop-pro3-alpha1-symmetric",
        "Lipschitz pair, symmetric alpha = 1: error decays at least (n/log n)^{-p}", c);
  }
  {
    ExperimentConfig c;
    c.kind = "strong-rate";
    c.family = "lipschitz";
    c.alpha = 1.5;
    c.truncated = true;
    c.p_list = {4.0};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 1e-3;
    c.base_log2 = 14;
    c.paths = 4000;
    c.predicted = -1.0;
    c.tolerance = 0.15;
    add("prop-pro4-truncated-highp",
        "Lipschitz pair, truncated driver, p > alpha: error decays at least n^{-1}", c);
  }
  {
    ExperimentConfig c;
    c.kind = "strong-rate";
    c.family = "holder-drift:0.8";
    c.alpha = 1.5;
    c.truncated = true;
    c.p_list = {1.0};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 1e-3;
    c.base_log2 = 14;
    c.paths = 4000;
    c.predicted = -0.8 / 1.5;
    c.tolerance = 0.10;
    add("prop-t1-holder-lowp",
        "Holder drift, truncated driver, p < alpha/beta: error decays at least n^{-p beta/alpha}",
        c);
  }
  {
    ExperimentConfig c;
    c.kind = "strong-rate";
    c.family = "holder-drift:0.8";
    c.alpha = 1.5;
    c.truncated = true;
    c.p_list = {1.875};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 1e-3;
    c.base_log2 = 14;
    c.paths = 4000;
    c.predicted = -1.0;
    c.tolerance = 0.20;
    add("prop-t1-holder-critp",
        "Holder drift, truncated driver, p = alpha/beta: error decays at least (n/log n)^{-1}", c);
  }
  {
    ExperimentConfig c;
    c.kind = "strong-rate";
    c.family = "holder-drift:0.8";
    c.alpha = 1.5;
    c.truncated = true;
    c.p_list = {4.0};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 1e-3;
    c.base_log2 = 14;
    c.paths = 4000;
    c.predicted = -1.0;
    c.tolerance = 0.15;
    add("prop-t1-holder-highp",
        "Holder drift, truncated driver, p > alpha/beta: error decays at least n^{-1}", c);
  }
  {
    ExperimentConfig c;
    c.kind = "weak-error";
    c.family = "lipschitz";
    c.alpha = 1.5;
    c.truncated = false;
    c.phi = "clamp-sqrt";
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 1e-3;
    c.base_log2 = 14;
    c.paths = 3000;
    add("cor-cl1-weak",
        "weak error for a C^beta test function is dominated by |phi|_beta times the "
        "beta-moment of the coupled strong error",
        c);
  }
  {
    ExperimentConfig c;
    c.kind = "increment-moment";
    c.family = "lipschitz";
    c.alpha = 1.5;
    c.truncated = false;
    c.p_list = {1.0};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 2e-3;
    c.base_log2 = 11;
    c.paths = 10000;
    c.rate_mode = "within";
    c.tolerance = 0.08;
    add("cor-co1-increment",
        "scheme grid increments, nontruncated, p < alpha: p-th moment decays like n^{-p/alpha}",
        c);
  }
  {
    ExperimentConfig c;
    c.kind = "increment-moment";
    c.family = "lipschitz";
    c.alpha = 1.5;
    c.truncated = true;
    c.p_list = {3.0};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 0.2;
    c.small_jump_mode = "drop";
    c.base_log2 = 11;
    c.paths = 400000;
    c.rate_mode = "within";
    c.tolerance = 0.10;
    add("cor-co2-increment-highp",
        "scheme grid increments, truncated, p > alpha: p-th moment decays like n^{-1}", c);
  }
  {
    ExperimentConfig c;
    c.kind = "oracle-compare";
    c.family = "lipschitz";
    c.alpha = 1.5;
    c.truncated = false;
    c.small_jump_mode = "drop";
    c.epsilon = 0.5;
    c.p_list = {1.0};
    c.n_ladder = {4, 5, 6, 7, 8, 9};
    c.base_log2 = 12;
    c.paths = 2000;
    c.ode_tol = 1e-9;
    c.slope_cap = -0.8;
    c.slope_gap = 0.1;
    add("oracle-finite-activity",
        "finite-activity driver: Euler error vs the event-driven ODE+jump oracle matches the "
        "error vs the fine-grid reference",
        c);
  }
  {
    ExperimentConfig c;
    c.kind = "strong-rate";
    c.family = "lipschitz";
    c.alpha = 1.5;
    c.truncated = false;
    c.p_list = {1.0};
    c.n_ladder = {4, 5, 6, 7, 8, 9, 10};
    c.epsilon = 5e-4;
    c.base_log2 = 14;
    c.paths = 5000;
    c.predicted = -1.0 / 1.5;
    c.tolerance = 0.10;
    add("driver-bias-control",
        "prop-pro3-lipschitz rerun with the cutoff halved; per-n estimates must move by less "
        "than one median-of-means spread",
        c);
  }
  return out;
}

inline const Preset& find_preset(const std::string& name) {
  static const std::vector<Preset> all = presets();
  for (const auto& p : all)
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset '" + name + "'");
}

/// Debug dump of one noise realization: {seed, jumps:[[t, y...]...], mode,
/// epsilon}. Skeletons are reproducible from (master_seed, path_index,
/// config), so they are never persisted as artifacts.
inline std::string skeleton_json(const ExperimentConfig& cfg, std::uint64_t path_index) {
  const DriverSpec spec = driver_spec_from_config(cfg);
  const PathSkeleton skel = build_skeleton(cfg.master_seed, path_index, spec);
  nlohmann::json j;
  j["seed"] = cfg.master_seed;
  j["mode"] = cfg.small_jump_mode;
  j["epsilon"] = cfg.epsilon;
  nlohmann::json jumps = nlohmann::json::array();
  for (const auto& jump : skel.jumps) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(jump.time);
    for (int i = 0; i < jump.mark.dim(); ++i) row.push_back(jump.mark[i]);
    jumps.push_back(row);
  }
  j["jumps"] = jumps;
  return j.dump(2) + "\n";
}

}  // namespace levysim
