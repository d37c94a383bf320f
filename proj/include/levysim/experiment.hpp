#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "levysim/coefficients.hpp"
#include "levysim/driver.hpp"
#include "levysim/stats.hpp"
#include "levysim/version.hpp"

namespace levysim {

// ---------------------------------------------------------------------------
// Config file model
// ---------------------------------------------------------------------------

/// Flat sectioned key=value experiment description. The canonical emission
/// (fixed section and key order, round-trip float formatting) is what gets
/// hashed and archived, so identical configs always carry identical hashes.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string kind = "strong-rate";  // strong-rate | weak-error | driver-moment |
                                     // increment-moment | oracle-compare
  // [driver]
  double alpha = 1.5;
  bool truncated = false;
  std::string density = "isotropic";
  int dimension = 1;
  double epsilon = 1e-3;
  std::string small_jump_mode = "gaussian";  // gaussian | drop
  int base_log2 = 14;
  bool exact_marginals = false;
  // [coefficients]
  std::string family = "lipschitz";
  double x0 = 0.0;
  // [estimate]
  std::vector<double> p_list{1.0};
  std::vector<int> n_ladder{4, 5, 6, 7, 8, 9, 10};  // log2 n
  std::vector<int> t_ladder;                        // log2 t (negative)
  std::uint64_t paths = 1000;
  int batches = 32;
  // [rate]
  std::optional<double> predicted;  // auto from the case tables when absent
  double tolerance = 0.10;
  std::string rate_mode = "at-most";  // at-most | at-least | within
  // [weak]
  std::string phi = "clamp-sqrt";
  // [oracle]
  double ode_tol = 1e-9;
  double slope_cap = -0.8;
  double slope_gap = 0.1;
  // [output]
  std::string directory = "out";
  std::uint64_t master_seed = 20160622;
  int workers = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

inline std::string format_double_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

struct ConfigEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct RawConfig {
  std::map<std::string, ConfigEntry> entries;  // "section.key" -> entry
  std::string path = "<string>";

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = entries.find(key);
    const int line = it != entries.end() ? it->second.line : 0;
    throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + msg);
  }
};

inline RawConfig parse_raw_config(const std::string& text, const std::string& path) {
  RawConfig raw;
  raw.path = path;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": key outside any section");
    const std::string full = section + "." + key;
    if (raw.entries.count(full))
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": duplicate key '" + full + "'");
    raw.entries[full] = {value, lineno, false};
  }
  return raw;
}

inline std::vector<int> parse_int_ladder(const std::string& s, const std::string& what) {
  std::vector<int> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const int a = std::stoi(s.substr(0, dots));
    const int b = std::stoi(s.substr(dots + 2));
    if (b < a) throw std::invalid_argument(what + ": descending range");
    for (int v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stoi(trim(tok)));
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(parse_double(trim(tok), what));
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

}  // namespace detail

/// Canonical config text: fixed section/key order, 17-digit floats. Parsing
/// this emission reproduces the config exactly.
inline std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "name = " << c.name << "\n";
  out << "kind = " << c.kind << "\n";
  out << "\n[driver]\n";
  out << "alpha = " << detail::format_double(c.alpha) << "\n";
  out << "truncated = " << (c.truncated ? "true" : "false") << "\n";
  out << "density = " << c.density << "\n";
  out << "dimension = " << c.dimension << "\n";
  out << "epsilon = " << detail::format_double(c.epsilon) << "\n";
  out << "small_jump_mode = " << c.small_jump_mode << "\n";
  out << "base_log2 = " << c.base_log2 << "\n";
  out << "exact_marginals = " << (c.exact_marginals ? "true" : "false") << "\n";
  out << "\n[coefficients]\n";
  out << "family = " << c.family << "\n";
  out << "x0 = " << detail::format_double(c.x0) << "\n";
  out << "\n[estimate]\n";
  out << "p = " << detail::format_double_list(c.p_list) << "\n";
  out << "n_ladder_log2 = " << detail::format_int_list(c.n_ladder) << "\n";
  if (!c.t_ladder.empty()) out << "t_ladder_log2 = " << detail::format_int_list(c.t_ladder) << "\n";
  out << "paths = " << c.paths << "\n";
  out << "batches = " << c.batches << "\n";
  out << "\n[rate]\n";
  if (c.predicted) out << "predicted = " << detail::format_double(*c.predicted) << "\n";
  out << "tolerance = " << detail::format_double(c.tolerance) << "\n";
  out << "mode = " << c.rate_mode << "\n";
  out << "\n[weak]\n";
  out << "phi = " << c.phi << "\n";
  out << "\n[oracle]\n";
  out << "ode_tol = " << detail::format_double(c.ode_tol) << "\n";
  out << "slope_cap = " << detail::format_double(c.slope_cap) << "\n";
  out << "slope_gap = " << detail::format_double(c.slope_gap) << "\n";
  out << "\n[output]\n";
  out << "directory = " << c.directory << "\n";
  out << "master_seed = " << c.master_seed << "\n";
  out << "workers = " << c.workers << "\n";
  return out.str();
}

/// FNV-1a 64 of the canonical config text, as fixed-width hex. Execution
/// details that cannot change any estimate (output directory, worker count)
/// are excluded, so reruns of one experiment carry one hash.
inline std::string config_hash(const ExperimentConfig& c) {
  ExperimentConfig content = c;
  content.directory = "";
  content.workers = 0;
  const std::string text = emit_config(content);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Parses and validates a config; every diagnostic carries file:line.
inline ExperimentConfig parse_config(const std::string& text,
                                     const std::string& path = "<string>") {
  detail::RawConfig raw = detail::parse_raw_config(text, path);
  ExperimentConfig c;

  const auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = raw.entries.find(key);
    if (it == raw.entries.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  };
  const auto get_double = [&](const std::string& key, double& target) {
    if (auto v = get(key)) {
      try {
        target = detail::parse_double(*v, key);
      } catch (const std::exception& e) {
        raw.fail(key, e.what());
      }
    }
  };
  const auto get_int = [&](const std::string& key, int& target) {
    if (auto v = get(key)) {
      try {
        target = std::stoi(*v);
      } catch (const std::exception&) {
        raw.fail(key, "cannot parse integer '" + *v + "'");
      }
    }
  };
  const auto get_u64 = [&](const std::string& key, std::uint64_t& target) {
    if (auto v = get(key)) {
      try {
        target = std::stoull(*v);
      } catch (const std::exception&) {
        raw.fail(key, "cannot parse integer '" + *v + "'");
      }
    }
  };
  const auto get_bool = [&](const std::string& key, bool& target) {
    if (auto v = get(key)) {
      if (*v == "true")
        target = true;
      else if (*v == "false")
        target = false;
      else
        raw.fail(key, "expected true or false, got '" + *v + "'");
    }
  };
  const auto get_string = [&](const std::string& key, std::string& target) {
    if (auto v = get(key)) target = *v;
  };

  get_string("experiment.name", c.name);
  get_string("experiment.kind", c.kind);
  get_double("driver.alpha", c.alpha);
  get_bool("driver.truncated", c.truncated);
  get_string("driver.density", c.density);
  get_int("driver.dimension", c.dimension);
  get_double("driver.epsilon", c.epsilon);
  get_string("driver.small_jump_mode", c.small_jump_mode);
  get_int("driver.base_log2", c.base_log2);
  get_bool("driver.exact_marginals", c.exact_marginals);
  get_string("coefficients.family", c.family);
  get_double("coefficients.x0", c.x0);
  if (auto v = get("estimate.p")) {
    try {
      c.p_list = detail::parse_double_list(*v, "estimate.p");
    } catch (const std::exception& e) {
      raw.fail("estimate.p", e.what());
    }
  }
  if (auto v = get("estimate.n_ladder_log2")) {
    try {
      c.n_ladder = detail::parse_int_ladder(*v, "n_ladder_log2");
    } catch (const std::exception& e) {
      raw.fail("estimate.n_ladder_log2", e.what());
    }
  }
  if (auto v = get("estimate.t_ladder_log2")) {
    try {
      c.t_ladder = detail::parse_int_ladder(*v, "t_ladder_log2");
    } catch (const std::exception& e) {
      raw.fail("estimate.t_ladder_log2", e.what());
    }
  }
  get_u64("estimate.paths", c.paths);
  get_int("estimate.batches", c.batches);
  if (auto v = get("rate.predicted")) {
    try {
      c.predicted = detail::parse_double(*v, "rate.predicted");
    } catch (const std::exception& e) {
      raw.fail("rate.predicted", e.what());
    }
  }
  get_double("rate.tolerance", c.tolerance);
  get_string("rate.mode", c.rate_mode);
  get_string("weak.phi", c.phi);
  get_double("oracle.ode_tol", c.ode_tol);
  get_double("oracle.slope_cap", c.slope_cap);
  get_double("oracle.slope_gap", c.slope_gap);
  get_string("output.directory", c.directory);
  get_u64("output.master_seed", c.master_seed);
  get_int("output.workers", c.workers);

  for (const auto& [key, entry] : raw.entries)
    if (!entry.used)
      throw std::invalid_argument(path + ":" + std::to_string(entry.line) + ": unknown key '" +
                                  key + "'");

  // Schema validation with line-anchored diagnostics.
  const auto check = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) raw.fail(key, msg);
  };
  check(c.kind == "strong-rate" || c.kind == "weak-error" || c.kind == "driver-moment" ||
            c.kind == "increment-moment" || c.kind == "oracle-compare",
        "experiment.kind", "unknown kind '" + c.kind + "'");
  check(c.alpha >= 1.0 && c.alpha < 2.0, "driver.alpha", "alpha must lie in [1,2)");
  check(c.dimension >= 1 && c.dimension <= kMaxDim, "driver.dimension", "dimension must be 1..3");
  check(c.epsilon > 0.0 && c.epsilon <= 1.0, "driver.epsilon", "epsilon must lie in (0,1]");
  check(c.base_log2 >= 6 && c.base_log2 <= 24, "driver.base_log2", "base_log2 must lie in [6,24]");
  check(c.small_jump_mode == "gaussian" || c.small_jump_mode == "drop", "driver.small_jump_mode",
        "small_jump_mode must be gaussian or drop");
  check(c.rate_mode == "at-most" || c.rate_mode == "at-least" || c.rate_mode == "within",
        "rate.mode", "mode must be at-most, at-least or within");
  check(c.batches >= 2, "estimate.batches", "need at least 2 batches");
  check(c.paths >= static_cast<std::uint64_t>(4 * c.batches), "estimate.paths",
        "need at least 4 paths per batch");

  AngularDensity density;
  try {
    density = density_from_name(c.density, c.dimension);
  } catch (const std::exception& e) {
    raw.fail("driver.density", e.what());
  }
  if (c.alpha == 1.0 && !c.truncated && !density.symmetric)
    raw.fail("driver.alpha",
             "alpha = 1 with the nontruncated driver requires a symmetric density: "
             "condition (sym) rho(-y) = rho(y) is violated by '" +
                 c.density + "'");
  if (!c.truncated && (c.kind == "strong-rate" || c.kind == "driver-moment" ||
                       c.kind == "increment-moment" || c.kind == "oracle-compare")) {
    for (double p : c.p_list)
      if (!(p < c.alpha))
        raw.fail("estimate.p",
                 "nontruncated driver: only the moments p < alpha exist (p = " +
                     detail::format_double(p) + ", alpha = " + detail::format_double(c.alpha) + ")");
  }
  if (c.kind == "driver-moment") {
    check(!c.t_ladder.empty(), "estimate.t_ladder_log2", "driver-moment requires a t ladder");
    for (int m : c.t_ladder)
      check(m <= 0 && -m <= c.base_log2, "estimate.t_ladder_log2",
            "t ladder entries must be dyadic times 2^m within the base grid, m <= 0");
  }
  if (c.kind == "oracle-compare")
    check(c.small_jump_mode == "drop", "driver.small_jump_mode",
          "oracle-compare requires the finite-activity drop mode");
  try {
    builtin_coefficients(c.family, c.dimension);
  } catch (const std::exception& e) {
    if (c.kind != "driver-moment") raw.fail("coefficients.family", e.what());
  }

  // Beta below the solvability line only warns (the Lipschitz-case rates do
  // not need it); emitted by run(), not here.
  return c;
}

inline ExperimentConfig load_config_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument(file + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), file);
}

// ---------------------------------------------------------------------------
// Derived objects
// ---------------------------------------------------------------------------

inline DriverSpec driver_spec_from_config(const ExperimentConfig& c) {
  DriverSpec spec;
  spec.index.alpha = c.alpha;
  spec.index.truncated = c.truncated;
  spec.density = density_from_name(c.density, c.dimension);
  spec.epsilon_cut = c.epsilon;
  spec.small_jump_mode =
      c.small_jump_mode == "drop" ? SmallJumpMode::drop : SmallJumpMode::gaussian_surrogate;
  spec.base_log2 = c.base_log2;
  spec.exact_marginals = c.exact_marginals;
  spec.validate();
  return spec;
}

inline SdeCoefficients coefficients_from_config(const ExperimentConfig& c) {
  SdeCoefficients coeffs = builtin_coefficients(c.family, c.dimension);
  for (int i = 0; i < coeffs.dim; ++i) coeffs.x0[i] = c.x0;
  return coeffs;
}

/// Bounded Holder test functions for the weak-error experiments.
struct WeakTestFunction {
  std::string name;
  std::function<double(const Vec&)> fn;
  double beta = 1.0;
  double holder = 1.0;
};

inline WeakTestFunction weak_function_from_name(const std::string& name) {
  if (name == "clamp-sqrt")
    return {name, [](const Vec& x) { return std::sqrt(std::min(x.norm(), 1.0)); }, 0.5, 1.0};
  if (name == "constant") return {name, [](const Vec&) { return 1.0; }, 1.0, 0.0};
  if (name == "cos-first") return {name, [](const Vec& x) { return std::cos(x[0]); }, 1.0, 1.0};
  throw std::invalid_argument("unknown weak test function '" + name + "'");
}

}  // namespace levysim
