#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "levysim/runner.hpp"

using namespace levysim;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ExperimentConfig tiny_constant_config() {
  ExperimentConfig c;
  c.name = "tiny-exact";
  c.kind = "strong-rate";
  c.family = "constant:0.2:1.0";
  c.alpha = 1.5;
  c.truncated = true;
  c.epsilon = 0.05;
  c.base_log2 = 10;
  c.n_ladder = {4, 5, 6, 7};
  c.p_list = {1.0};
  c.paths = 64;
  c.batches = 8;
  c.directory = "test_out/tiny-exact";
  return c;
}

}  // namespace

TEST_CASE("preset registry: size, uniqueness, claims") {
  const auto all = presets();
  CHECK(all.size() >= 10);
  std::set<std::string> names;
  for (const auto& p : all) {
    CHECK(names.insert(p.name).second);
    CHECK_FALSE(p.claim.empty());
    CHECK_NOTHROW(driver_spec_from_config(p.config));
  }
  CHECK_NOTHROW(find_preset("prop-pro3-lipschitz"));
  CHECK_THROWS_AS(find_preset("nope"), std::invalid_argument);
}

TEST_CASE("every preset round-trips through the config parser losslessly") {
  for (const auto& p : presets()) {
    const std::string text = emit_config(p.config);
    const ExperimentConfig parsed = parse_config(text, p.name);
    CHECK(emit_config(parsed) == text);
    CHECK(config_hash(parsed) == config_hash(p.config));
  }
}

TEST_CASE("config diagnostics carry file and line") {
  const std::string bad =
      "[experiment]\nname = x\nkind = strong-rate\n[driver]\nalpha = 2.5\n";
  try {
    parse_config(bad, "bad.cfg");
    FAIL("expected a diagnostic");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.cfg:5") != std::string::npos);
    CHECK(msg.find("alpha") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected with their line number") {
  const std::string bad = "[experiment]\nname = x\n[driver]\nalfa = 1.5\n";
  try {
    parse_config(bad, "typo.cfg");
    FAIL("expected a diagnostic");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("typo.cfg:4") != std::string::npos);
    CHECK(std::string(e.what()).find("driver.alfa") != std::string::npos);
  }
}

TEST_CASE("alpha = 1 with an asymmetric nontruncated driver names the symmetry condition") {
  ExperimentConfig c = tiny_constant_config();
  c.alpha = 1.0;
  c.truncated = false;
  c.density = "two-sided:2:1";
  c.p_list = {0.5};
  const std::string text = emit_config(c);
  try {
    parse_config(text, "sym.cfg");
    FAIL("expected a diagnostic");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("(sym)") != std::string::npos);
  }
}

TEST_CASE("nontruncated drivers reject moments at or above alpha") {
  ExperimentConfig c = tiny_constant_config();
  c.truncated = false;
  c.p_list = {1.5};
  try {
    parse_config(emit_config(c), "p.cfg");
    FAIL("expected a diagnostic");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("p < alpha") != std::string::npos);
  }
}

TEST_CASE("run_experiment: constant coefficients give exact verdicts and pass") {
  const RunResult r = run_experiment(tiny_constant_config());
  CHECK(r.all_pass);
  CHECK(r.aborted_ok);
  CHECK(r.exit_code() == 0);
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].verdict == "exact");
  for (const auto& pt : r.outcomes[0].report.points) CHECK(pt.estimate <= 1e-12);
}

TEST_CASE("artifacts: files exist, header fixed, reruns byte-identical across workers") {
  ExperimentConfig c = tiny_constant_config();
  c.family = "lipschitz";  // nonzero errors so the CSV carries real numbers
  c.name = "tiny-lipschitz";
  c.rate_mode = "at-most";
  c.predicted = 0.0;  // 64-path fits are noise; only byte-identity matters here
  c.directory = "test_out/deterministic-w1";
  c.workers = 1;
  const int code1 = run_and_persist(c);
  c.directory = "test_out/deterministic-w4";
  c.workers = 4;
  const int code4 = run_and_persist(c);
  CHECK(code1 == code4);

  const std::string csv1 = slurp("test_out/deterministic-w1/report.csv");
  const std::string csv4 = slurp("test_out/deterministic-w4/report.csv");
  CHECK(csv1 == csv4);
  const std::string hdr = csv1.substr(0, csv1.find('\n'));
  CHECK(hdr ==
        "config_hash,name,kind,p,x_name,x,log2_x,estimate,log2_estimate,spread,fit_value,"
        "bound_rhs,paired_se,paths,aborted");

  // the hash excludes directory and worker count, so the summaries are
  // byte-identical as well
  const std::string s1 = slurp("test_out/deterministic-w1/summary.json");
  const std::string s4 = slurp("test_out/deterministic-w4/summary.json");
  CHECK(s1 == s4);

  // manifest carries the version string and the full config text
  const std::string manifest = slurp("test_out/deterministic-w1/manifest.json");
  CHECK(manifest.find(kVersion) != std::string::npos);
  CHECK(manifest.find("config_text") != std::string::npos);
}

TEST_CASE("skeleton debug dump carries the documented fields") {
  ExperimentConfig c = tiny_constant_config();
  const std::string dump = skeleton_json(c, 3);
  const auto j = nlohmann::json::parse(dump);
  CHECK(j.contains("seed"));
  CHECK(j.contains("jumps"));
  CHECK(j.contains("mode"));
  CHECK(j.contains("epsilon"));
  CHECK(j["epsilon"].get<double>() == Catch::Approx(0.05));
  for (const auto& row : j["jumps"]) REQUIRE(row.size() == 2);  // [t, y] in d=1
}

TEST_CASE("weak test function registry") {
  const WeakTestFunction f = weak_function_from_name("clamp-sqrt");
  Vec x(1);
  x[0] = 0.49;
  CHECK(f.fn(x) == Catch::Approx(0.7));
  x[0] = 9.0;
  CHECK(f.fn(x) == Catch::Approx(1.0));
  CHECK(f.beta == Catch::Approx(0.5));
  CHECK_THROWS_AS(weak_function_from_name("nope"), std::invalid_argument);
}

TEST_CASE("a Holder exponent below the solvability line only warns") {
  ExperimentConfig c = tiny_constant_config();
  c.family = "holder-drift:0.2";  // 0.2 <= 1 - alpha/2 = 0.25
  c.name = "tiny-warn";
  c.directory = "test_out/tiny-warn";
  const RunResult r = run_experiment(c);
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings[0].find("beta") != std::string::npos);
}

TEST_CASE("driver-moment config validation requires a dyadic t ladder") {
  ExperimentConfig c;
  c.kind = "driver-moment";
  c.alpha = 1.5;
  c.truncated = true;
  c.p_list = {0.75};
  c.paths = 128;
  c.batches = 8;
  c.t_ladder.clear();
  CHECK_THROWS_AS(parse_config(emit_config(c), "t.cfg"), std::invalid_argument);
}
