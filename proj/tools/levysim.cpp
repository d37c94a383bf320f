// Batch CLI for the levysim experiment library.
//
// Exit codes for `run`: 0 all verdicts pass, 1 verdict or abort-threshold
// failure, 2 invalid configuration.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "levysim/runner.hpp"
#include "levysim/version.hpp"

namespace {

levysim::ExperimentConfig load_config_or_preset(const std::string& arg) {
  if (arg.rfind("preset:", 0) == 0) return levysim::find_preset(arg.substr(7)).config;
  return levysim::load_config_file(arg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levysim: Euler schemes for stable-like jump SDEs with coupled-grid "
               "noise and convergence-rate experiments"};
  app.set_version_flag("--version", levysim::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  int workers = -1;

  auto* run_cmd = app.add_subcommand("run", "run an experiment config and persist artifacts");
  run_cmd->add_option("config", config_path, "config file or preset:<name>")->required();
  run_cmd->add_option("--output", output_override, "override the output directory")
      ->envname("LEVYSIM_OUTPUT_DIR");
  run_cmd->add_option("--workers", workers, "worker pool size (0 = hardware)")
      ->envname("LEVYSIM_WORKERS");

  auto* presets_cmd = app.add_subcommand("presets", "list shipped experiment presets");
  std::string write_dir;
  presets_cmd->add_option("--write", write_dir, "also write each preset as <dir>/<name>.cfg");

  auto* validate_cmd = app.add_subcommand("validate", "parse and validate a config");
  validate_cmd->add_option("config", config_path, "config file or preset:<name>")->required();

  auto* dump_cmd =
      app.add_subcommand("dump-skeleton", "dump one noise realization as a JSON record");
  std::uint64_t path_index = 0;
  dump_cmd->add_option("config", config_path, "config file or preset:<name>")->required();
  dump_cmd->add_option("path-index", path_index, "path index of the realization")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      levysim::ExperimentConfig cfg = load_config_or_preset(config_path);
      if (workers >= 0) cfg.workers = workers;
      const int code = levysim::run_and_persist(cfg, output_override);
      const std::filesystem::path dir =
          output_override.empty() ? cfg.directory : output_override;
      std::cout << (code == 0 ? "PASS " : "FAIL ") << cfg.name << " -> " << dir.string() << "\n";
      return code;
    }
    if (*presets_cmd) {
      for (const auto& p : levysim::presets()) {
        std::cout << p.name << "\n    " << p.claim << "\n";
        if (!write_dir.empty()) {
          std::filesystem::create_directories(write_dir);
          levysim::write_file(std::filesystem::path(write_dir) / (p.name + ".cfg"),
                              levysim::emit_config(p.config));
        }
      }
      return 0;
    }
    if (*validate_cmd) {
      const levysim::ExperimentConfig cfg = load_config_or_preset(config_path);
      std::cout << "OK " << cfg.name << " " << levysim::config_hash(cfg) << "\n";
      return 0;
    }
    if (*dump_cmd) {
      const levysim::ExperimentConfig cfg = load_config_or_preset(config_path);
      std::cout << levysim::skeleton_json(cfg, path_index);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
