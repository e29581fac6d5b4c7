// sim: run the scenario experiments from a config file.
//
//   sim <eigen|if|spectrum|bounds|validate> --config <path> --out <dir>
//       [--seed N] [--trials N]
//
// SIM_THREADS sets the worker count (default: hardware concurrency).
// Exit codes: 0 ok, 1 invariant failure, 2 config error.
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "fdasim/fdasim.hpp"

namespace {

unsigned thread_count() {
  if (const char* env = std::getenv("SIM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "sim: ignoring invalid SIM_THREADS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Airborne phased-MIMO radar clutter and FDA jamming STAP simulator"};
  app.set_version_flag("--version", FDASIM_VERSION);
  std::string command, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  app.add_option("command", command, "eigen | if | spectrum | bounds | validate")
      ->required()
      ->check(CLI::IsMember({"eigen", "if", "spectrum", "bounds", "validate"}));
  app.add_option("--config", config_path, "scenario config file")->required();
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--trials", trials, "Monte Carlo trials for `if` (0 = analytic)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  fdasim::ScenarioConfig cfg;
  try {
    cfg = fdasim::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (trials) {
      cfg.trials = *trials;
      fdasim::validate(cfg);
    }
  } catch (const fdasim::ConfigError& e) {
    std::cerr << "sim: config error: " << config_path << ": " << e.what() << "\n";
    return 2;
  }

  fdasim::RunInfo info;
  info.command = command;
  info.started_at = fdasim::utc_timestamp();
  info.threads = thread_count();
  try {
    fdasim::OutputDirectory out(out_dir);
    bool ok = true;
    if (command == "eigen") {
      fdasim::run_eigen(cfg, out, std::cout, info.threads);
    } else if (command == "if") {
      fdasim::run_if(cfg, out, std::cout, info.threads);
    } else if (command == "spectrum") {
      fdasim::run_spectrum(cfg, out, std::cout, info.threads);
    } else if (command == "bounds") {
      fdasim::run_bounds(cfg, out, std::cout);
    } else {
      ok = fdasim::run_validate(cfg, out, std::cout);
    }
    fdasim::write_manifest(out, cfg, info);
    if (!ok) {
      std::cerr << "sim: invariant failure\n";
      return 1;
    }
  } catch (const fdasim::ConfigError& e) {
    std::cerr << "sim: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
