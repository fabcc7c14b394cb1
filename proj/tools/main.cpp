// seclat: safety-violation bounds and attack simulation for longest-chain
// proof-of-work under random network delays. See README.md for the
// configuration schema and output formats.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "seclat/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Upper/lower bounds on the probability that a k-deep confirmed "
      "transaction is discarded, with a cross-validating attack simulator"};

  std::string config_path;
  std::string mode;
  std::string out_path;
  std::string format;
  std::string sweep_spec;
  uint64_t seed = 0;
  int64_t trials = 0;
  double eps_tail = 0.0;
  bool intermediates = false;
  int threads = 0;

  app.add_option("--config", config_path, "JSON configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "bounds | simulate | both");
  app.add_option("--out", out_path, "output file path ('-' for stdout)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--seed", seed, "simulation seed override");
  app.add_option("--trials", trials, "simulation trials override");
  app.add_option("--eps-tail", eps_tail, "pmf truncation threshold override");
  app.add_option("--sweep", sweep_spec,
                 "sweep override, e.g. k=1..25 or alpha=0.8,0.85,0.9");
  app.add_flag("--intermediates", intermediates,
               "include intermediate distributions in JSON output");
  app.add_option("--threads", threads, "simulation worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  seclat::RunConfig cfg;
  try {
    std::ifstream in(config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    cfg = seclat::parse_run_config(buffer.str());

    if (!mode.empty()) {
      if (mode == "bounds") {
        cfg.mode = seclat::RunMode::kBounds;
      } else if (mode == "simulate") {
        cfg.mode = seclat::RunMode::kSimulate;
      } else if (mode == "both") {
        cfg.mode = seclat::RunMode::kBoth;
      } else {
        throw seclat::ConfigError("unknown mode \"" + mode + "\"");
      }
    }
    if (!out_path.empty()) cfg.output_path = out_path;
    if (!format.empty()) {
      if (format == "csv") {
        cfg.format = seclat::OutputFormat::kCsv;
      } else if (format == "json") {
        cfg.format = seclat::OutputFormat::kJson;
      } else {
        throw seclat::ConfigError("unknown format \"" + format + "\"");
      }
    }
    if (app.count("--seed")) cfg.seed = seed;
    if (trials > 0) cfg.trials = trials;
    if (eps_tail > 0.0) cfg.eps_tail = eps_tail;
    if (threads > 0) cfg.threads = threads;
    if (!sweep_spec.empty()) cfg.sweep = seclat::parse_sweep_spec(sweep_spec);
  } catch (const seclat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    return seclat::run(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
