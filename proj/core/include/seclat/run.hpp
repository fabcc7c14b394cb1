#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seclat/bounds.hpp"
#include "seclat/sim.hpp"

namespace seclat {

/// Raised on malformed configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { kBounds, kSimulate, kBoth };

enum class OutputFormat { kCsv, kJson };

struct SweepAxis {
  std::string name;  // one of: k, alpha, b0, lambda_h, delay-scale
  std::vector<double> values;
};

struct RunConfig {
  ModelParams base;
  std::optional<SweepAxis> sweep;
  RunMode mode = RunMode::kBounds;
  // Simulation settings (used in simulate/both modes).
  int64_t trials = 1000000;
  uint64_t seed = 0;
  int premine_cycles = 1000;
  int race_cutoff = 64;
  int threads = 0;
  std::string output_path;
  OutputFormat format = OutputFormat::kCsv;
  double eps_tail = kDefaultEpsTail;
  double eps_residual = kDefaultEpsTail;
  bool intermediates = false;  // JSON output only
};

/// Parses the JSON configuration document (see configs/ for examples).
/// Throws ConfigError with a readable message on any problem.
RunConfig parse_run_config(const std::string& json_text);

/// Parses a --sweep specification: "k=1..25" (integer range) or
/// "alpha=0.8,0.85,0.9" (explicit list).
SweepAxis parse_sweep_spec(const std::string& spec);

/// Evaluates every sweep point (bounds and/or simulation), writes the output
/// file, and reports mempool warnings and per-point failures to
/// `diagnostics`. Points that fail (unstable parameters, non-convergence)
/// are skipped; the remaining rows are still written. Returns 0 on full
/// success, 1 if any point failed.
int run(const RunConfig& config, std::ostream& diagnostics);

}  // namespace seclat
