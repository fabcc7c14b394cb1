#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seclat/delay.hpp"
#include "seclat/pmf.hpp"

namespace seclat {

struct SimConfig {
  ModelParams params;
  int64_t trials = 1;
  uint64_t seed = 0;
  /// Jumper cycles simulated before the target transaction arrives; warms
  /// the pre-mining lead walk into stationarity.
  int premine_cycles = 1000;
  /// Honest lead at which a race is declared lost. Must be >= params.k.
  int race_cutoff = 64;
  bool record_phases = false;
  /// Worker threads; 0 picks the hardware count. Results do not depend on
  /// this (per-trial RNG streams).
  int threads = 0;

  void validate() const;
};

struct PhaseStats {
  std::vector<uint64_t> lead_at_tx;      // pre-mining lead when tx arrives
  std::vector<uint64_t> confirmation;    // adversarial blocks over the k cycles
  std::vector<uint64_t> race_recovered;  // best deficit recovered in the race
};

struct SimOutcome {
  int64_t violations = 0;
  int64_t trials = 0;
  double frequency = 0.0;
  double wilson_low = 0.0;   // 95% Wilson score interval
  double wilson_high = 0.0;
  /// Gambler's-ruin style certificate for the mass lost to race_cutoff,
  /// (beta/alpha)^(race_cutoff - k). Exact at zero delay, indicative
  /// otherwise; add it to any upper tolerance that consumes `frequency`.
  double cutoff_truncation_bound = 0.0;
  std::optional<PhaseStats> phases;
};

/** Monte Carlo of the explicit private attack: pre-mine from genesis while
 *  maximally delaying every jumper, let the transaction confirm over k
 *  jumper cycles, then race the honest chain until caught up or race_cutoff
 *  behind. Ties favor the adversary. Deterministic for a fixed (seed,
 *  config); trials run on independent RNG streams so any thread count gives
 *  the same outcome.
 */
SimOutcome simulate(const SimConfig& config);

/// Empirical pmf of one of the analytic count distributions, sampled the
/// way the simulator would. `which` is one of "C_alpha", "C_delta",
/// "C_delta_bar", "C_b0", "Z". Used by the distribution-validation tests.
Pmf sample_count_distribution(const SimConfig& config,
                              const std::string& which);

/// JSON rendering of an outcome (stable field order); phase histograms are
/// included when present.
std::string to_json_string(const SimOutcome& outcome, int indent = -1);

/// Phase histograms as CSV: value,lead_at_tx,confirmation,race_recovered.
std::string phase_stats_csv(const PhaseStats& stats);

}  // namespace seclat
