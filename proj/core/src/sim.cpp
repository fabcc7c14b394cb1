#include "seclat/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#if defined(SECLAT_VENDORED_JSON)
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

#include "seclat/rng.hpp"

namespace seclat {

namespace {

/// Samples the adversary's block count over one jumper cycle's effective
/// idle window: the jumper's delay, or max(delay, Erlang(b0, lambda_h)) when
/// the high-fee wait applies. Exact per-kind shortcuts (negative binomial as
/// a geometric sum, etc.) keep the hot path free of logs.
class CycleSampler {
 public:
  CycleSampler(const ModelParams& params, double arrival_rate)
      : params_(params), rate_(arrival_rate) {
    const DelaySpec& d = params.delay;
    use_max_ = params.b0 > 0;
    if (!use_max_) {
      switch (d.kind()) {
        case DelayKind::kDeterministic:
          poisson_mean_ = rate_ * d.value();
          break;
        case DelayKind::kExponential:
          geo_p_ = d.rate() / (d.rate() + rate_);
          geo_reps_ = 1;
          break;
        case DelayKind::kErlang:
          if (d.shape() <= 16.0) {
            geo_p_ = d.rate() / (d.rate() + rate_);
            geo_reps_ = static_cast<int>(d.shape());
          }
          break;
        default:
          break;
      }
    }
  }

  int64_t count(Rng& rng) const {
    if (rate_ == 0.0) return 0;
    if (!use_max_) {
      if (geo_reps_ == 1) return sample_geometric_failures(rng, geo_p_);
      if (geo_reps_ > 1) {
        int64_t total = 0;
        for (int i = 0; i < geo_reps_; ++i) {
          total += sample_geometric_failures(rng, geo_p_);
        }
        return total;
      }
      if (poisson_mean_ >= 0.0) return sample_poisson(rng, poisson_mean_);
      return sample_poisson(rng, rate_ * sample_delay(rng));
    }
    const double idle = std::max(
        sample_delay(rng),
        sample_erlang(rng, params_.b0, params_.lambda_h));
    return sample_poisson(rng, rate_ * idle);
  }

  double sample_delay(Rng& rng) const {
    const DelaySpec& d = params_.delay;
    switch (d.kind()) {
      case DelayKind::kDeterministic:
        return d.value();
      case DelayKind::kExponential:
        return sample_exponential(rng, d.rate());
      case DelayKind::kErlang:
        return sample_erlang(rng, static_cast<int>(d.shape()), d.rate());
      case DelayKind::kGamma:
        return sample_gamma(rng, d.shape(), d.rate());
      case DelayKind::kEmpirical: {
        const auto& s = d.samples();
        return s[rng.below(s.size())];
      }
    }
    return 0.0;
  }

 private:
  const ModelParams& params_;
  double rate_;
  bool use_max_ = false;
  double geo_p_ = 0.0;
  int geo_reps_ = 0;          // >0: count is a sum of this many geometrics
  double poisson_mean_ = -1;  // >=0: count is Poisson with this mean
};

struct TrialAccumulator {
  int64_t violations = 0;
  PhaseStats phases;

  void merge(const TrialAccumulator& other) {
    violations += other.violations;
    auto add = [](std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
      if (a.size() < b.size()) a.resize(b.size(), 0);
      for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    };
    add(phases.lead_at_tx, other.phases.lead_at_tx);
    add(phases.confirmation, other.phases.confirmation);
    add(phases.race_recovered, other.phases.race_recovered);
  }
};

constexpr size_t kHistCap = 512;

void bump(std::vector<uint64_t>& hist, int64_t value) {
  const size_t idx = static_cast<size_t>(
      std::min<int64_t>(std::max<int64_t>(value, 0), kHistCap - 1));
  if (hist.size() <= idx) hist.resize(idx + 1, 0);
  ++hist[idx];
}

template <bool kRecord>
void run_trials(const SimConfig& cfg, const CycleSampler& sampler,
                int64_t first, int64_t last, TrialAccumulator* acc) {
  const double alpha = cfg.params.alpha;
  const int k = cfg.params.k;
  for (int64_t trial = first; trial < last; ++trial) {
    Rng rng(cfg.seed, static_cast<uint64_t>(trial));

    // Phase 1: reflected lead walk. The walk can only dip below zero at the
    // jumper's mining instant (the single -1 step), so the floor applies
    // there, before the delay-window counts are added.
    int64_t lead = 0;
    for (int c = 0; c < cfg.premine_cycles; ++c) {
      lead = std::max<int64_t>(
                 lead + sample_geometric_failures(rng, alpha) - 1, 0) +
             sampler.count(rng);
    }

    // Phase 2: k jumper cycles confirm the transaction (it rides the first).
    int64_t conf = 0;
    for (int i = 0; i < k; ++i) {
      conf += sample_geometric_failures(rng, alpha) + sampler.count(rng);
    }

    if constexpr (kRecord) {
      bump(acc->phases.lead_at_tx, lead);
      bump(acc->phases.confirmation, conf);
    }

    // Phase 3: the race. The adversary's best moment in each cycle is after
    // the delay-window counts and before the pacer publishes (ties its way).
    int64_t deficit = k - lead - conf;
    bool violated = deficit <= 0;
    [[maybe_unused]] const int64_t initial_deficit = deficit;
    [[maybe_unused]] int64_t best_recovered = 0;
    while (!violated) {
      const int64_t gain =
          sample_geometric_failures(rng, alpha) + sampler.count(rng);
      if constexpr (kRecord) {
        best_recovered =
            std::max(best_recovered, initial_deficit - (deficit - gain));
      }
      if (deficit - gain <= 0) {
        violated = true;
        break;
      }
      deficit = deficit - gain + 1;
      if (deficit >= cfg.race_cutoff) break;
    }

    if constexpr (kRecord) {
      bump(acc->phases.race_recovered,
           violated ? initial_deficit : best_recovered);
    }
    acc->violations += violated ? 1 : 0;
  }
}

}  // namespace

void SimConfig::validate() const {
  params.validate();
  if (trials < 1) throw std::invalid_argument("sim: trials must be >= 1");
  if (premine_cycles < 1) {
    throw std::invalid_argument("sim: premine_cycles must be >= 1");
  }
  if (race_cutoff < params.k) {
    throw std::invalid_argument("sim: race_cutoff must be >= k");
  }
}

SimOutcome simulate(const SimConfig& config) {
  config.validate();
  const CycleSampler sampler(config.params,
                             config.params.beta() * config.params.mu_m);

  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = static_cast<int>(
      std::max<int64_t>(1, std::min<int64_t>(threads, config.trials)));

  std::vector<TrialAccumulator> parts(static_cast<size_t>(threads));
  {
    std::vector<std::thread> pool;
    const int64_t chunk = (config.trials + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int64_t first = t * chunk;
      const int64_t last = std::min<int64_t>(first + chunk, config.trials);
      if (first >= last) break;
      pool.emplace_back([&, t, first, last] {
        if (config.record_phases) {
          run_trials<true>(config, sampler, first, last,
                           &parts[static_cast<size_t>(t)]);
        } else {
          run_trials<false>(config, sampler, first, last,
                            &parts[static_cast<size_t>(t)]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  TrialAccumulator total;
  for (const auto& p : parts) total.merge(p);

  SimOutcome out;
  out.violations = total.violations;
  out.trials = config.trials;
  const double n = static_cast<double>(config.trials);
  const double p_hat = static_cast<double>(total.violations) / n;
  out.frequency = p_hat;

  const double z = 1.959963984540054;  // 95%
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p_hat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
  out.wilson_low = std::max(0.0, center - half);
  out.wilson_high = std::min(1.0, center + half);

  const double beta = config.params.beta();
  out.cutoff_truncation_bound =
      beta <= 0.0 ? 0.0
                  : std::min(1.0, std::pow(beta / config.params.alpha,
                                           config.race_cutoff -
                                               config.params.k));
  if (config.record_phases) out.phases = std::move(total.phases);
  return out;
}

Pmf sample_count_distribution(const SimConfig& config,
                              const std::string& which) {
  config.validate();
  const ModelParams& p = config.params;
  const double adv_rate = p.beta() * p.mu_m;

  enum class Which { kCAlpha, kCDelta, kCDeltaBar, kCB0, kZ } w;
  if (which == "C_alpha") {
    w = Which::kCAlpha;
  } else if (which == "C_delta") {
    w = Which::kCDelta;
  } else if (which == "C_delta_bar") {
    w = Which::kCDeltaBar;
  } else if (which == "C_b0") {
    w = Which::kCB0;
  } else if (which == "Z") {
    w = Which::kZ;
  } else {
    throw std::invalid_argument("unknown count distribution: " + which);
  }

  // Samples go through the raw delay-then-Poisson route (not the per-kind
  // closed-form shortcuts), so they validate the analytic building blocks
  // independently.
  const CycleSampler adv(p, adv_rate);

  std::vector<int64_t> values(static_cast<size_t>(config.trials));
  for (int64_t i = 0; i < config.trials; ++i) {
    Rng rng(config.seed, static_cast<uint64_t>(i));
    int64_t v = 0;
    switch (w) {
      case Which::kCAlpha:
        v = sample_geometric_failures(rng, p.alpha);
        break;
      case Which::kCDelta:
        v = sample_poisson(rng, adv_rate * adv.sample_delay(rng));
        break;
      case Which::kCDeltaBar:
        v = sample_poisson(rng, p.mu_m * adv.sample_delay(rng));
        break;
      case Which::kCB0:
        v = p.b0 == 0 ? 0
                      : sample_poisson(rng, adv_rate * sample_erlang(
                                                rng, p.b0, p.lambda_h));
        break;
      case Which::kZ: {
        v = sample_geometric_failures(rng, p.alpha) +
            sample_poisson(rng, adv_rate * adv.sample_delay(rng)) - 1;
        if (p.b0 > 0) {
          v += sample_poisson(rng,
                              adv_rate * sample_erlang(rng, p.b0, p.lambda_h));
        }
        break;
      }
    }
    values[static_cast<size_t>(i)] = v;
  }

  const int64_t offset = (w == Which::kZ) ? -1 : 0;
  int64_t max_seen = offset;
  for (int64_t v : values) max_seen = std::max(max_seen, v);
  std::vector<double> masses(static_cast<size_t>(max_seen - offset + 1), 0.0);
  const double weight = 1.0 / static_cast<double>(config.trials);
  for (int64_t v : values) {
    masses[static_cast<size_t>(v - offset)] += weight;
  }
  return Pmf::from_masses(static_cast<int>(offset), std::move(masses));
}

std::string to_json_string(const SimOutcome& outcome, int indent) {
  nlohmann::ordered_json j;
  j["violations"] = outcome.violations;
  j["trials"] = outcome.trials;
  j["frequency"] = outcome.frequency;
  j["wilson_ci_95"] = {outcome.wilson_low, outcome.wilson_high};
  j["cutoff_truncation_bound"] = outcome.cutoff_truncation_bound;
  if (outcome.phases) {
    nlohmann::ordered_json ph;
    ph["lead_at_tx"] = outcome.phases->lead_at_tx;
    ph["confirmation"] = outcome.phases->confirmation;
    ph["race_recovered"] = outcome.phases->race_recovered;
    j["phase_stats"] = ph;
  }
  return j.dump(indent);
}

std::string phase_stats_csv(const PhaseStats& stats) {
  std::ostringstream out;
  out << "value,lead_at_tx,confirmation,race_recovered\n";
  const size_t rows = std::max({stats.lead_at_tx.size(),
                                stats.confirmation.size(),
                                stats.race_recovered.size()});
  auto at = [](const std::vector<uint64_t>& v, size_t i) {
    return i < v.size() ? v[i] : 0;
  };
  for (size_t i = 0; i < rows; ++i) {
    out << i << ',' << at(stats.lead_at_tx, i) << ','
        << at(stats.confirmation, i) << ',' << at(stats.race_recovered, i)
        << "\n";
  }
  return out.str();
}

}  // namespace seclat
