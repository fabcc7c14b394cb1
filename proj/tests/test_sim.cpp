#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "seclat/bounds.hpp"
#include "seclat/sim.hpp"
#include "test_util.hpp"

using namespace seclat;
using namespace seclat::testutil;

namespace {

ModelParams btc_params(int k = 6) {
  ModelParams p;
  p.mu_m = 1.0 / 600.0;
  p.alpha = 0.9;
  p.k = k;
  p.delay = DelaySpec::erlang(2, 1.0);
  return p;
}

SimConfig make_config(const ModelParams& p, int64_t trials, uint64_t seed) {
  SimConfig cfg;
  cfg.params = p;
  cfg.trials = trials;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("simulator reproducibility") {
  SimConfig cfg = make_config(btc_params(4), 200000, 12345);
  cfg.record_phases = true;
  const SimOutcome a = simulate(cfg);
  const SimOutcome b = simulate(cfg);
  CHECK(a.violations == b.violations);
  REQUIRE(a.phases.has_value());
  REQUIRE(b.phases.has_value());
  CHECK(a.phases->lead_at_tx == b.phases->lead_at_tx);
  CHECK(a.phases->confirmation == b.phases->confirmation);
  CHECK(a.phases->race_recovered == b.phases->race_recovered);

  SUBCASE("independent of the thread count") {
    SimConfig one = cfg;
    one.threads = 1;
    SimConfig four = cfg;
    four.threads = 4;
    const SimOutcome oa = simulate(one);
    const SimOutcome ob = simulate(four);
    CHECK(oa.violations == ob.violations);
    CHECK(oa.phases->lead_at_tx == ob.phases->lead_at_tx);
  }

  SUBCASE("a different seed gives a different draw") {
    SimConfig other = cfg;
    other.seed = 54321;
    CHECK(simulate(other).violations != a.violations);
  }
}

TEST_CASE("simulator config validation") {
  SimConfig cfg = make_config(btc_params(6), 0, 1);
  CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
  cfg.trials = 10;
  cfg.race_cutoff = 3;  // below k
  CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
}

TEST_CASE("no adversary never violates") {
  ModelParams p = btc_params(3);
  p.alpha = 1.0;
  const SimOutcome out = simulate(make_config(p, 100000, 7));
  CHECK(out.violations == 0);
  CHECK(out.frequency == 0.0);
  CHECK(out.wilson_low == 0.0);
}

TEST_CASE("wilson interval contains the frequency") {
  const SimOutcome out = simulate(make_config(btc_params(2), 400000, 99));
  CHECK(out.wilson_low <= out.frequency);
  CHECK(out.frequency <= out.wilson_high);
  CHECK(out.cutoff_truncation_bound <= std::pow(1.0 / 9.0, 62));
}

TEST_CASE("sampled count distributions match the analytic ones") {
  ModelParams p = btc_params();
  p.b0 = 100;
  p.lambda_h = 0.2;
  SimConfig cfg = make_config(p, 1000000, 2718);

  SUBCASE("C_alpha vs geometric") {
    const Pmf emp = sample_count_distribution(cfg, "C_alpha");
    const double tv =
        tv_distance(emp, [](int i) { return i < 0 ? 0.0 : geometric_ref(0.9, i); });
    CHECK(tv <= 0.002);
  }

  SUBCASE("C_delta under a deterministic delay vs Poisson") {
    SimConfig det = cfg;
    det.params.delay = DelaySpec::deterministic(30.0);
    const Pmf emp = sample_count_distribution(det, "C_delta");
    const double mean = det.params.beta() * det.params.mu_m * 30.0;
    const double tv = tv_distance(
        emp, [mean](int i) { return i < 0 ? 0.0 : poisson_ref(mean, i); });
    CHECK(tv <= 0.002);
  }

  SUBCASE("C_delta and C_delta_bar vs the mixed-Poisson pmfs") {
    const Pmf emp = sample_count_distribution(cfg, "C_delta");
    const Pmf ana = mixed_poisson_pmf(p.delay, p.beta() * p.mu_m);
    CHECK(tv_distance(emp, [&](int i) { return ana.mass_at(i); }) <= 0.002);

    const Pmf empb = sample_count_distribution(cfg, "C_delta_bar");
    const Pmf anab = mixed_poisson_pmf(p.delay, p.mu_m);
    CHECK(tv_distance(empb, [&](int i) { return anab.mass_at(i); }) <= 0.002);
  }

  SUBCASE("C_b0 vs the idle-wait negative binomial") {
    const Pmf emp = sample_count_distribution(cfg, "C_b0");
    const Pmf ana = c_b0_pmf(p);
    CHECK(tv_distance(emp, [&](int i) { return ana.mass_at(i); }) <= 0.002);
  }

  SUBCASE("Z sample mean within 3 sigma of the analytic mean") {
    const Pmf emp = sample_count_distribution(cfg, "Z");
    const ZIncrement z = build_z(p, true);
    double var = 0.0;
    for (int x = z.pmf.offset(); x <= z.pmf.last_support(); ++x) {
      var += (x - z.mean) * (x - z.mean) * z.pmf.mass_at(x);
    }
    const double sigma = std::sqrt(var / static_cast<double>(cfg.trials));
    CHECK(std::fabs(emp.mean() - z.mean) <= 3.0 * sigma);
  }

  SUBCASE("unknown names are rejected") {
    CHECK_THROWS_AS(sample_count_distribution(cfg, "C_gamma"),
                    std::invalid_argument);
  }
}

TEST_CASE("zero-delay attack matches the dense chain evaluation") {
  ModelParams p = btc_params(1);
  p.delay = DelaySpec::deterministic(0.0);
  SimConfig cfg = make_config(p, 1000000, 31415);
  const SimOutcome out = simulate(cfg);

  const double want = dense_zero_delay_attack(0.9, 1, cfg.premine_cycles,
                                              cfg.race_cutoff);
  const double sigma = std::sqrt(want * (1.0 - want) /
                                 static_cast<double>(cfg.trials));
  CHECK(std::fabs(out.frequency - want) <= 3.0 * sigma);
}

TEST_CASE("phase-one lead sits between the analytic brackets") {
  const ModelParams p = btc_params();
  SimConfig cfg = make_config(p, 1000000, 161803);
  cfg.record_phases = true;
  const SimOutcome out = simulate(cfg);
  REQUIRE(out.phases.has_value());
  const auto& hist = out.phases->lead_at_tx;

  const ZIncrement z = build_z(p, false);
  const StationaryLead pi = ramaswami_stationary(z);
  const Pmf c_delta = mixed_poisson_pmf(p.delay, p.beta() * p.mu_m);
  const Pmf lower = lead_lower(pi, c_delta);   // = the walk's own stationary law
  const Pmf upper = lead_upper(z, pi);

  const double n = static_cast<double>(cfg.trials);
  std::vector<double> ccdf_emp(hist.size() + 1, 0.0);
  for (size_t x = hist.size(); x > 0; --x) {
    ccdf_emp[x - 1] = ccdf_emp[x] + static_cast<double>(hist[x - 1]) / n;
  }
  auto emp_at = [&](int x) {
    return x < static_cast<int>(ccdf_emp.size())
               ? ccdf_emp[static_cast<size_t>(x)]
               : 0.0;
  };
  // Sigma under the analytic law; skip points too rare to resolve at n.
  for (int x = 0; x < 12; ++x) {
    const double lo = lower.ccdf(x);
    const double hi = upper.ccdf(x);
    if (hi < 30.0 / n) break;
    const double sigma_lo = std::sqrt(lo * (1.0 - lo) / n);
    const double sigma_hi = std::sqrt(hi * (1.0 - hi) / n);
    CHECK(emp_at(x) >= lo - 3.0 * sigma_lo - 1e-9);
    CHECK(emp_at(x) <= hi + 3.0 * sigma_hi + 1e-9);
  }
}

TEST_CASE("premine warm-up is long enough") {
  // Doubling the warm-up must not shift the frequency beyond joint noise
  // (3 sigma; the walk mixes orders of magnitude faster than 1000 cycles).
  const ModelParams p = btc_params(4);
  SimConfig a = make_config(p, 1000000, 5150);
  SimConfig b = a;
  b.premine_cycles = 2000;
  const SimOutcome oa = simulate(a);
  const SimOutcome ob = simulate(b);
  const double n = static_cast<double>(a.trials);
  const double pool = (oa.frequency + ob.frequency) / 2.0;
  const double sigma = std::sqrt(2.0 * pool * (1.0 - pool) / n);
  CHECK(std::fabs(oa.frequency - ob.frequency) <= 3.0 * sigma);
}

TEST_CASE("outcome serialization") {
  SimConfig cfg = make_config(btc_params(3), 50000, 77);
  cfg.record_phases = true;
  const SimOutcome out = simulate(cfg);

  const std::string json = to_json_string(out);
  CHECK(json.find("\"frequency\"") != std::string::npos);
  CHECK(json.find("\"wilson_ci_95\"") != std::string::npos);
  CHECK(json.find("\"phase_stats\"") != std::string::npos);
  CHECK(to_json_string(out) == json);

  REQUIRE(out.phases.has_value());
  const std::string csv = phase_stats_csv(*out.phases);
  CHECK(csv.rfind("value,lead_at_tx,confirmation,race_recovered\n", 0) == 0);
  // Row 0 exists and the lead column sums back to the trial count.
  uint64_t total = 0;
  for (uint64_t c : out.phases->lead_at_tx) total += c;
  CHECK(total == static_cast<uint64_t>(cfg.trials));
}

TEST_CASE("simulated attack agrees with its own analytic composition") {
  // The simulator's three phases correspond exactly to the stationary lead
  // of the reflected walk, k cycle counts, and the race make-up bounded by
  // the best-case stationary lead; their convolution prices the attack.
  const ModelParams p = btc_params(4);
  const ZIncrement z = build_z(p, false);
  const StationaryLead pi = ramaswami_stationary(z);
  const Pmf c_delta = mixed_poisson_pmf(p.delay, p.beta() * p.mu_m);
  const Pmf attack_total =
      convolve(convolve(lead_lower(pi, c_delta), confirmation_pmf_lower(p)),
               lead_upper(z, pi));
  const double attack_prob = attack_total.ccdf(p.k);

  const SimOutcome out = simulate(make_config(p, 2000000, 2021));
  const double sigma = (out.wilson_high - out.wilson_low) / (2.0 * 1.959964);
  CHECK(out.frequency >= attack_prob - 4.0 * sigma);
  CHECK(out.frequency <= attack_prob + 4.0 * sigma);
}
