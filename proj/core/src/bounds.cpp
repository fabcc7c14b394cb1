#include "seclat/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#if defined(SECLAT_VENDORED_JSON)
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

namespace seclat {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

struct Phases {
  Pmf lead;  // pre-mining gain bound (also the race deficit distribution)
  Pmf race;  // post-confirmation make-up bound
};

Phases lead_and_race(const ModelParams& params, double eps_tail,
                     double eps_residual) {
  const ZIncrement z = build_z(params, /*with_b0=*/true, eps_tail);
  const StationaryLead pi = ramaswami_stationary(z, eps_residual);
  Pmf lead = lead_upper(z, pi);
  if (params.b0 > 0) {
    // The post-confirmation race starts with the high-fee backlog already
    // replenished, so its deficit distribution is the idle-free one.
    const ZIncrement z0 = build_z(params, /*with_b0=*/false, eps_tail);
    const StationaryLead pi0 = ramaswami_stationary(z0, eps_residual);
    return {std::move(lead), lead_upper(z0, pi0)};
  }
  Pmf race = lead;
  return {std::move(lead), std::move(race)};
}

}  // namespace

Pmf confirmation_pmf_upper(const ModelParams& params, double eps_tail) {
  params.validate();
  const Pmf counts =
      mixed_poisson_pmf(params.delay, params.mu_m, eps_tail);  // total rate
  const Pmf cycle = convolve(c_alpha_pmf(params.alpha, eps_tail), counts,
                             eps_tail);
  Pmf s = power_convolve(cycle, params.k, eps_tail);
  if (params.b0 > 0 && params.k > 1) {
    s = convolve(s, power_convolve(c_b0_pmf(params, eps_tail), params.k - 1,
                                   eps_tail),
                 eps_tail);
  }
  return s;
}

Pmf confirmation_pmf_lower(const ModelParams& params, double eps_tail) {
  params.validate();
  const Pmf counts = mixed_poisson_pmf(params.delay,
                                       params.beta() * params.mu_m, eps_tail);
  const Pmf cycle = convolve(c_alpha_pmf(params.alpha, eps_tail), counts,
                             eps_tail);
  Pmf s = power_convolve(cycle, params.k, eps_tail);
  if (params.b0 > 0 && params.k > 1) {
    s = convolve(s, power_convolve(c_b0_pmf(params, eps_tail), params.k - 1,
                                   eps_tail),
                 eps_tail);
  }
  return s;
}

namespace {

// Truncation thresholds finer than this cannot be resolved by the series
// accumulators (1 - cumsum bottoms out near the double epsilon).
constexpr double kEpsFloor = 5e-15;

struct RawBounds {
  CertifiedProb upper;
  CertifiedProb lower;
  double eps_used = 0.0;
};

RawBounds bounds_at(const ModelParams& params, double eps_tail,
                    double eps_residual) {
  const Phases ph = lead_and_race(params, eps_tail, eps_residual);
  const Pmf total_up = convolve(
      convolve(ph.lead, confirmation_pmf_upper(params, eps_tail), eps_tail),
      ph.lead, eps_tail);
  const Pmf total_lo = convolve(
      convolve(ph.lead, confirmation_pmf_lower(params, eps_tail), eps_tail),
      ph.race, eps_tail);
  // ccdf counts the truncated tail as if it sat at +infinity, so it is an
  // upper bound as-is and ccdf_lower a lower bound; the tails are the
  // certificate widths.
  return {{clamp01(total_up.ccdf(params.k)), total_up.tail_mass()},
          {clamp01(total_lo.ccdf_lower(params.k)), total_lo.tail_mass()},
          eps_tail};
}

// Deep confirmation depths push the bounds below the default truncation
// threshold, where the certificate would swamp the value; refine the
// thresholds until the slack is a small fraction of what it certifies.
RawBounds certified_bounds(const ModelParams& params, double eps_tail,
                           double eps_residual) {
  double eps_t = eps_tail;
  double eps_r = eps_residual;
  for (;;) {
    const RawBounds raw = bounds_at(params, eps_t, eps_r);
    const bool upper_tight =
        raw.upper.error <= 0.01 * raw.upper.value || raw.upper.value == 0.0;
    const bool lower_tight =
        raw.lower.error <= 0.01 * std::max(raw.lower.value, raw.upper.value);
    if ((upper_tight && lower_tight) || eps_t <= kEpsFloor) return raw;
    eps_t = std::max(kEpsFloor, eps_t * 1e-4);
    eps_r = std::max(kEpsFloor, eps_r * 1e-4);
  }
}

}  // namespace

CertifiedProb violation_upper(const ModelParams& params, double eps_tail,
                              double eps_residual) {
  return certified_bounds(params, eps_tail, eps_residual).upper;
}

CertifiedProb violation_lower(const ModelParams& params, double eps_tail,
                              double eps_residual) {
  return certified_bounds(params, eps_tail, eps_residual).lower;
}

std::vector<std::string> mempool_sanity(const ModelParams& params) {
  std::vector<std::string> warnings;
  if (params.b0 <= 0) return warnings;
  char buf[256];
  const double delay_mean = params.delay.mean();
  if (params.b) {
    const double lhs = *params.b / params.lambda_h;
    const double rhs = 1.0 / params.mu_m + delay_mean;
    if (lhs < 10.0 * rhs) {
      std::snprintf(buf, sizeof buf,
                    "mempool may saturate: b/lambda_h = %g is not >> "
                    "1/mu_m + E[delay] = %g",
                    lhs, rhs);
      warnings.emplace_back(buf);
    }
  }
  const double idle = params.b0 / params.lambda_h;
  if (idle < 10.0 * delay_mean) {
    std::snprintf(buf, sizeof buf,
                  "idle wait is negligible: b0/lambda_h = %g is not >> "
                  "E[delay] = %g; b0 has little effect",
                  idle, delay_mean);
    warnings.emplace_back(buf);
  }
  return warnings;
}

BoundReport compute_bounds(const ModelParams& params, double eps_tail,
                           double eps_residual, bool keep_intermediates) {
  params.validate();
  BoundReport report;
  report.params = params;

  const RawBounds raw = certified_bounds(params, eps_tail, eps_residual);
  report.upper = raw.upper.value;
  report.upper_error = raw.upper.error;
  report.lower = raw.lower.value;
  report.lower_error = raw.lower.error;
  report.warnings = mempool_sanity(params);

  if (keep_intermediates) {
    const double eps = raw.eps_used;
    const ZIncrement z = build_z(params, true, eps);
    const StationaryLead pi = ramaswami_stationary(z, eps);
    const Pmf c_delta =
        mixed_poisson_pmf(params.delay, params.beta() * params.mu_m, eps);
    report.intermediates.emplace("pi", pi.pi);
    report.intermediates.emplace("lead_upper", lead_upper(z, pi));
    report.intermediates.emplace("lead_lower", lead_lower(pi, c_delta, eps));
    report.intermediates.emplace("confirmation_upper",
                                 confirmation_pmf_upper(params, eps));
    report.intermediates.emplace("confirmation_lower",
                                 confirmation_pmf_lower(params, eps));
    if (params.b0 > 0) {
      const ZIncrement z0 = build_z(params, false, eps);
      report.intermediates.emplace(
          "race", lead_upper(z0, ramaswami_stationary(z0, eps)));
    } else {
      report.intermediates.emplace("race", lead_upper(z, pi));
    }
  }
  return report;
}

namespace {

nlohmann::ordered_json pmf_to_json(const Pmf& p) {
  nlohmann::ordered_json j;
  j["offset"] = p.offset();
  j["masses"] = std::vector<double>(p.masses().begin(), p.masses().end());
  j["tail_mass"] = p.tail_mass();
  return j;
}

nlohmann::ordered_json params_to_json(const ModelParams& p) {
  nlohmann::ordered_json j;
  j["mu_m"] = p.mu_m;
  j["alpha"] = p.alpha;
  j["k"] = p.k;
  j["b0"] = p.b0;
  if (p.b0 > 0) j["lambda_h"] = p.lambda_h;
  if (p.b) j["b"] = *p.b;
  j["delay"] = p.delay.describe();
  return j;
}

}  // namespace

std::string to_json_string(const BoundReport& report,
                           bool include_intermediates, int indent) {
  nlohmann::ordered_json j;
  j["params"] = params_to_json(report.params);
  j["upper"] = report.upper;
  j["lower"] = report.lower;
  j["upper_error"] = report.upper_error;
  j["lower_error"] = report.lower_error;
  if (!report.warnings.empty()) j["warnings"] = report.warnings;
  if (include_intermediates) {
    nlohmann::ordered_json inter;
    for (const auto& [name, pmf] : report.intermediates) {
      inter[name] = pmf_to_json(pmf);
    }
    j["intermediates"] = inter;
  }
  return j.dump(indent);
}

}  // namespace seclat
