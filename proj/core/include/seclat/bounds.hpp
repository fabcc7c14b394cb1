#pragma once

#include <map>
#include <string>
#include <vector>

#include "seclat/delay.hpp"
#include "seclat/lead.hpp"
#include "seclat/pmf.hpp"

namespace seclat {

/// A probability with its certified truncation slack. For upper bounds the
/// slack is already included in value (tail mass counts toward the event);
/// for lower bounds it has been excluded. Either way `value` is safe.
struct CertifiedProb {
  double value = 0.0;
  double error = 0.0;
};

/// Everything computed for one parameter point.
struct BoundReport {
  ModelParams params;
  double upper = 0.0;
  double lower = 0.0;
  double upper_error = 0.0;  // truncation slack included in upper
  double lower_error = 0.0;  // truncation slack excluded from lower
  std::map<std::string, Pmf> intermediates;
  std::vector<std::string> warnings;
};

/// Adversarial blocks accumulated over the k confirmation cycles, worst
/// case: k copies of C_alpha + C_Delta-bar (total-rate counts, delay forks
/// granted to the adversary), plus k-1 idle-wait counts when b0 > 0.
Pmf confirmation_pmf_upper(const ModelParams& params,
                           double eps_tail = kDefaultEpsTail);

/// Adversarial blocks over the k confirmation cycles for the explicit
/// attack: k copies of C_alpha + C_Delta at the adversarial rate, plus k-1
/// idle-wait counts when b0 > 0.
Pmf confirmation_pmf_lower(const ModelParams& params,
                           double eps_tail = kDefaultEpsTail);

/// P(violation) <= P(L + S + M >= k) with L, M i.i.d. best-case stationary
/// leads and S the worst-case confirmation count. Certified from above.
CertifiedProb violation_upper(const ModelParams& params,
                              double eps_tail = kDefaultEpsTail,
                              double eps_residual = kDefaultEpsTail);

/// Companion lower estimate: the same three-phase composition with the
/// confirmation counts taken at the adversarial rate (no fork rigging) and
/// the race deficit taken from the idle-free chain. Certified from below.
///
/// Note: this is deliberately larger than the success probability of the
/// simulated attack, whose pre-mining lead lacks the best-case C_alpha term;
/// compose lead_lower with confirmation_pmf_lower for that quantity (the
/// tests do). See docs/bounds.md.
CertifiedProb violation_lower(const ModelParams& params,
                              double eps_tail = kDefaultEpsTail,
                              double eps_residual = kDefaultEpsTail);

/// Mempool-regime warnings (never fatal): block capacity must clear the
/// high-fee backlog, and the idle wait must dominate the delay scale for b0
/// to matter. "Much greater" is interpreted as a factor of 10.
std::vector<std::string> mempool_sanity(const ModelParams& params);

/// Full evaluation of one parameter point.
BoundReport compute_bounds(const ModelParams& params,
                           double eps_tail = kDefaultEpsTail,
                           double eps_residual = kDefaultEpsTail,
                           bool keep_intermediates = false);

/// JSON rendering (stable field order). Pmfs serialize as
/// {"offset":..,"masses":[..],"tail_mass":..}.
std::string to_json_string(const BoundReport& report,
                           bool include_intermediates = false, int indent = -1);

}  // namespace seclat
