#pragma once

#include "seclat/delay.hpp"
#include "seclat/pmf.hpp"

namespace seclat {

/// Per-jumper-cycle increment of the reflected lead walk:
/// Z = C_alpha + C_Delta - 1, plus C_b0 when the high-fee wait applies.
/// Always at offset -1 with positive mass there; mean < 0 or the
/// construction refuses (StabilityViolation).
struct ZIncrement {
  Pmf pmf;      // offset exactly -1
  double mean;  // strictly negative
};

/// Builds Z from the model parameters. with_b0 folds in the Erlang(b0,
/// lambda_h) idle counts; it is ignored when b0 == 0. Throws
/// StabilityViolation when E[Z] >= 0.
ZIncrement build_z(const ModelParams& params, bool with_b0,
                   double eps_tail = kDefaultEpsTail);

/// Z for an arbitrary adversarial count distribution (offset 0); used for
/// tightened or synthetic chains. Same stability contract.
ZIncrement build_z_from_counts(const Pmf& adversarial_counts, double alpha,
                               double eps_tail = kDefaultEpsTail);

/// Stationary distribution of the reflected walk W <- max(W + Z, 0).
struct StationaryLead {
  Pmf pi;           // offset 0; recursion residual stored as its tail_mass
  double residual;  // 1 - accumulated mass at the recursion cutoff
};

/// Forward recursion for the stationary distribution of the M/G/1-type lead
/// chain: pi_0 = -E[Z]/z_{-1}, then
/// pi_i = sum_{j<i} pi_j P(Z >= i-j) / z_{-1}. Stops once the residual mass
/// drops below eps_residual; throws NonConvergence at max_states.
StationaryLead ramaswami_stationary(const ZIncrement& z,
                                    double eps_residual = kDefaultEpsTail,
                                    int max_states = 100000);

/// Best-case stationary lead 1 + Z + Pi in closed form:
/// P(L=0) = -E[Z], P(L=1) = pi_0 + E[Z], P(L=i) = pi_{i-1} for i >= 2.
Pmf lead_upper(const ZIncrement& z, const StationaryLead& pi);

/// Attack-side stationary lead Pi (+) c_delta, the lead at the publication
/// of the delay-straddled jumper. c_delta must be the adversarial count
/// distribution matching the chain that produced pi.
Pmf lead_lower(const StationaryLead& pi, const Pmf& c_delta,
               double eps_tail = kDefaultEpsTail);

}  // namespace seclat
