#include "seclat/lead.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace seclat {

namespace {

// `mean` is the exact expectation of the increment, computed in closed form
// by the caller; the truncated pmf's own mean is biased low by the tail and
// cannot certify stability at the boundary.
ZIncrement finish_z(Pmf z_at_minus_one, double mean) {
  if (!(mean < 0.0)) {
    // Lemma-level requirement: on average strictly less than one adversarial
    // arrival per jumper cycle, i.e. honest jumpers outpace the adversary
    // under the maximal delay strategy.
    throw StabilityViolation(
        "lead chain is unstable: E[C_alpha + C_Delta (+ C_b0)] = " +
        std::to_string(mean + 1.0) + " >= 1");
  }
  if (!(z_at_minus_one.mass_at(-1) > 0.0)) {
    throw StabilityViolation("lead chain degenerate: P(Z = -1) = 0");
  }
  return ZIncrement{std::move(z_at_minus_one), mean};
}

}  // namespace

ZIncrement build_z(const ModelParams& params, bool with_b0, double eps_tail) {
  params.validate();
  const double adv_rate = params.beta() * params.mu_m;
  Pmf counts = mixed_poisson_pmf(params.delay, adv_rate, eps_tail);
  counts = convolve(c_alpha_pmf(params.alpha, eps_tail), counts, eps_tail);
  // E[C_alpha] + E[C_Delta] (+ E[C_b0]) - 1, all in closed form.
  double mean = (1.0 - params.alpha) / params.alpha +
                adv_rate * params.delay.mean() - 1.0;
  if (with_b0 && params.b0 > 0) {
    counts = convolve(counts, c_b0_pmf(params, eps_tail), eps_tail);
    mean += params.b0 * adv_rate / params.lambda_h;
  }
  return finish_z(counts.shifted(-1), mean);
}

ZIncrement build_z_from_counts(const Pmf& adversarial_counts, double alpha,
                               double eps_tail) {
  if (adversarial_counts.offset() != 0) {
    throw std::invalid_argument("build_z: counts must start at 0");
  }
  Pmf z = convolve(c_alpha_pmf(alpha, eps_tail), adversarial_counts, eps_tail);
  const double mean =
      (1.0 - alpha) / alpha + adversarial_counts.mean() - 1.0;
  return finish_z(z.shifted(-1), mean);
}

StationaryLead ramaswami_stationary(const ZIncrement& z, double eps_residual,
                                    int max_states) {
  const auto zm = z.pmf.masses();  // zm[j] = P(Z = j - 1)
  const double z_minus_1 = zm[0];

  // Suffix sums: tail_ge[m] = P(Z >= m) for m >= 1. The truncated tail of Z
  // itself is part of every suffix (it lies above the stored support).
  const int z_max = z.pmf.last_support();  // -1 for the pure down-step chain
  std::vector<double> tail_ge(static_cast<size_t>(std::max(z_max, 0)) + 2,
                              z.pmf.tail_mass());
  for (int m = z_max; m >= 1; --m) {
    tail_ge[static_cast<size_t>(m)] =
        tail_ge[static_cast<size_t>(m) + 1] + z.pmf.mass_at(m);
  }
  auto p_z_ge = [&](int m) {
    return m > z_max ? z.pmf.tail_mass() : tail_ge[static_cast<size_t>(m)];
  };

  std::vector<double> pi;
  pi.push_back(-z.mean / z_minus_1);
  double accumulated = pi[0];
  // States below the z-support window only contribute through the truncated
  // Z tail, P(Z >= m) = tail for m > z_max; fold them in via a prefix sum.
  double prefix_below_window = 0.0;
  while (1.0 - accumulated > eps_residual) {
    const int i = static_cast<int>(pi.size());
    if (i >= max_states) {
      throw NonConvergence("stationary recursion hit the state cap with " +
                           std::to_string(1.0 - accumulated) +
                           " residual mass");
    }
    const int j_lo = std::max(0, i - z_max);
    if (j_lo > 0) prefix_below_window += pi[static_cast<size_t>(j_lo - 1)];
    double s = prefix_below_window * z.pmf.tail_mass();
    for (int j = j_lo; j < i; ++j) {
      s += pi[static_cast<size_t>(j)] * p_z_ge(i - j);
    }
    pi.push_back(s / z_minus_1);
    accumulated += pi.back();
  }

  const double residual = std::max(0.0, 1.0 - accumulated);
  Pmf out = Pmf::from_masses(0, std::move(pi));
  return StationaryLead{std::move(out), residual};
}

Pmf lead_upper(const ZIncrement& z, const StationaryLead& pi) {
  const auto pim = pi.pi.masses();
  std::vector<double> lead(pim.size() + 1, 0.0);
  lead[0] = -z.mean;
  lead[1] = pim[0] + z.mean;
  for (size_t i = 1; i < pim.size(); ++i) {
    lead[i + 1] = pim[i];
  }
  return Pmf::from_masses(0, std::move(lead));
}

Pmf lead_lower(const StationaryLead& pi, const Pmf& c_delta, double eps_tail) {
  if (c_delta.offset() != 0) {
    throw std::invalid_argument("lead_lower: c_delta must start at 0");
  }
  return convolve(pi.pi, c_delta, eps_tail);
}

}  // namespace seclat
