#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seclat/pmf.hpp"

namespace seclat {

enum class DelayKind { kDeterministic, kExponential, kErlang, kGamma, kEmpirical };

/** A random network-delay distribution (seconds).
 *
 *  Erlang convention: erlang(n, rate) is the sum of n independent
 *  exponentials of the given rate, mean n / rate.
 */
class DelaySpec {
 public:
  static DelaySpec deterministic(double seconds);
  static DelaySpec exponential(double rate);
  static DelaySpec erlang(int shape, double rate);
  static DelaySpec gamma(double shape, double rate);
  static DelaySpec empirical(std::vector<double> samples);

  DelayKind kind() const { return kind_; }
  double mean() const;
  double cdf(double t) const;
  /// Smallest t with cdf(t) >= q (right-continuous inverse), for grid caps.
  double quantile(double q) const;

  /// Time scale multiplied by `factor` (same shape); for sensitivity sweeps.
  DelaySpec scaled(double factor) const;

  // Accessors for the kind-specific parameters; meaningful fields only.
  double value() const { return value_; }   // deterministic seconds
  double rate() const { return rate_; }     // exponential / erlang / gamma
  double shape() const { return shape_; }   // erlang (integral) / gamma
  const std::vector<double>& samples() const { return samples_; }

  std::string describe() const;

 private:
  DelaySpec() = default;

  DelayKind kind_ = DelayKind::kDeterministic;
  double value_ = 0.0;
  double rate_ = 0.0;
  double shape_ = 0.0;
  std::vector<double> samples_;
};

/// Protocol and adversary parameters.
struct ModelParams {
  double mu_m = 0.0;      // total mining rate, blocks/second
  double alpha = 1.0;     // honest fraction, in (0, 1]
  int k = 1;              // confirmation depth
  int b0 = 0;             // pending high-fee transactions required per block
  double lambda_h = 0.0;  // high-fee transaction rate, required iff b0 > 0
  std::optional<double> b;  // block capacity, used only by mempool checks
  DelaySpec delay = DelaySpec::deterministic(0.0);

  double beta() const { return 1.0 - alpha; }
  /// Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

/// Number of arrivals of a Poisson(arrival_rate) process over a random
/// delay: P(N = i) = E[e^{-r D} (r D)^i / i!]. Closed forms: deterministic
/// -> Poisson, exponential -> geometric, erlang/gamma -> negative binomial,
/// empirical -> equal-weight mixture of Poissons. arrival_rate = 0 gives the
/// point mass at 0.
Pmf mixed_poisson_pmf(const DelaySpec& delay, double arrival_rate,
                      double eps_tail = kDefaultEpsTail);

/// Same distribution by adaptive quadrature against the mixing density
/// (per-entry absolute error <= 1e-10). Used as an independent cross-check
/// of the closed forms and by the max-delay mixture.
Pmf mixed_poisson_pmf_quadrature(const DelaySpec& delay, double arrival_rate,
                                 double eps_tail = kDefaultEpsTail);

/// Geometric count of adversarial arrivals before the next honest one:
/// P(i) = (1 - alpha)^i alpha.
Pmf c_alpha_pmf(double alpha, double eps_tail = kDefaultEpsTail);

/// Adversarial arrivals during the Erlang(b0, lambda_h) wait for b0 high-fee
/// transactions; the point mass at 0 when b0 = 0.
Pmf c_b0_pmf(const ModelParams& params, double eps_tail = kDefaultEpsTail);

/** Mixed-Poisson evaluator for max(D, E) where D is a network delay and E is
 *  an independent Erlang(b0, lambda_h) wait. Counts are integrated against
 *  dF_max = F_E dF_D + F_D dF_E by adaptive quadrature.
 */
class MaxDelayMixture {
 public:
  /// Rejects b0 < 1 (with b0 = 0 the plain delay applies; use it directly).
  MaxDelayMixture(DelaySpec delay, int b0, double lambda_h);

  Pmf mixed_poisson(double arrival_rate,
                    double eps_tail = kDefaultEpsTail) const;
  double mean() const;

  const DelaySpec& delay() const { return delay_; }

 private:
  DelaySpec delay_;
  int b0_;
  double lambda_h_;
};

}  // namespace seclat
