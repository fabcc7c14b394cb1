#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace seclat {

/// Default mass threshold below which a distribution's upper tail is cut off
/// and accounted in Pmf::tail_mass().
inline constexpr double kDefaultEpsTail = 1e-12;

/// Thrown when the lead chain has non-negative drift, i.e. the honest jumper
/// rate under the maximal delay strategy does not exceed the adversarial
/// mining rate. No bound exists in that regime.
class StabilityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when the stationary recursion hits its state cap before the
/// residual mass drops below the requested threshold.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Finitely truncated probability mass function over the integers.
 *
 *  masses()[i] is P(X = offset() + i). Mass cut off above the last stored
 *  point is kept in tail_mass(), so sum(masses) + tail_mass == 1 up to 1e-9
 *  at all times. Treating the tail as sitting at +infinity makes ccdf() a
 *  certified upper bound on P(X >= x) and ccdf_lower() a certified lower
 *  bound; the gap between them is exactly the accumulated truncation error,
 *  which is how every downstream bound carries its error certificate.
 *
 *  Values are immutable once built; all operations return new Pmfs and are
 *  safe to use concurrently.
 */
class Pmf {
 public:
  /// Point mass at `value`.
  static Pmf point(int value);

  /// Builds a Pmf from explicit masses starting at `offset`. The masses must
  /// be non-negative and sum to at most 1 + 1e-9; any remainder becomes
  /// tail_mass. Tiny negative artifacts (>= -1e-15) are clamped to zero.
  static Pmf from_masses(int offset, std::vector<double> masses);

  int offset() const { return offset_; }
  std::span<const double> masses() const { return masses_; }
  double tail_mass() const { return tail_; }
  int size() const { return static_cast<int>(masses_.size()); }
  /// Largest stored support point.
  int last_support() const { return offset_ + size() - 1; }

  /// P(X = value); 0 outside the stored range.
  double mass_at(int value) const;

  /// P(X >= x) with the truncated tail counted in (certified upper bound).
  double ccdf(int x) const;

  /// P(X >= x) over the stored support only (certified lower bound).
  double ccdf_lower(int x) const;

  /// Expectation with the truncated tail attributed to the last stored
  /// support point. Unreliable once tail_mass exceeds ~1e-6; see
  /// mean_reliable().
  double mean() const;
  bool mean_reliable() const { return tail_ <= 1e-6; }
  /// Width of the mean's uncertainty if the tail actually sits anywhere in
  /// [last_support, horizon] instead of at last_support.
  double mean_slack(int horizon) const;

  /// Same distribution translated by `delta`.
  Pmf shifted(int delta) const;

  /// Returns a copy truncated so that at most eps_tail extra mass moved into
  /// tail_mass (drops the longest suffix summing below eps_tail).
  Pmf truncated(double eps_tail) const;

 private:
  Pmf(int offset, std::vector<double> masses, double tail);

  int offset_ = 0;
  std::vector<double> masses_;
  double tail_ = 0.0;
};

/// Distribution of the sum of independent variables a + b. Direct O(n*m)
/// convolution; trailing entries below eps_tail (in total) are folded into
/// the tail so the result stays certified.
Pmf convolve(const Pmf& a, const Pmf& b, double eps_tail = kDefaultEpsTail);

/// n-fold self-convolution via binary exponentiation; n = 0 gives the point
/// mass at 0. Rejects negative n.
Pmf power_convolve(const Pmf& p, int n, double eps_tail = kDefaultEpsTail);

}  // namespace seclat
