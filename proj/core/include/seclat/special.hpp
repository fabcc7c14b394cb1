#pragma once

#include <functional>

namespace seclat {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
/// a > 0, x >= 0. Series expansion for x < a + 1, Lentz continued fraction
/// otherwise; ~1e-14 relative accuracy.
double regularized_gamma_p(double a, double x);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // accumulated estimate of the absolute error
};

/// Adaptive Gauss-Kronrod (G7, K15) integration of f on [lo, hi] to absolute
/// tolerance abs_tol. Bisects intervals whose K15-G7 discrepancy exceeds
/// their share of the budget; depth-capped, returning the achieved error.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double lo, double hi, double abs_tol);

}  // namespace seclat
