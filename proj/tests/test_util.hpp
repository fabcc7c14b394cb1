#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "seclat/pmf.hpp"
#include "seclat/rng.hpp"

namespace seclat::testutil {

/// Uniform random sub-stochastic pmf with `n` entries at `offset`.
inline Pmf random_pmf(Rng& rng, int n, int offset = 0, double total = 1.0) {
  std::vector<double> m(static_cast<size_t>(n));
  double sum = 0.0;
  for (auto& v : m) sum += (v = rng.uniform());
  for (auto& v : m) v *= total / sum;
  return Pmf::from_masses(offset, std::move(m));
}

/// Plain O(n*m) reference convolution, no truncation anywhere.
inline std::vector<double> brute_convolve(std::span<const double> a,
                                          std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

inline double poisson_ref(double mean, int i) {
  return std::exp(-mean + i * std::log(mean) - std::lgamma(i + 1.0));
}

inline double geometric_ref(double p, int i) {
  return p * std::pow(1.0 - p, i);
}

/// Negative binomial (failures before the r-th success).
inline double neg_binomial_ref(double r, double p, int i) {
  return std::exp(std::lgamma(r + i) - std::lgamma(i + 1.0) - std::lgamma(r) +
                  r * std::log(p) + i * std::log1p(-p));
}

/// Total variation distance between a pmf and a reference mass function,
/// evaluated over the pmf's support plus `extra` points beyond it.
template <typename Ref>
double tv_distance(const Pmf& p, Ref ref, int extra = 50) {
  double tv = 0.0;
  for (int x = p.offset(); x <= p.last_support() + extra; ++x) {
    tv += std::fabs(p.mass_at(x) - ref(x));
  }
  return 0.5 * tv;
}

inline double max_entry_diff(const Pmf& a, const Pmf& b) {
  double worst = 0.0;
  const int lo = std::min(a.offset(), b.offset());
  const int hi = std::max(a.last_support(), b.last_support());
  for (int x = lo; x <= hi; ++x) {
    worst = std::max(worst, std::fabs(a.mass_at(x) - b.mass_at(x)));
  }
  return worst;
}

/** Reference stationary vector for the reflected walk, independent of the
 *  forward recursion: builds the truncated transition matrix explicitly
 *  (mass that would leave the truncation is clamped into the last state) and
 *  power-iterates from the unit mass at 0 until successive iterates differ
 *  by at most `tol` in sup norm.
 *
 *  z is the one-step increment pmf at offset -1. Rows are banded, so the
 *  iteration walks only the populated window of each row.
 */
inline std::vector<double> power_iteration_stationary(const Pmf& z, int states,
                                                      double tol) {
  const int z_hi = z.last_support();
  std::vector<double> v(static_cast<size_t>(states), 0.0);
  v[0] = 1.0;
  std::vector<double> next(v.size(), 0.0);
  for (int it = 0; it < 2000000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < states; ++i) {
      const double vi = v[static_cast<size_t>(i)];
      if (vi == 0.0) continue;
      double placed = 0.0;
      const int j_hi = std::min(states - 2, i + z_hi);
      for (int j = std::max(0, i - 1); j <= j_hi; ++j) {
        double mass = z.mass_at(j - i);
        if (i == 0 && j == 0) mass += z.mass_at(-1);
        next[static_cast<size_t>(j)] += vi * mass;
        placed += mass;
      }
      next[static_cast<size_t>(states - 1)] += vi * std::max(0.0, 1.0 - placed);
    }
    double delta = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      delta = std::max(delta, std::fabs(next[i] - v[i]));
    }
    v.swap(next);
    if (delta <= tol) break;
  }
  return v;
}

/** Exact evaluation of the zero-delay attack as a dense Markov chain: the
 *  pre-mining walk is iterated `premine` steps as a vector-matrix product
 *  with the Geom(alpha)-failure increment, and the race win probability from
 *  each starting deficit solves the absorbing-chain fixed point with the
 *  cutoff. Independent of both the simulator and the analytic pipeline.
 */
inline double dense_zero_delay_attack(double alpha, int k, int premine,
                                      int cutoff, int state_cap = 512) {
  const double q = 1.0 - alpha;
  std::vector<double> geo;
  for (double m = alpha; m > 1e-18; m *= q) geo.push_back(m);

  std::vector<double> w(static_cast<size_t>(state_cap), 0.0);
  w[0] = 1.0;
  std::vector<double> next(w.size(), 0.0);
  for (int step = 0; step < premine; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < state_cap; ++s) {
      const double ws = w[static_cast<size_t>(s)];
      if (ws == 0.0) continue;
      for (size_t g = 0; g < geo.size(); ++g) {
        const int to = std::min(state_cap - 1,
                                std::max(0, s + static_cast<int>(g) - 1));
        next[static_cast<size_t>(to)] += ws * geo[g];
      }
    }
    w.swap(next);
  }

  // win[d]: adversary gains g, wins at d - g <= 0, loses at d - g + 1 >=
  // cutoff, else continues from d - g + 1. Gauss-Seidel on the contraction.
  std::vector<double> win(static_cast<size_t>(cutoff) + 1, 0.0);
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double delta = 0.0;
    for (int d = cutoff - 1; d >= 1; --d) {
      double v = 0.0;
      for (size_t g = 0; g < geo.size(); ++g) {
        const int after = d - static_cast<int>(g);
        if (after <= 0) {
          v += geo[g];
        } else if (after + 1 < cutoff) {
          v += geo[g] * win[static_cast<size_t>(after + 1)];
        }
      }
      delta = std::max(delta, std::fabs(v - win[static_cast<size_t>(d)]));
      win[static_cast<size_t>(d)] = v;
    }
    if (delta < 1e-16) break;
  }

  std::vector<double> conf(1, 1.0);
  for (int c = 0; c < k; ++c) {
    std::vector<double> convd(conf.size() + geo.size() - 1, 0.0);
    for (size_t i = 0; i < conf.size(); ++i) {
      for (size_t g = 0; g < geo.size(); ++g) {
        convd[i + g] += conf[i] * geo[g];
      }
    }
    conf.swap(convd);
  }

  double total = 0.0;
  for (int s = 0; s < state_cap; ++s) {
    const double ws = w[static_cast<size_t>(s)];
    if (ws == 0.0) continue;
    for (size_t c = 0; c < conf.size(); ++c) {
      const int deficit = k - s - static_cast<int>(c);
      const double p_win = deficit <= 0 ? 1.0
                           : deficit >= cutoff
                               ? 0.0
                               : win[static_cast<size_t>(deficit)];
      total += ws * conf[c] * p_win;
    }
  }
  return total;
}

}  // namespace seclat::testutil
