#include "seclat/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seclat {

namespace {

constexpr double kNormTolerance = 1e-9;

}  // namespace

Pmf::Pmf(int offset, std::vector<double> masses, double tail)
    : offset_(offset), masses_(std::move(masses)), tail_(tail) {}

Pmf Pmf::point(int value) { return Pmf(value, {1.0}, 0.0); }

Pmf Pmf::from_masses(int offset, std::vector<double> masses) {
  if (masses.empty()) {
    throw std::invalid_argument("Pmf: masses must be non-empty");
  }
  double sum = 0.0;
  for (double& m : masses) {
    if (m < 0.0) {
      if (m < -1e-15) {
        throw std::invalid_argument("Pmf: negative mass " + std::to_string(m));
      }
      m = 0.0;  // negative-zero artifact
    }
    sum += m;
  }
  if (sum > 1.0 + kNormTolerance) {
    throw std::invalid_argument("Pmf: masses sum to " + std::to_string(sum) +
                                " > 1");
  }
  // Strip trailing exact zeros, keeping at least one entry.
  while (masses.size() > 1 && masses.back() == 0.0) {
    masses.pop_back();
  }
  return Pmf(offset, std::move(masses), std::max(0.0, 1.0 - sum));
}

double Pmf::mass_at(int value) const {
  const long long idx = static_cast<long long>(value) - offset_;
  if (idx < 0 || idx >= static_cast<long long>(masses_.size())) return 0.0;
  return masses_[static_cast<size_t>(idx)];
}

double Pmf::ccdf(int x) const { return ccdf_lower(x) + tail_; }

double Pmf::ccdf_lower(int x) const {
  if (x <= offset_) return std::max(0.0, 1.0 - tail_);
  const long long idx = static_cast<long long>(x) - offset_;
  if (idx >= static_cast<long long>(masses_.size())) return 0.0;
  // Sum upward from the smallest entries (the far tail) for precision.
  double s = 0.0;
  for (size_t i = masses_.size(); i > static_cast<size_t>(idx); --i) {
    s += masses_[i - 1];
  }
  return s;
}

double Pmf::mean() const {
  double s = 0.0;
  for (size_t i = masses_.size(); i > 0; --i) {
    s += (offset_ + static_cast<double>(i - 1)) * masses_[i - 1];
  }
  return s + tail_ * last_support();
}

double Pmf::mean_slack(int horizon) const {
  if (horizon <= last_support()) return 0.0;
  return tail_ * (horizon - last_support());
}

Pmf Pmf::shifted(int delta) const { return Pmf(offset_ + delta, masses_, tail_); }

Pmf Pmf::truncated(double eps_tail) const {
  double dropped = 0.0;
  size_t keep = masses_.size();
  while (keep > 1 && dropped + masses_[keep - 1] <= eps_tail) {
    dropped += masses_[keep - 1];
    --keep;
  }
  if (keep == masses_.size()) return *this;
  std::vector<double> kept(masses_.begin(), masses_.begin() + keep);
  return Pmf(offset_, std::move(kept), tail_ + dropped);
}

Pmf convolve(const Pmf& a, const Pmf& b, double eps_tail) {
  const auto am = a.masses();
  const auto bm = b.masses();
  std::vector<double> out(am.size() + bm.size() - 1, 0.0);
  for (size_t i = 0; i < am.size(); ++i) {
    if (am[i] == 0.0) continue;
    const double ai = am[i];
    for (size_t j = 0; j < bm.size(); ++j) {
      out[i + j] += ai * bm[j];
    }
  }
  // Mass conservation in from_masses: whatever is not stored (input tails
  // plus truncation) lands in the result tail, keeping ccdf an upper bound.
  return Pmf::from_masses(a.offset() + b.offset(), std::move(out))
      .truncated(eps_tail);
}

Pmf power_convolve(const Pmf& p, int n, double eps_tail) {
  if (n < 0) {
    throw std::invalid_argument("power_convolve: negative exponent");
  }
  Pmf result = Pmf::point(0);
  if (n == 0) return result;
  Pmf base = p;
  bool result_is_identity = true;
  while (n > 0) {
    if (n & 1) {
      result = result_is_identity ? base : convolve(result, base, eps_tail);
      result_is_identity = false;
    }
    n >>= 1;
    if (n > 0) base = convolve(base, base, eps_tail);
  }
  return result;
}

}  // namespace seclat
