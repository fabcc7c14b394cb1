#include "seclat/delay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "seclat/special.hpp"

namespace seclat {

namespace {

constexpr double kQuantileCap = 1.0 - 1e-13;  // grid cap for mixing quadrature
constexpr size_t kMaxSupport = 2000000;

double log_poisson(double m, int i) {
  if (m == 0.0) return i == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -m + i * std::log(m) - std::lgamma(i + 1.0);
}

double poisson_mass(double m, int i) {
  const double lp = log_poisson(m, i);
  return lp > -745.0 ? std::exp(lp) : 0.0;
}

// Grows `masses` with entries of `gen(i)` until at most eps of mass is left.
std::vector<double> accumulate_series(const std::function<double(int)>& gen,
                                      double eps) {
  std::vector<double> masses;
  double cum = 0.0;
  for (size_t i = 0; i < kMaxSupport; ++i) {
    const double m = gen(static_cast<int>(i));
    masses.push_back(m);
    cum += m;
    if (i >= 1 && 1.0 - cum <= eps) return masses;
  }
  throw std::runtime_error("mixed-poisson support did not close below eps");
}

}  // namespace

DelaySpec DelaySpec::deterministic(double seconds) {
  if (seconds < 0.0) throw std::invalid_argument("delay: negative constant");
  DelaySpec d;
  d.kind_ = DelayKind::kDeterministic;
  d.value_ = seconds;
  return d;
}

DelaySpec DelaySpec::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("delay: rate must be > 0");
  DelaySpec d;
  d.kind_ = DelayKind::kExponential;
  d.rate_ = rate;
  return d;
}

DelaySpec DelaySpec::erlang(int shape, double rate) {
  if (shape < 1) throw std::invalid_argument("delay: erlang shape must be >= 1");
  if (!(rate > 0.0)) throw std::invalid_argument("delay: rate must be > 0");
  DelaySpec d;
  d.kind_ = DelayKind::kErlang;
  d.shape_ = shape;
  d.rate_ = rate;
  return d;
}

DelaySpec DelaySpec::gamma(double shape, double rate) {
  if (!(shape > 0.0)) throw std::invalid_argument("delay: gamma shape must be > 0");
  if (!(rate > 0.0)) throw std::invalid_argument("delay: rate must be > 0");
  DelaySpec d;
  d.kind_ = DelayKind::kGamma;
  d.shape_ = shape;
  d.rate_ = rate;
  return d;
}

DelaySpec DelaySpec::empirical(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("delay: no empirical samples");
  for (double s : samples) {
    if (s < 0.0) throw std::invalid_argument("delay: negative empirical sample");
  }
  DelaySpec d;
  d.kind_ = DelayKind::kEmpirical;
  d.samples_ = std::move(samples);
  return d;
}

double DelaySpec::mean() const {
  switch (kind_) {
    case DelayKind::kDeterministic: return value_;
    case DelayKind::kExponential: return 1.0 / rate_;
    case DelayKind::kErlang:
    case DelayKind::kGamma: return shape_ / rate_;
    case DelayKind::kEmpirical:
      return std::accumulate(samples_.begin(), samples_.end(), 0.0) /
             static_cast<double>(samples_.size());
  }
  return 0.0;
}

double DelaySpec::cdf(double t) const {
  if (t < 0.0) return 0.0;
  switch (kind_) {
    case DelayKind::kDeterministic: return t >= value_ ? 1.0 : 0.0;
    case DelayKind::kExponential: return 1.0 - std::exp(-rate_ * t);
    case DelayKind::kErlang:
    case DelayKind::kGamma: return regularized_gamma_p(shape_, rate_ * t);
    case DelayKind::kEmpirical: {
      size_t count = 0;
      for (double s : samples_) count += (s <= t) ? 1 : 0;
      return static_cast<double>(count) / static_cast<double>(samples_.size());
    }
  }
  return 0.0;
}

double DelaySpec::quantile(double q) const {
  if (q <= 0.0) return 0.0;
  q = std::min(q, 1.0);
  switch (kind_) {
    case DelayKind::kDeterministic: return value_;
    case DelayKind::kExponential:
      return q >= 1.0 ? std::numeric_limits<double>::infinity()
                      : -std::log1p(-q) / rate_;
    case DelayKind::kErlang:
    case DelayKind::kGamma: {
      double hi = (shape_ + 1.0) / rate_;
      while (cdf(hi) < q) hi *= 2.0;
      double lo = 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < q ? lo : hi) = mid;
      }
      return hi;
    }
    case DelayKind::kEmpirical: {
      std::vector<double> sorted = samples_;
      std::sort(sorted.begin(), sorted.end());
      const size_t n = sorted.size();
      const size_t idx = std::min(
          n - 1, static_cast<size_t>(std::ceil(q * static_cast<double>(n))) -
                     (q * static_cast<double>(n) > 0 ? 1 : 0));
      return sorted[idx];
    }
  }
  return 0.0;
}

DelaySpec DelaySpec::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("delay scale must be > 0");
  switch (kind_) {
    case DelayKind::kDeterministic: return deterministic(value_ * factor);
    case DelayKind::kExponential: return exponential(rate_ / factor);
    case DelayKind::kErlang:
      return erlang(static_cast<int>(shape_), rate_ / factor);
    case DelayKind::kGamma: return gamma(shape_, rate_ / factor);
    case DelayKind::kEmpirical: {
      std::vector<double> s = samples_;
      for (double& v : s) v *= factor;
      return empirical(std::move(s));
    }
  }
  throw std::logic_error("unreachable");
}

std::string DelaySpec::describe() const {
  char buf[128];
  switch (kind_) {
    case DelayKind::kDeterministic:
      std::snprintf(buf, sizeof buf, "deterministic(%g)", value_);
      break;
    case DelayKind::kExponential:
      std::snprintf(buf, sizeof buf, "exponential(rate=%g)", rate_);
      break;
    case DelayKind::kErlang:
      std::snprintf(buf, sizeof buf, "erlang(%d, rate=%g)",
                    static_cast<int>(shape_), rate_);
      break;
    case DelayKind::kGamma:
      std::snprintf(buf, sizeof buf, "gamma(%g, rate=%g)", shape_, rate_);
      break;
    case DelayKind::kEmpirical:
      std::snprintf(buf, sizeof buf, "empirical(%zu samples, mean=%g)",
                    samples_.size(), mean());
      break;
  }
  return buf;
}

void ModelParams::validate() const {
  if (!(mu_m > 0.0)) throw std::invalid_argument("params: mu_m must be > 0");
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::invalid_argument("params: alpha must be in (0, 1]");
  }
  if (k < 1) throw std::invalid_argument("params: k must be >= 1");
  if (b0 < 0) throw std::invalid_argument("params: b0 must be >= 0");
  if (b0 > 0 && !(lambda_h > 0.0)) {
    throw std::invalid_argument("params: lambda_h must be > 0 when b0 > 0");
  }
  if (b && !(*b > 0.0)) throw std::invalid_argument("params: b must be > 0");
}

Pmf mixed_poisson_pmf(const DelaySpec& delay, double arrival_rate,
                      double eps_tail) {
  if (arrival_rate < 0.0) {
    throw std::invalid_argument("mixed_poisson: negative arrival rate");
  }
  if (arrival_rate == 0.0) return Pmf::point(0);
  const double r = arrival_rate;
  switch (delay.kind()) {
    case DelayKind::kDeterministic: {
      const double m = r * delay.value();
      if (m == 0.0) return Pmf::point(0);
      return Pmf::from_masses(
          0, accumulate_series([m](int i) { return poisson_mass(m, i); },
                               eps_tail));
    }
    case DelayKind::kExponential: {
      // Exponential mixing of a Poisson is geometric.
      const double p = delay.rate() / (delay.rate() + r);
      double term = p;
      return Pmf::from_masses(0, accumulate_series(
                                     [&term, p](int i) {
                                       if (i == 0) return term;
                                       term *= 1.0 - p;
                                       return term;
                                     },
                                     eps_tail));
    }
    case DelayKind::kErlang:
    case DelayKind::kGamma: {
      // Gamma mixing gives a negative binomial with the gamma's shape.
      const double s = delay.shape();
      const double p = delay.rate() / (delay.rate() + r);
      const double lp = std::log(p), lq = std::log1p(-p);
      const double lg_s = std::lgamma(s);
      return Pmf::from_masses(
          0, accumulate_series(
                 [=](int i) {
                   const double l = std::lgamma(s + i) - std::lgamma(i + 1.0) -
                                    lg_s + s * lp + i * lq;
                   return l > -745.0 ? std::exp(l) : 0.0;
                 },
                 eps_tail));
    }
    case DelayKind::kEmpirical: {
      const auto& samples = delay.samples();
      const double w = 1.0 / static_cast<double>(samples.size());
      std::vector<double> lm(samples.size());
      for (size_t j = 0; j < samples.size(); ++j) {
        lm[j] = r * samples[j];
      }
      return Pmf::from_masses(
          0, accumulate_series(
                 [&](int i) {
                   double acc = 0.0;
                   for (double m : lm) acc += poisson_mass(m, i);
                   return acc * w;
                 },
                 eps_tail));
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

struct MixingParts {
  std::vector<std::pair<double, double>> atoms;  // (value, weight)
  std::function<double(double)> density;         // nullptr-like if none
  double cap = 0.0;
};

MixingParts mixing_parts(const DelaySpec& d) {
  MixingParts parts;
  parts.cap = d.quantile(kQuantileCap);
  switch (d.kind()) {
    case DelayKind::kDeterministic:
      parts.atoms.emplace_back(d.value(), 1.0);
      break;
    case DelayKind::kEmpirical: {
      const double w = 1.0 / static_cast<double>(d.samples().size());
      for (double s : d.samples()) parts.atoms.emplace_back(s, w);
      break;
    }
    case DelayKind::kExponential: {
      const double nu = d.rate();
      parts.density = [nu](double t) { return nu * std::exp(-nu * t); };
      break;
    }
    case DelayKind::kErlang:
    case DelayKind::kGamma: {
      const double s = d.shape(), nu = d.rate();
      const double lnorm = s * std::log(nu) - std::lgamma(s);
      parts.density = [s, nu, lnorm](double t) {
        if (t <= 0.0) return s < 1.0 ? 0.0 : (s == 1.0 ? nu : 0.0);
        const double l = lnorm + (s - 1.0) * std::log(t) - nu * t;
        return l > -745.0 ? std::exp(l) : 0.0;
      };
      break;
    }
  }
  return parts;
}

struct WeightedMixing {
  MixingParts parts;
  std::function<double(double)> reweight;  // multiplies the mixing measure
};

double mixing_entry(const WeightedMixing& wm, double r, int i) {
  double v = 0.0;
  for (const auto& [a, w] : wm.parts.atoms) {
    const double rw = wm.reweight ? wm.reweight(a) : 1.0;
    v += w * rw * poisson_mass(r * a, i);
  }
  if (wm.parts.density) {
    auto f = [&](double t) {
      const double rw = wm.reweight ? wm.reweight(t) : 1.0;
      return wm.parts.density(t) * rw * poisson_mass(r * t, i);
    };
    v += integrate_adaptive(f, 0.0, wm.parts.cap, 1e-12).value;
  }
  return v;
}

// Entries are the sum over all weighted mixing components; the series closes
// only against the combined mass, so components must jointly integrate to 1.
Pmf mixed_poisson_generic(const std::vector<WeightedMixing>& mix, double r,
                          double eps_tail) {
  auto entry = [&](int i) {
    double v = 0.0;
    for (const auto& wm : mix) v += mixing_entry(wm, r, i);
    return v;
  };
  return Pmf::from_masses(0, accumulate_series(entry, eps_tail));
}

}  // namespace

Pmf mixed_poisson_pmf_quadrature(const DelaySpec& delay, double arrival_rate,
                                 double eps_tail) {
  if (arrival_rate < 0.0) {
    throw std::invalid_argument("mixed_poisson: negative arrival rate");
  }
  if (arrival_rate == 0.0) return Pmf::point(0);
  return mixed_poisson_generic({{mixing_parts(delay), nullptr}}, arrival_rate,
                               eps_tail);
}

Pmf c_alpha_pmf(double alpha, double eps_tail) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::invalid_argument("c_alpha: alpha must be in (0, 1]");
  }
  if (alpha == 1.0) return Pmf::point(0);
  double term = alpha;
  const double q = 1.0 - alpha;
  return Pmf::from_masses(0, accumulate_series(
                                 [&term, q](int i) {
                                   if (i == 0) return term;
                                   term *= q;
                                   return term;
                                 },
                                 eps_tail));
}

Pmf c_b0_pmf(const ModelParams& params, double eps_tail) {
  params.validate();
  if (params.b0 == 0) return Pmf::point(0);
  return mixed_poisson_pmf(DelaySpec::erlang(params.b0, params.lambda_h),
                           params.beta() * params.mu_m, eps_tail);
}

MaxDelayMixture::MaxDelayMixture(DelaySpec delay, int b0, double lambda_h)
    : delay_(std::move(delay)), b0_(b0), lambda_h_(lambda_h) {
  if (b0 < 1) {
    throw std::invalid_argument(
        "max-delay mixture needs b0 >= 1; use the delay directly otherwise");
  }
  if (!(lambda_h > 0.0)) {
    throw std::invalid_argument("max-delay mixture: lambda_h must be > 0");
  }
}

Pmf MaxDelayMixture::mixed_poisson(double arrival_rate, double eps_tail) const {
  if (arrival_rate < 0.0) {
    throw std::invalid_argument("mixed_poisson: negative arrival rate");
  }
  if (arrival_rate == 0.0) return Pmf::point(0);
  const DelaySpec erl = DelaySpec::erlang(b0_, lambda_h_);
  MixingParts pd = mixing_parts(delay_);
  MixingParts pe = mixing_parts(erl);
  const double cap = std::max(pd.cap, pe.cap);
  pd.cap = pe.cap = cap;

  // dF_max = F_E dF_D + F_D dF_E; the count is integrated against both terms
  // jointly so the entry series closes against total mass 1.
  const DelaySpec delay = delay_;
  std::vector<WeightedMixing> mix;
  mix.push_back({pd, [erl](double t) { return erl.cdf(t); }});
  mix.push_back({pe, [delay](double t) { return delay.cdf(t); }});
  return mixed_poisson_generic(mix, arrival_rate, eps_tail);
}

double MaxDelayMixture::mean() const {
  const DelaySpec erl = DelaySpec::erlang(b0_, lambda_h_);
  const double cap =
      std::max(delay_.quantile(kQuantileCap), erl.quantile(kQuantileCap));
  // E[max] = integral of the survival function 1 - F_D F_E.
  auto surv = [&](double t) { return 1.0 - delay_.cdf(t) * erl.cdf(t); };
  return integrate_adaptive(surv, 0.0, cap, 1e-12).value;
}

}  // namespace seclat
