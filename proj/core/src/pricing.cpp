#include "covercmp/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covercmp/errors.hpp"

namespace covercmp {

void PricingParams::validate() const {
  if (!std::isfinite(loading) || loading < 0.0) {
    throw DomainError("loading must be finite and non-negative");
  }
  if (!std::isfinite(fixed_cost) || fixed_cost < 0.0) {
    throw DomainError("fixed cost must be finite and non-negative");
  }
}

FrequencyModel::FrequencyModel(double mean, double variance, bool poisson)
    : mean_(mean), variance_(variance), poisson_(poisson) {
  if (!std::isfinite(mean) || mean <= 0.0) {
    throw DomainError("event-count mean must be positive and finite");
  }
  if (!std::isfinite(variance) || variance <= 0.0) {
    throw DomainError("event-count variance must be positive and finite");
  }
}

FrequencyModel FrequencyModel::poisson(double rate) { return {rate, rate, true}; }

FrequencyModel FrequencyModel::general(double mean, double variance) {
  return {mean, variance, false};
}

double indemnity_premium(const SeverityModel& sev, const FrequencyModel& freq,
                         const PricingParams& pricing, double d) {
  return (1.0 + pricing.loading) * (freq.mean() * excess_mean(sev, d) + pricing.fixed_cost);
}

double parametric_premium(const FrequencyModel& freq, const PricingParams& pricing,
                          double k) {
  if (!std::isfinite(k) || k < 0.0) {
    throw DomainError("parametric payment k must be non-negative, got " + std::to_string(k));
  }
  return (1.0 + pricing.loading) * (freq.mean() * k + pricing.fixed_cost);
}

PremiumInversion invert_indemnity_premium(const SeverityModel& sev,
                                          const FrequencyModel& freq,
                                          const PricingParams& pricing, double target) {
  if (!std::isfinite(target) || target < pricing.premium_floor()) {
    throw Infeasible("indemnity premium target " + std::to_string(target) +
                     " below floor " + std::to_string(pricing.premium_floor()));
  }
  if (target > indemnity_premium(sev, freq, pricing, 0.0)) {
    return {0.0, true};
  }
  // Required expected excess per event, then E[(Y-d)+] = (e^{-nu d} - e^{-nu L}) / nu
  // solved for d, written relative to L to stay accurate near the cap.
  const double nu = sev.nu();
  const double cap = sev.cap();
  const double excess = (target / (1.0 + pricing.loading) - pricing.fixed_cost) / freq.mean();
  double d = 0.0;
  if (nu * cap < 700.0) {
    d = cap - std::log1p(nu * std::max(excess, 0.0) * std::exp(nu * cap)) / nu;
  } else {
    d = -std::log(nu * std::max(excess, 0.0) + std::exp(-nu * cap)) / nu;
  }
  return {std::clamp(d, 0.0, cap), false};
}

double invert_parametric_premium(const FrequencyModel& freq, const PricingParams& pricing,
                                 double target) {
  if (!std::isfinite(target) || target < pricing.premium_floor()) {
    throw Infeasible("parametric premium target " + std::to_string(target) +
                     " below floor " + std::to_string(pricing.premium_floor()));
  }
  const double k = (target / (1.0 + pricing.loading) - pricing.fixed_cost) / freq.mean();
  return std::max(k, 0.0);
}

PremiumInversion invert_decreasing_premium(const std::function<double(double)>& premium,
                                           double target, double lo, double hi, double tol) {
  if (target < premium(hi)) {
    throw Infeasible("premium target below the cheapest contract");
  }
  if (target > premium(lo)) {
    return {lo, true};
  }
  // premium(lo) >= target >= premium(hi)
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (premium(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

}  // namespace covercmp
