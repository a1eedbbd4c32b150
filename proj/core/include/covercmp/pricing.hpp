#pragma once

#include <cmath>
#include <functional>

#include "covercmp/severity.hpp"

namespace covercmp {

/// Expectation-principle pricing: premium = (1 + loading) * (E[benefit] + fixed_cost).
///
/// The fixed cost is charged once per period, not per event.
struct PricingParams {
  double loading = 0.0;
  double fixed_cost = 0.0;

  /// Throws DomainError unless both are finite and non-negative.
  void validate() const;

  /// (1 + loading) * fixed_cost: the premium of a contract with zero expected benefit.
  [[nodiscard]] double premium_floor() const noexcept {
    return (1.0 + loading) * fixed_cost;
  }
};

/// Annual event-count law, described by its first two moments.
class FrequencyModel {
 public:
  static FrequencyModel poisson(double rate);
  /// Any count law with the given mean and variance. A variance equal to the
  /// mean is still treated as non-Poisson; use poisson() for that.
  static FrequencyModel general(double mean, double variance);

  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] double variance() const noexcept { return variance_; }
  [[nodiscard]] bool is_poisson() const noexcept { return poisson_; }
  /// Var(N) / E[N]; exactly 1 for Poisson.
  [[nodiscard]] double dispersion() const noexcept { return variance_ / mean_; }

 private:
  FrequencyModel(double mean, double variance, bool poisson);

  double mean_;
  double variance_;
  bool poisson_;
};

/// Result of inverting a premium schedule.
struct PremiumInversion {
  double parameter = 0.0;
  /// The target exceeded the premium at the most generous contract, and the
  /// parameter was clamped to that contract.
  bool clamped = false;
};

/// (1 + theta_d) (E[N] E[(Y - d)+] + gamma_d). Throws DomainError for d outside [0, L].
double indemnity_premium(const SeverityModel& sev, const FrequencyModel& freq,
                         const PricingParams& pricing, double d);

/// (1 + theta_p) (E[N] k + gamma_p). Throws DomainError for k < 0.
double parametric_premium(const FrequencyModel& freq, const PricingParams& pricing,
                          double k);

/// Deductible d in [0, L] whose indemnity premium equals target.
///
/// Closed form for the censored exponential. Throws Infeasible when the target
/// lies below the premium floor (1 + theta_d) gamma_d; a target above the
/// full-cover premium returns d = 0 with clamped set.
PremiumInversion invert_indemnity_premium(const SeverityModel& sev,
                                          const FrequencyModel& freq,
                                          const PricingParams& pricing, double target);

/// Per-event payment k whose parametric premium equals target. The result is
/// not capped at L. Throws Infeasible when target < (1 + theta_p) gamma_p.
double invert_parametric_premium(const FrequencyModel& freq, const PricingParams& pricing,
                                 double target);

/// Numeric inversion of any premium schedule that is non-increasing in its
/// parameter on [lo, hi], by bisection to absolute tolerance tol.
///
/// Fallback for severities without a closed-form inverse. Throws Infeasible
/// when target < premium(hi); returns lo with clamped set when target > premium(lo).
PremiumInversion invert_decreasing_premium(const std::function<double(double)>& premium,
                                           double target, double lo, double hi,
                                           double tol = 1e-6);

}  // namespace covercmp
