#pragma once

#include "covercmp/pricing.hpp"
#include "covercmp/severity.hpp"

namespace covercmp {

/// Mean-variance preferences MV = E[W] - beta Var(W).
class Preferences {
 public:
  /// Throws DomainError unless both values are positive and finite.
  Preferences(double initial_wealth, double risk_aversion);

  /// beta = 1 / w0.
  static Preferences normalized(double initial_wealth);

  /// Skips the beta > 0 check so oracle tests can evaluate the risk-neutral
  /// case. Not for production paths.
  static Preferences unchecked_for_testing(double initial_wealth, double risk_aversion);

  [[nodiscard]] double initial_wealth() const noexcept { return wealth_; }
  [[nodiscard]] double risk_aversion() const noexcept { return beta_; }

 private:
  struct Unchecked {};
  Preferences(double initial_wealth, double risk_aversion, Unchecked);

  double wealth_;
  double beta_;
};

/// Everything needed to value both contract designs for one household.
struct Scenario {
  Preferences prefs;
  SeverityModel severity;
  FrequencyModel frequency;
  PricingParams indemnity;
  PricingParams parametric;

  /// Validates pricing parameters; the other members validate on construction.
  void validate() const;
};

/// House worth $500,000, wealth $150,000, one severe flood every 50 years,
/// nu = 1/350,000, theta_d = theta_p = 0.3, no fixed costs, beta = 1/w0.
Scenario baseline_scenario();

struct ContractOptimum {
  /// d* or k*, always in [0, L].
  double parameter = 0.0;
  /// The interior formula fell outside [0, L] and was projected.
  bool clamped = false;
  double premium = 0.0;
  double mv = 0.0;
  /// Boundary optima with equal MV; the lower-premium one was reported.
  bool tie = false;
};

// Closed-form objectives under Poisson counts. These throw DomainError when
// the scenario's frequency is not Poisson, or when d, k lie outside [0, L].

/// w0 - mu E[Y] - beta (mu Var(Y) + sigma_N^2 E[Y]^2); valid for any count law.
double mv_no_insurance(const Scenario& s);
double mv_indemnity(const Scenario& s, double d);
double mv_parametric(const Scenario& s, double k);

/// d MV^(d) / d d = lambda e^{-nu d} (theta_d - 2 beta d).
double mv_indemnity_slope(const Scenario& s, double d);
/// lambda e^{-nu d} (-nu theta_d + 2 nu beta d - 2 beta).
double mv_indemnity_curvature(const Scenario& s, double d);
/// lambda (-theta_p + 2 beta (E[Y] - k)).
double mv_parametric_slope(const Scenario& s, double k);
/// -2 beta lambda.
double mv_parametric_curvature(const Scenario& s);

/// d* = theta_d / (2 beta), projected onto [0, L].
ContractOptimum optimal_deductible(const Scenario& s);
/// k* = E[Y] - theta_p / (2 beta), projected onto [0, L].
ContractOptimum optimal_parametric(const Scenario& s);

// General count laws (any mean mu and variance sigma_N^2), from the random-sum
// identities Var(sum X_i) = mu Var(X) + sigma_N^2 E[X]^2. They coincide with the
// Poisson forms above when sigma_N^2 = mu.

double general_mv_indemnity(const Scenario& s, double d);
double general_mv_parametric(const Scenario& s, double k);

/// k* = E[Y] - (mu / sigma_N^2) theta_p / (2 beta), projected onto [0, L].
ContractOptimum general_parametric_optimum(const Scenario& s);

/// Root of mu theta_d = 2 beta (mu d + (sigma_N^2 - mu) E[min(Y, d)]) on [0, L].
///
/// Without an interior root the better boundary is returned with clamped set.
/// Throws NonMonotoneFOC if the right-hand side is not increasing on [0, L].
ContractOptimum general_deductible_optimum(const Scenario& s);

struct DualityCheck {
  /// d* + k* - E[Y].
  double gap = 0.0;
  /// Poisson counts, equal loadings and interior optima: the gap should vanish.
  bool identity_applies = false;
};

/// Uses the Poisson optima for Poisson counts and the general optima otherwise.
DualityCheck duality_gap(const Scenario& s);

}  // namespace covercmp
