#include "covercmp/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covercmp/errors.hpp"
#include "covercmp/roots.hpp"

namespace covercmp {

namespace {

constexpr double kDeductibleRootTol = 1e-6;
constexpr int kDeductibleRootMaxIter = 200;

void require_poisson(const Scenario& s) {
  if (!s.frequency.is_poisson()) {
    throw DomainError("closed-form objective requires Poisson event counts");
  }
}

void check_payment(const Scenario& s, double k) {
  if (!std::isfinite(k) || k < 0.0 || k > s.severity.cap()) {
    throw DomainError("parametric payment " + std::to_string(k) + " outside [0, " +
                      std::to_string(s.severity.cap()) + "]");
  }
}

bool mv_tied(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

Preferences::Preferences(double initial_wealth, double risk_aversion)
    : wealth_(initial_wealth), beta_(risk_aversion) {
  if (!std::isfinite(initial_wealth) || initial_wealth <= 0.0) {
    throw DomainError("initial wealth must be positive and finite");
  }
  if (!std::isfinite(risk_aversion) || risk_aversion <= 0.0) {
    throw DomainError("risk aversion beta must be positive and finite");
  }
}

Preferences::Preferences(double initial_wealth, double risk_aversion, Unchecked)
    : wealth_(initial_wealth), beta_(risk_aversion) {}

Preferences Preferences::normalized(double initial_wealth) {
  return {initial_wealth, 1.0 / initial_wealth};
}

Preferences Preferences::unchecked_for_testing(double initial_wealth, double risk_aversion) {
  return {initial_wealth, risk_aversion, Unchecked{}};
}

void Scenario::validate() const {
  indemnity.validate();
  parametric.validate();
}

Scenario baseline_scenario() {
  return Scenario{
      Preferences::normalized(150'000.0),
      SeverityModel::from_exponential_mean(350'000.0, 500'000.0),
      FrequencyModel::poisson(1.0 / 50.0),
      PricingParams{0.3, 0.0},
      PricingParams{0.3, 0.0},
  };
}

double mv_no_insurance(const Scenario& s) {
  const double mu = s.frequency.mean();
  const double mean_y = mean_severity(s.severity);
  const double variance = mu * variance_severity(s.severity) +
                          s.frequency.variance() * mean_y * mean_y;
  return s.prefs.initial_wealth() - mu * mean_y - s.prefs.risk_aversion() * variance;
}

double mv_indemnity(const Scenario& s, double d) {
  require_poisson(s);
  const double lambda = s.frequency.mean();
  return s.prefs.initial_wealth() -
         indemnity_premium(s.severity, s.frequency, s.indemnity, d) -
         lambda * mean_severity(s.severity) + lambda * excess_mean(s.severity, d) -
         s.prefs.risk_aversion() * lambda * retained_second_moment(s.severity, d);
}

double mv_parametric(const Scenario& s, double k) {
  require_poisson(s);
  check_payment(s, k);
  const double lambda = s.frequency.mean();
  const double mean_y = mean_severity(s.severity);
  return s.prefs.initial_wealth() - parametric_premium(s.frequency, s.parametric, k) -
         lambda * mean_y + lambda * k -
         s.prefs.risk_aversion() * lambda *
             (second_moment_severity(s.severity) + k * k - 2.0 * k * mean_y);
}

double mv_indemnity_slope(const Scenario& s, double d) {
  require_poisson(s);
  retained_mean(s.severity, d);  // range check
  return s.frequency.mean() * std::exp(-s.severity.nu() * d) *
         (s.indemnity.loading - 2.0 * s.prefs.risk_aversion() * d);
}

double mv_indemnity_curvature(const Scenario& s, double d) {
  require_poisson(s);
  retained_mean(s.severity, d);
  const double nu = s.severity.nu();
  const double beta = s.prefs.risk_aversion();
  return s.frequency.mean() * std::exp(-nu * d) *
         (-nu * s.indemnity.loading + 2.0 * nu * beta * d - 2.0 * beta);
}

double mv_parametric_slope(const Scenario& s, double k) {
  require_poisson(s);
  check_payment(s, k);
  return s.frequency.mean() *
         (-s.parametric.loading +
          2.0 * s.prefs.risk_aversion() * (mean_severity(s.severity) - k));
}

double mv_parametric_curvature(const Scenario& s) {
  require_poisson(s);
  return -2.0 * s.prefs.risk_aversion() * s.frequency.mean();
}

ContractOptimum optimal_deductible(const Scenario& s) {
  require_poisson(s);
  const double cap = s.severity.cap();
  const double interior = s.indemnity.loading / (2.0 * s.prefs.risk_aversion());
  ContractOptimum opt;
  opt.parameter = std::clamp(interior, 0.0, cap);
  opt.clamped = interior > cap;
  if (!opt.clamped && !(mv_indemnity_curvature(s, opt.parameter) < 0.0)) {
    throw DomainError("second-order condition fails at the interior deductible");
  }
  opt.premium = indemnity_premium(s.severity, s.frequency, s.indemnity, opt.parameter);
  opt.mv = mv_indemnity(s, opt.parameter);
  return opt;
}

ContractOptimum optimal_parametric(const Scenario& s) {
  require_poisson(s);
  const double interior =
      mean_severity(s.severity) - s.parametric.loading / (2.0 * s.prefs.risk_aversion());
  ContractOptimum opt;
  opt.parameter = std::clamp(interior, 0.0, s.severity.cap());
  opt.clamped = opt.parameter != interior;
  opt.premium = parametric_premium(s.frequency, s.parametric, opt.parameter);
  opt.mv = mv_parametric(s, opt.parameter);
  return opt;
}

double general_mv_indemnity(const Scenario& s, double d) {
  const double mu = s.frequency.mean();
  const double retained = retained_mean(s.severity, d);
  const double retained_var = retained_second_moment(s.severity, d) - retained * retained;
  const double variance = mu * retained_var + s.frequency.variance() * retained * retained;
  return s.prefs.initial_wealth() -
         indemnity_premium(s.severity, s.frequency, s.indemnity, d) - mu * retained -
         s.prefs.risk_aversion() * variance;
}

double general_mv_parametric(const Scenario& s, double k) {
  check_payment(s, k);
  const double mu = s.frequency.mean();
  const double shortfall = mean_severity(s.severity) - k;
  const double variance = mu * variance_severity(s.severity) +
                          s.frequency.variance() * shortfall * shortfall;
  return s.prefs.initial_wealth() - parametric_premium(s.frequency, s.parametric, k) -
         mu * shortfall - s.prefs.risk_aversion() * variance;
}

ContractOptimum general_parametric_optimum(const Scenario& s) {
  const double interior =
      mean_severity(s.severity) - (s.frequency.mean() / s.frequency.variance()) *
                                      s.parametric.loading /
                                      (2.0 * s.prefs.risk_aversion());
  ContractOptimum opt;
  opt.parameter = std::clamp(interior, 0.0, s.severity.cap());
  opt.clamped = opt.parameter != interior;
  opt.premium = parametric_premium(s.frequency, s.parametric, opt.parameter);
  opt.mv = general_mv_parametric(s, opt.parameter);
  return opt;
}

ContractOptimum general_deductible_optimum(const Scenario& s) {
  const double mu = s.frequency.mean();
  const double var_n = s.frequency.variance();
  const double beta = s.prefs.risk_aversion();
  const double nu = s.severity.nu();
  const double cap = s.severity.cap();

  // d/dd of mu d + (var_n - mu) E[min(Y,d)] is mu + (var_n - mu) e^{-nu d},
  // monotone in d, so checking both ends covers [0, L].
  const double rhs_slope_lo = var_n;
  const double rhs_slope_hi = mu + (var_n - mu) * std::exp(-nu * cap);
  if (!(rhs_slope_lo > 0.0) || !(rhs_slope_hi > 0.0)) {
    throw NonMonotoneFOC("first-order condition is not monotone on [0, L]");
  }

  const auto foc = [&](double d) {
    return mu * s.indemnity.loading -
           2.0 * beta * (mu * d + (var_n - mu) * retained_mean(s.severity, d));
  };

  ContractOptimum opt;
  const double at_lo = foc(0.0);
  const double at_hi = foc(cap);
  if (at_lo == 0.0 || at_hi == 0.0 || std::signbit(at_lo) != std::signbit(at_hi)) {
    opt.parameter =
        solve_bracketed(foc, 0.0, cap, kDeductibleRootTol, kDeductibleRootMaxIter).root;
  } else {
    const double mv_lo = general_mv_indemnity(s, 0.0);
    const double mv_hi = general_mv_indemnity(s, cap);
    opt.clamped = true;
    if (mv_tied(mv_lo, mv_hi)) {
      // d = L carries the lower premium.
      opt.parameter = cap;
      opt.tie = true;
    } else {
      opt.parameter = mv_hi > mv_lo ? cap : 0.0;
    }
  }
  opt.premium = indemnity_premium(s.severity, s.frequency, s.indemnity, opt.parameter);
  opt.mv = general_mv_indemnity(s, opt.parameter);
  return opt;
}

DualityCheck duality_gap(const Scenario& s) {
  const bool poisson = s.frequency.is_poisson();
  const ContractOptimum d_opt =
      poisson ? optimal_deductible(s) : general_deductible_optimum(s);
  const ContractOptimum k_opt =
      poisson ? optimal_parametric(s) : general_parametric_optimum(s);
  DualityCheck check;
  check.gap = d_opt.parameter + k_opt.parameter - mean_severity(s.severity);
  check.identity_applies = poisson && s.indemnity.loading == s.parametric.loading &&
                           !d_opt.clamped && !k_opt.clamped;
  return check;
}

}  // namespace covercmp
