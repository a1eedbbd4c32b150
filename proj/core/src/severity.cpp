#include "covercmp/severity.hpp"

#include <cmath>
#include <string>

#include "covercmp/errors.hpp"

namespace covercmp {

namespace {

void check_deductible(const SeverityModel& model, double d) {
  if (!std::isfinite(d) || d < 0.0 || d > model.cap()) {
    throw DomainError("deductible " + std::to_string(d) + " outside [0, " +
                      std::to_string(model.cap()) + "]");
  }
}

}  // namespace

namespace detail {

double one_minus_exp_over_x(double x) {
  if (std::abs(x) < 1e-8) {
    return 1.0 - x / 2.0 + x * x / 6.0;
  }
  return -std::expm1(-x) / x;
}

// Series: sum_{n>=2} (-1)^n (n-1) x^(n-2) / n!.
double censored_square_kernel(double x) {
  if (std::abs(x) < 1e-2) {
    double term_factorial = 2.0;  // n!
    double power = 1.0;           // x^(n-2)
    double sum = 0.0;
    for (int n = 2; n <= 14; ++n) {
      if (n > 2) {
        term_factorial *= n;
        power *= x;
      }
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      sum += sign * (n - 1) * power / term_factorial;
    }
    return sum;
  }
  return (-std::expm1(-x) - x * std::exp(-x)) / (x * x);
}

}  // namespace detail

SeverityModel::SeverityModel(double nu, double cap) : nu_(nu), cap_(cap) {
  if (!std::isfinite(nu) || nu <= 0.0) {
    throw DomainError("severity rate nu must be positive and finite");
  }
  if (!std::isfinite(cap) || cap <= 0.0) {
    throw DomainError("severity cap L must be positive and finite");
  }
}

SeverityModel SeverityModel::from_exponential_mean(double mean, double cap) {
  if (!std::isfinite(mean) || mean <= 0.0) {
    throw DomainError("exponential mean must be positive and finite");
  }
  return {1.0 / mean, cap};
}

double SeverityModel::atom_mass() const noexcept { return std::exp(-nu_ * cap_); }

double SeverityModel::continuous_mass() const noexcept {
  return -std::expm1(-nu_ * cap_);
}

double mean_severity(const SeverityModel& model) {
  const double cap = model.cap();
  return cap * detail::one_minus_exp_over_x(model.nu() * cap);
}

double second_moment_severity(const SeverityModel& model) {
  const double cap = model.cap();
  return 2.0 * cap * cap * detail::censored_square_kernel(model.nu() * cap);
}

double variance_severity(const SeverityModel& model) {
  const double mean = mean_severity(model);
  return second_moment_severity(model) - mean * mean;
}

// The tail beyond d is again a censored exponential with cap L - d, scaled by
// the survival probability exp(-nu d).
double excess_mean(const SeverityModel& model, double d) {
  check_deductible(model, d);
  const double layer = model.cap() - d;
  return std::exp(-model.nu() * d) * layer *
         detail::one_minus_exp_over_x(model.nu() * layer);
}

double excess_second_moment(const SeverityModel& model, double d) {
  check_deductible(model, d);
  const double layer = model.cap() - d;
  return std::exp(-model.nu() * d) * 2.0 * layer * layer *
         detail::censored_square_kernel(model.nu() * layer);
}

// Y (Y - d)+ = (Y - d)+^2 + d (Y - d)+.
double mixed_moment(const SeverityModel& model, double d) {
  return excess_second_moment(model, d) + d * excess_mean(model, d);
}

double retained_mean(const SeverityModel& model, double d) {
  check_deductible(model, d);
  return d * detail::one_minus_exp_over_x(model.nu() * d);
}

double retained_second_moment(const SeverityModel& model, double d) {
  check_deductible(model, d);
  return 2.0 * d * d * detail::censored_square_kernel(model.nu() * d);
}

}  // namespace covercmp
