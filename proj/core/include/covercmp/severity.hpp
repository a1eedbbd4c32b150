#pragma once

namespace covercmp {

/// Per-event loss Y = min(Z, L) with Z ~ Exp(nu).
///
/// The law has density nu * exp(-nu * y) on [0, L) and an atom of mass
/// exp(-nu * L) at the cap L (total write-off). All amounts are in dollars.
class SeverityModel {
 public:
  /// Throws DomainError unless nu > 0 and cap > 0, both finite.
  SeverityModel(double nu, double cap);

  /// Parameterize by the mean 1/nu of the uncensored exponential.
  static SeverityModel from_exponential_mean(double mean, double cap);

  [[nodiscard]] double nu() const noexcept { return nu_; }
  [[nodiscard]] double cap() const noexcept { return cap_; }

  /// Pr[Y = L].
  [[nodiscard]] double atom_mass() const noexcept;
  /// Pr[Y < L], the mass of the continuous part.
  [[nodiscard]] double continuous_mass() const noexcept;

 private:
  double nu_;
  double cap_;
};

// Moments of the censored law. Functions taking a deductible d throw
// DomainError unless 0 <= d <= cap.

/// E[Y].
double mean_severity(const SeverityModel& model);
/// E[Y^2].
double second_moment_severity(const SeverityModel& model);
/// Var(Y) = E[Y^2] - E[Y]^2.
double variance_severity(const SeverityModel& model);

/// E[(Y - d)+], the expected indemnity per event.
double excess_mean(const SeverityModel& model, double d);
/// E[(Y - d)+^2].
double excess_second_moment(const SeverityModel& model, double d);
/// E[Y (Y - d)+].
double mixed_moment(const SeverityModel& model, double d);
/// E[min(Y, d)], the expected retained loss per event.
double retained_mean(const SeverityModel& model, double d);
/// G(d) = E[min(Y, d)^2].
double retained_second_moment(const SeverityModel& model, double d);

namespace detail {

/// (1 - exp(-x)) / x, continuous at x = 0.
double one_minus_exp_over_x(double x);
/// (1 - exp(-x) (1 + x)) / x^2, continuous at x = 0.
double censored_square_kernel(double x);

}  // namespace detail

}  // namespace covercmp
