#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covercmp/objective.hpp"

namespace covercmp {

// Every operation here assumes Poisson counts and throws DomainError otherwise.

enum class Choice { Parametric, Indemnity, NoInsurance, Tie };

std::string_view to_string(Choice choice);

/// Two MV values closer than 1e-9 relative are treated as equal.
bool mv_equal(double a, double b);

struct MatchedPayment {
  double k = 0.0;
  /// The matching payment exceeded L and was capped there.
  bool capped = false;
  /// The matching payment was negative (gamma_p too large) and was floored at 0.
  bool floored = false;
};

/// Payment k whose parametric premium equals the indemnity premium at d,
/// capped at L.
MatchedPayment premium_matched_k(const Scenario& s, double d);

enum class IndifferenceMode {
  /// Parametric at its unconstrained optimum k*.
  OptimalBoth,
  /// Parametric premium-matched to the optimal indemnity contract.
  PremiumMatched,
};

struct IndifferenceResult {
  double root = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::uintmax_t iterations = 0;
  /// MV^(p) - MV^(d) at the root.
  double residual = 0.0;
};

/// Default search range for the indemnity fixed cost.
inline constexpr double kGammaSearchMax = 50'000.0;

/// Indemnity fixed cost gamma_d at which MV^(p) = MV^(d)(d*).
///
/// All other scenario parameters are kept; the scenario's gamma_d is ignored.
/// OptimalBoth uses the closed form (MV^(d) is affine in gamma_d). Throws
/// NoRoot if the root is not in [0, gamma_max].
IndifferenceResult indifference_gamma_d(const Scenario& s, IndifferenceMode mode,
                                        double gamma_max = kGammaSearchMax);

/// Indemnity loading theta_d at which MV^(p) = MV^(d)(d*(theta_d)).
///
/// Searched over (theta_p, 2 beta L], the loadings with d* <= L. The
/// scenario's theta_d is ignored. Throws NoRoot if no crossing exists.
IndifferenceResult indifference_theta_d(const Scenario& s, IndifferenceMode mode);

struct BudgetChoice {
  /// Parametric/Indemnity, or NoInsurance when opting out is at least as good.
  Choice choice = Choice::NoInsurance;
  /// k or d of the purchased contract; unset for NoInsurance.
  double parameter = 0.0;
  double mv = 0.0;
  /// Premium actually paid; may be below the budget.
  double spent = 0.0;
  /// The best contract tied with opting out and NoInsurance was reported.
  bool tie = false;
  /// Indemnity only: budget below (1 + theta_d) gamma_d.
  bool infeasible = false;
  /// Parametric only: the payment was held at L by the cap.
  bool capped = false;
};

/// Best of no insurance and any parametric contract with premium <= budget.
BudgetChoice budget_constrained_parametric(const Scenario& s, double budget);
/// Best of no insurance and any indemnity contract with premium <= budget.
BudgetChoice budget_constrained_indemnity(const Scenario& s, double budget);

/// MV^(p)_bud(budget) - MV^(d)_bud(budget).
double delta_mv_budget(const Scenario& s, double budget);

/// Budget summary for a fixed scenario.
struct BudgetLandmarks {
  /// (1 + theta_d) gamma_d.
  double indemnity_floor = 0.0;
  /// Premium of the unconstrained optimal indemnity contract.
  double indemnity_optimum_premium = 0.0;
  /// Premium of the unconstrained optimal parametric contract.
  double parametric_optimum_premium = 0.0;
  /// Budget at which parametric stops beating indemnity, if it does on the range.
  std::optional<double> indifference_budget;
};

/// Locates the first budget in [lo, hi] where delta_mv_budget turns from
/// positive to non-positive, scanning `steps` points and refining by bisection.
BudgetLandmarks budget_landmarks(const Scenario& s, double lo, double hi, int steps);

// ---------------------------------------------------------------------------
// Two-dimensional surfaces.

enum class SurfaceKind {
  /// Axis 1: deductible d; axis 2: gamma_d. Parametric premium-matched.
  PremiumMatchDGamma,
  /// Axis 1: theta_d; axis 2: gamma_d. Indemnity at d*(theta_d), parametric premium-matched.
  PremiumMatchThetaGamma,
  /// Axis 1: budget; axis 2: gamma_d. Budget-constrained choice.
  BudgetPGamma,
};

struct GridAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int steps = 2;

  /// min + i (max - min) / (steps - 1); exact at both ends.
  [[nodiscard]] double value(int i) const;
};

struct GridSpec {
  GridAxis axis1;
  GridAxis axis2;

  /// Throws DomainError unless min < max and steps >= 2 on both axes.
  void validate() const;
};

/// Axis names a surface kind expects, e.g. {"d", "gamma_d"}.
std::pair<std::string_view, std::string_view> surface_axis_names(SurfaceKind kind);

/// 201 x 201 grids: d in [0, L] x gamma_d in [0, 15000]; theta_d in
/// [0.2, 2.0] x gamma_d in [0, 15000]; budget in [0, 12000] x gamma_d in [0, 5000].
GridSpec default_grid(SurfaceKind kind, const Scenario& s);

struct SurfaceCell {
  double axis1 = 0.0;
  double axis2 = 0.0;
  /// MV difference, parametric minus indemnity; never truncated.
  double delta_mv = 0.0;
  bool capped = false;
  bool indemnity_infeasible = false;
  Choice chosen = Choice::Tie;
};

/// One surface cell; surface() calls exactly this for every grid point.
SurfaceCell evaluate_cell(const Scenario& s, SurfaceKind kind, double axis1, double axis2);

/// Row-major cells (axis1 outer, axis2 inner). Throws DomainError if the
/// grid's axis names do not match the kind. Cells are evaluated on up to
/// `threads` workers (0 = hardware concurrency); output does not depend on it.
std::vector<SurfaceCell> surface(const Scenario& s, const GridSpec& grid, SurfaceKind kind,
                                 unsigned threads = 0);

}  // namespace covercmp
