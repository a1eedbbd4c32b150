#include "covercmp/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "covercmp/errors.hpp"
#include "covercmp/roots.hpp"

namespace covercmp {

namespace {

constexpr double kGammaRootTol = 1e-4;
constexpr double kThetaRootTol = 1e-6;
constexpr double kBudgetRootTol = 1e-4;
constexpr int kIndifferenceScanPoints = 400;

void require_poisson(const Scenario& s) {
  if (!s.frequency.is_poisson()) {
    throw DomainError("contract comparison requires Poisson event counts");
  }
}

Scenario with_indemnity(const Scenario& s, double loading, double fixed_cost) {
  Scenario copy = s;
  copy.indemnity = PricingParams{loading, fixed_cost};
  copy.indemnity.validate();
  return copy;
}

IndifferenceResult from_root(const RootResult& r, double lo, double hi) {
  return {r.root, lo, hi, r.iterations, r.residual};
}

Choice pick(double mv_parametric_value, double mv_indemnity_value) {
  if (mv_equal(mv_parametric_value, mv_indemnity_value)) return Choice::Tie;
  return mv_parametric_value > mv_indemnity_value ? Choice::Parametric : Choice::Indemnity;
}

/// Contract with value `mv` against opting out; ties go to NoInsurance.
void settle_against_no_insurance(BudgetChoice& out, Choice contract, double mv,
                                 double mv_none) {
  if (mv > mv_none && !mv_equal(mv, mv_none)) {
    out.choice = contract;
    out.mv = mv;
    return;
  }
  out.tie = mv_equal(mv, mv_none);
  out.choice = Choice::NoInsurance;
  out.parameter = 0.0;
  out.mv = mv_none;
  out.spent = 0.0;
  out.capped = false;
}

}  // namespace

std::string_view to_string(Choice choice) {
  switch (choice) {
    case Choice::Parametric:
      return "parametric";
    case Choice::Indemnity:
      return "indemnity";
    case Choice::NoInsurance:
      return "none";
    case Choice::Tie:
      return "tie";
  }
  return "unknown";
}

bool mv_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

MatchedPayment premium_matched_k(const Scenario& s, double d) {
  require_poisson(s);
  const double premium = indemnity_premium(s.severity, s.frequency, s.indemnity, d);
  const double raw =
      (premium / (1.0 + s.parametric.loading) - s.parametric.fixed_cost) / s.frequency.mean();
  MatchedPayment out;
  if (raw > s.severity.cap()) {
    out.k = s.severity.cap();
    out.capped = true;
  } else if (raw < 0.0) {
    out.k = 0.0;
    out.floored = true;
  } else {
    out.k = raw;
  }
  return out;
}

IndifferenceResult indifference_gamma_d(const Scenario& s, IndifferenceMode mode,
                                        double gamma_max) {
  require_poisson(s);
  const double d_star = optimal_deductible(s).parameter;  // gamma-free
  const double theta_d = s.indemnity.loading;

  const auto mv_gap = [&](double gamma) {
    const Scenario sg = with_indemnity(s, theta_d, gamma);
    const double k = mode == IndifferenceMode::OptimalBoth
                         ? optimal_parametric(sg).parameter
                         : premium_matched_k(sg, d_star).k;
    return mv_parametric(sg, k) - mv_indemnity(sg, d_star);
  };

  if (mode == IndifferenceMode::OptimalBoth) {
    // MV^(d)(d*, gamma) = MV^(d)(d*, 0) - (1 + theta_d) gamma.
    const double at_zero = mv_gap(0.0);
    const double at_max = mv_gap(gamma_max);
    if (at_zero != 0.0 && at_max != 0.0 && std::signbit(at_zero) == std::signbit(at_max)) {
      throw NoRoot("no indifference fixed cost in [0, " + std::to_string(gamma_max) + "]");
    }
    const double root = -at_zero / (1.0 + theta_d);
    return {root, 0.0, gamma_max, 0, mv_gap(root)};
  }
  const RootResult r = solve_first_crossing(mv_gap, 0.0, gamma_max, kGammaRootTol,
                                            kIndifferenceScanPoints);
  return from_root(r, 0.0, gamma_max);
}

IndifferenceResult indifference_theta_d(const Scenario& s, IndifferenceMode mode) {
  require_poisson(s);
  const double lo = s.parametric.loading + 1e-6;
  const double hi = 2.0 * s.prefs.risk_aversion() * s.severity.cap();
  if (!(hi > lo)) {
    throw NoRoot("no loading above theta_p keeps d* <= L");
  }
  const double gamma_d = s.indemnity.fixed_cost;
  const double mv_optimal_parametric = optimal_parametric(s).mv;

  const auto mv_gap = [&](double theta) {
    const Scenario st = with_indemnity(s, theta, gamma_d);
    const double d = optimal_deductible(st).parameter;
    const double mv_p = mode == IndifferenceMode::OptimalBoth
                            ? mv_optimal_parametric
                            : mv_parametric(st, premium_matched_k(st, d).k);
    return mv_p - mv_indemnity(st, d);
  };
  const RootResult r =
      solve_first_crossing(mv_gap, lo, hi, kThetaRootTol, kIndifferenceScanPoints);
  return from_root(r, lo, hi);
}

BudgetChoice budget_constrained_parametric(const Scenario& s, double budget) {
  require_poisson(s);
  if (!std::isfinite(budget) || budget < 0.0) {
    throw DomainError("budget must be non-negative");
  }
  const double mv_none = mv_no_insurance(s);
  BudgetChoice out;
  if (budget < s.parametric.premium_floor()) {
    out.mv = mv_none;
    return out;
  }
  // MV^(p) is concave with its maximum at k*, so the best affordable k is the
  // largest one not beyond k*.
  const double cap = s.severity.cap();
  const double affordable = invert_parametric_premium(s.frequency, s.parametric, budget);
  const double k = std::min({optimal_parametric(s).parameter, affordable, cap});
  out.parameter = k;
  out.spent = parametric_premium(s.frequency, s.parametric, k);
  out.capped = affordable >= cap && k == cap;
  settle_against_no_insurance(out, Choice::Parametric, mv_parametric(s, k), mv_none);
  return out;
}

BudgetChoice budget_constrained_indemnity(const Scenario& s, double budget) {
  require_poisson(s);
  if (!std::isfinite(budget) || budget < 0.0) {
    throw DomainError("budget must be non-negative");
  }
  const double mv_none = mv_no_insurance(s);
  BudgetChoice out;
  if (budget < s.indemnity.premium_floor()) {
    out.infeasible = true;
    out.mv = mv_none;
    return out;
  }
  // Premium falls with d and MV^(d) rises up to d*, so the best affordable
  // deductible is the larger of d* and the smallest affordable one.
  const double smallest_affordable =
      invert_indemnity_premium(s.severity, s.frequency, s.indemnity, budget).parameter;
  const double d = std::clamp(std::max(optimal_deductible(s).parameter, smallest_affordable),
                              0.0, s.severity.cap());
  out.parameter = d;
  out.spent = indemnity_premium(s.severity, s.frequency, s.indemnity, d);
  settle_against_no_insurance(out, Choice::Indemnity, mv_indemnity(s, d), mv_none);
  return out;
}

double delta_mv_budget(const Scenario& s, double budget) {
  return budget_constrained_parametric(s, budget).mv -
         budget_constrained_indemnity(s, budget).mv;
}

BudgetLandmarks budget_landmarks(const Scenario& s, double lo, double hi, int steps) {
  require_poisson(s);
  if (!(hi > lo) || steps < 2) {
    throw DomainError("budget sweep needs lo < hi and at least 2 steps");
  }
  BudgetLandmarks out;
  out.indemnity_floor = s.indemnity.premium_floor();
  out.indemnity_optimum_premium = optimal_deductible(s).premium;
  out.parametric_optimum_premium = optimal_parametric(s).premium;

  const auto delta = [&](double b) { return delta_mv_budget(s, b); };
  const GridAxis axis{"budget", lo, hi, steps};
  double prev_budget = axis.value(0);
  double prev_delta = delta(prev_budget);
  for (int i = 1; i < steps; ++i) {
    const double b = axis.value(i);
    const double db = delta(b);
    if (prev_delta > 0.0 && db <= 0.0) {
      out.indifference_budget = solve_bracketed(delta, prev_budget, b, kBudgetRootTol).root;
      break;
    }
    prev_budget = b;
    prev_delta = db;
  }
  return out;
}

double GridAxis::value(int i) const {
  if (i == steps - 1) return max;
  return min + i * ((max - min) / (steps - 1));
}

void GridSpec::validate() const {
  for (const GridAxis* axis : {&axis1, &axis2}) {
    if (!std::isfinite(axis->min) || !std::isfinite(axis->max) || !(axis->min < axis->max)) {
      throw DomainError("grid axis '" + axis->name + "' needs finite min < max");
    }
    if (axis->steps < 2) {
      throw DomainError("grid axis '" + axis->name + "' needs at least 2 steps");
    }
  }
}

std::pair<std::string_view, std::string_view> surface_axis_names(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::PremiumMatchDGamma:
      return {"d", "gamma_d"};
    case SurfaceKind::PremiumMatchThetaGamma:
      return {"theta_d", "gamma_d"};
    case SurfaceKind::BudgetPGamma:
      return {"budget", "gamma_d"};
  }
  return {"", ""};
}

GridSpec default_grid(SurfaceKind kind, const Scenario& s) {
  const auto [name1, name2] = surface_axis_names(kind);
  switch (kind) {
    case SurfaceKind::PremiumMatchDGamma:
      return {{std::string(name1), 0.0, s.severity.cap(), 201},
              {std::string(name2), 0.0, 15'000.0, 201}};
    case SurfaceKind::PremiumMatchThetaGamma:
      return {{std::string(name1), 0.2, 2.0, 201}, {std::string(name2), 0.0, 15'000.0, 201}};
    case SurfaceKind::BudgetPGamma:
      return {{std::string(name1), 0.0, 12'000.0, 201},
              {std::string(name2), 0.0, 5'000.0, 201}};
  }
  throw DomainError("unknown surface kind");
}

SurfaceCell evaluate_cell(const Scenario& s, SurfaceKind kind, double axis1, double axis2) {
  require_poisson(s);
  SurfaceCell cell;
  cell.axis1 = axis1;
  cell.axis2 = axis2;
  switch (kind) {
    case SurfaceKind::PremiumMatchDGamma:
    case SurfaceKind::PremiumMatchThetaGamma: {
      const bool by_deductible = kind == SurfaceKind::PremiumMatchDGamma;
      const Scenario sc =
          with_indemnity(s, by_deductible ? s.indemnity.loading : axis1, axis2);
      const double d = by_deductible ? axis1 : optimal_deductible(sc).parameter;
      const MatchedPayment matched = premium_matched_k(sc, d);
      const double mv_p = mv_parametric(sc, matched.k);
      const double mv_d = mv_indemnity(sc, d);
      cell.delta_mv = mv_p - mv_d;
      cell.capped = matched.capped;
      cell.chosen = pick(mv_p, mv_d);
      break;
    }
    case SurfaceKind::BudgetPGamma: {
      const Scenario sc = with_indemnity(s, s.indemnity.loading, axis2);
      const BudgetChoice p = budget_constrained_parametric(sc, axis1);
      const BudgetChoice i = budget_constrained_indemnity(sc, axis1);
      cell.delta_mv = p.mv - i.mv;
      cell.capped = p.capped;
      cell.indemnity_infeasible = i.infeasible;
      if (mv_equal(p.mv, i.mv)) {
        const bool both_out =
            p.choice == Choice::NoInsurance && i.choice == Choice::NoInsurance;
        cell.chosen = both_out ? Choice::NoInsurance : Choice::Tie;
      } else {
        cell.chosen = p.mv > i.mv ? p.choice : i.choice;
      }
      break;
    }
  }
  return cell;
}

std::vector<SurfaceCell> surface(const Scenario& s, const GridSpec& grid, SurfaceKind kind,
                                 unsigned threads) {
  require_poisson(s);
  grid.validate();
  const auto [name1, name2] = surface_axis_names(kind);
  if (grid.axis1.name != name1 || grid.axis2.name != name2) {
    throw DomainError("surface expects axes (" + std::string(name1) + ", " +
                      std::string(name2) + "), got (" + grid.axis1.name + ", " +
                      grid.axis2.name + ")");
  }

  const int n1 = grid.axis1.steps;
  const int n2 = grid.axis2.steps;
  const std::size_t total = static_cast<std::size_t>(n1) * n2;
  std::vector<SurfaceCell> cells(total);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));

  std::vector<std::exception_ptr> errors(threads);
  const auto work = [&](unsigned worker) {
    try {
      for (std::size_t idx = worker; idx < total; idx += threads) {
        const int i = static_cast<int>(idx / n2);
        const int j = static_cast<int>(idx % n2);
        cells[idx] = evaluate_cell(s, kind, grid.axis1.value(i), grid.axis2.value(j));
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return cells;
}

}  // namespace covercmp
