#include <doctest.h>

#include <cmath>

#include "covercmp/errors.hpp"
#include "covercmp/objective.hpp"
#include "covercmp/oracle.hpp"
#include "generators.hpp"

using namespace covercmp;

namespace {

Scenario with_loadings(double theta_d, double theta_p) {
  Scenario s = baseline_scenario();
  s.indemnity.loading = theta_d;
  s.parametric.loading = theta_p;
  return s;
}

Scenario with_counts(double mean, double variance) {
  Scenario s = baseline_scenario();
  s.frequency = FrequencyModel::general(mean, variance);
  return s;
}

}  // namespace

TEST_CASE("preferences") {
  CHECK_THROWS_AS(Preferences(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(Preferences(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(Preferences(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(Preferences(INFINITY, 1.0), DomainError);
  CHECK(Preferences::normalized(150'000.0).risk_aversion() == 1.0 / 150'000.0);
  CHECK(Preferences::unchecked_for_testing(10.0, 0.0).risk_aversion() == 0.0);
}

TEST_CASE("baseline scenario") {
  const Scenario s = baseline_scenario();
  CHECK(s.prefs.initial_wealth() == 150'000.0);
  CHECK(s.severity.cap() == 500'000.0);
  CHECK(s.severity.nu() == 1.0 / 350'000.0);
  CHECK(s.frequency.is_poisson());
  CHECK(s.frequency.mean() == 1.0 / 50.0);
  CHECK(s.indemnity.loading == 0.3);
  CHECK(s.parametric.loading == 0.3);
  CHECK(s.indemnity.fixed_cost == 0.0);
  CHECK(s.parametric.fixed_cost == 0.0);
}

TEST_CASE("no-insurance objective") {
  const Scenario s = baseline_scenario();
  CHECK(std::round(mv_no_insurance(s)) == 131'023.0);

  Scenario tiny = s;
  tiny.frequency = FrequencyModel::poisson(1e-300);
  CHECK(mv_no_insurance(tiny) == doctest::Approx(150'000.0).epsilon(1e-15));

  Scenario neutral = s;
  neutral.prefs = Preferences::unchecked_for_testing(150'000.0, 0.0);
  CHECK(mv_no_insurance(neutral) ==
        doctest::Approx(150'000.0 - mean_severity(s.severity) / 50.0).epsilon(1e-15));

  // The general formula with variance == mean is the compound-Poisson one.
  const Scenario g = with_counts(s.frequency.mean(), s.frequency.mean());
  CHECK(mv_no_insurance(g) == doctest::Approx(mv_no_insurance(s)).epsilon(1e-15));
}

TEST_CASE("indemnity objective") {
  Scenario s = baseline_scenario();
  s.indemnity.fixed_cost = 700.0;
  CHECK(mv_indemnity(s, 0.0) ==
        doctest::Approx(150'000.0 - indemnity_premium(s.severity, s.frequency, s.indemnity, 0.0))
            .epsilon(1e-15));
  CHECK(mv_indemnity(s, s.severity.cap()) ==
        doctest::Approx(mv_no_insurance(s) - 1.3 * 700.0).epsilon(1e-14));
  CHECK_THROWS_AS(mv_indemnity(s, -1.0), DomainError);
  CHECK_THROWS_AS(mv_indemnity(with_counts(0.02, 0.04), 100.0), DomainError);
}

TEST_CASE("parametric objective") {
  const Scenario s = baseline_scenario();
  CHECK(mv_parametric(s, 0.0) == doctest::Approx(mv_no_insurance(s)).epsilon(1e-15));
  const double ey = mean_severity(s.severity);
  const double lam = s.frequency.mean();
  const double beta = s.prefs.risk_aversion();
  const double expected = 150'000.0 - parametric_premium(s.frequency, s.parametric, ey) -
                          beta * lam * variance_severity(s.severity);
  CHECK(mv_parametric(s, ey) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(mv_parametric(s, -1.0), DomainError);
  CHECK_THROWS_AS(mv_parametric(s, 500'001.0), DomainError);
}

TEST_CASE("poisson optima") {
  const Scenario s = baseline_scenario();
  const ContractOptimum d = optimal_deductible(s);
  const ContractOptimum k = optimal_parametric(s);
  CHECK(std::abs(d.parameter - 22'500.0) < 1e-6);
  CHECK(std::abs(k.parameter - (mean_severity(s.severity) - 22'500.0)) < 1e-6);
  CHECK(std::round(k.parameter) == 243'622.0);
  CHECK_FALSE(d.clamped);
  CHECK_FALSE(k.clamped);
  CHECK(std::round(d.premium) == 6'353.0);
  CHECK(std::round(k.premium) == 6'334.0);
  CHECK(d.mv == mv_indemnity(s, d.parameter));
  CHECK(k.mv == mv_parametric(s, k.parameter));

  CHECK(optimal_deductible(with_loadings(0.0, 0.3)).parameter == 0.0);
  const double beta = s.prefs.risk_aversion();
  const ContractOptimum far = optimal_deductible(with_loadings(2.0 * beta * 500'000.0 * 1.5, 0.3));
  CHECK(far.parameter == 500'000.0);
  CHECK(far.clamped);

  CHECK(optimal_parametric(with_loadings(0.3, 0.0)).parameter == mean_severity(s.severity));
  const ContractOptimum none =
      optimal_parametric(with_loadings(0.3, 2.0 * beta * mean_severity(s.severity) * 1.1));
  CHECK(none.parameter == 0.0);
  CHECK(none.clamped);

  CHECK_THROWS_AS(optimal_deductible(with_counts(0.02, 0.04)), DomainError);
  CHECK_THROWS_AS(optimal_parametric(with_counts(0.02, 0.04)), DomainError);
}

TEST_CASE("duality") {
  const DualityCheck base = duality_gap(baseline_scenario());
  CHECK(std::abs(base.gap) < 1e-9 * mean_severity(baseline_scenario().severity));
  CHECK(base.identity_applies);

  // Unequal loadings shift the sum by (theta_d - theta_p) / (2 beta).
  const DualityCheck unequal = duality_gap(with_loadings(0.3, 0.2));
  CHECK(unequal.gap == doctest::Approx(7'500.0).epsilon(1e-9));
  CHECK_FALSE(unequal.identity_applies);

  const DualityCheck over = duality_gap(with_counts(0.02, 0.04));
  CHECK(std::abs(over.gap) > 1.0);
  CHECK_FALSE(over.identity_applies);
}

TEST_CASE("general-count optima") {
  const Scenario s = baseline_scenario();
  SUBCASE("poisson reduction") {
    const Scenario g = with_counts(s.frequency.mean(), s.frequency.mean());
    CHECK(general_parametric_optimum(g).parameter == optimal_parametric(s).parameter);
    CHECK(std::abs(general_deductible_optimum(g).parameter - 22'500.0) < 1e-6);
    CHECK(general_mv_indemnity(g, 22'500.0) ==
          doctest::Approx(mv_indemnity(s, 22'500.0)).epsilon(1e-13));
    CHECK(general_mv_parametric(g, 243'622.0) ==
          doctest::Approx(mv_parametric(s, 243'622.0)).epsilon(1e-13));
  }
  SUBCASE("doubled variance") {
    const Scenario g = with_counts(0.02, 0.04);
    CHECK(general_parametric_optimum(g).parameter ==
          doctest::Approx(mean_severity(s.severity) - 11'250.0).epsilon(1e-14));
    CHECK(std::round(general_parametric_optimum(g).parameter) == 254'872.0);
    const ContractOptimum d = general_deductible_optimum(g);
    const double step = g.severity.cap() / (100'000 - 1);
    CHECK(std::abs(d.parameter -
                   oracle::grid_search_optimum(g, oracle::DesignFamily::Indemnity, 100'000)) <=
          step);
    CHECK(std::abs(general_parametric_optimum(g).parameter -
                   oracle::grid_search_optimum(g, oracle::DesignFamily::Parametric, 100'000)) <=
          step);
    // The first-order condition holds at the root.
    const double lhs = 0.02 * 0.3;
    const double rhs = 2.0 * g.prefs.risk_aversion() *
                       (0.02 * d.parameter + 0.02 * retained_mean(g.severity, d.parameter));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
  SUBCASE("vanishing mean-to-variance ratio") {
    const Scenario g = with_counts(0.02, 1e6);
    CHECK(general_parametric_optimum(g).parameter ==
          doctest::Approx(mean_severity(s.severity)).epsilon(1e-6));
  }
  SUBCASE("zero loading gives full cover") {
    Scenario g = with_counts(0.02, 0.06);
    g.indemnity.loading = 0.0;
    CHECK(general_deductible_optimum(g).parameter == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("loading beyond the cap clamps to L") {
    Scenario g = with_counts(0.02, 0.03);
    g.indemnity.loading = 50.0;
    const ContractOptimum d = general_deductible_optimum(g);
    CHECK(d.parameter == g.severity.cap());
    CHECK(d.clamped);
  }
  SUBCASE("mildly underdispersed counts stay monotone") {
    const Scenario g = with_counts(0.5, 0.4);
    const ContractOptimum d = general_deductible_optimum(g);
    const double step = g.severity.cap() / (100'000 - 1);
    CHECK(std::abs(d.parameter -
                   oracle::grid_search_optimum(g, oracle::DesignFamily::Indemnity, 100'000)) <=
          step);
  }
}

TEST_CASE("derivatives") {
  const Scenario s = baseline_scenario();
  const double lam = s.frequency.mean();
  const double beta = s.prefs.risk_aversion();
  const double nu = s.severity.nu();
  for (double d : {1'000.0, 10'000.0, 22'500.0, 100'000.0, 400'000.0}) {
    const double formula = lam * std::exp(-nu * d) * (0.3 - 2.0 * beta * d);
    CHECK(mv_indemnity_slope(s, d) == doctest::Approx(formula).epsilon(1e-12).scale(1e-15));
  }
  CHECK(mv_parametric_curvature(s) == doctest::Approx(-2.0 * beta * lam).epsilon(1e-15));
  CHECK(mv_parametric_slope(s, optimal_parametric(s).parameter) ==
        doctest::Approx(0.0).scale(1e-12));
  CHECK(mv_indemnity_curvature(s, 22'500.0) < 0.0);
}

TEST_CASE("properties over random scenarios") {
  testing::Gen gen(303);
  for (int i = 0; i < 100; ++i) {
    const Scenario s = gen.poisson_scenario();
    const double cap = s.severity.cap();
    const ContractOptimum d = optimal_deductible(s);
    const ContractOptimum k = optimal_parametric(s);

    // Optimum dominance.
    for (int j = 0; j < 10; ++j) {
      const double x = gen.uniform(0.0, cap);
      CHECK(mv_indemnity(s, x) <= d.mv + 1e-9 * std::abs(d.mv));
      CHECK(mv_parametric(s, x) <= k.mv + 1e-9 * std::abs(k.mv));
    }

    // Fixed costs move values, not optima.
    Scenario shifted = s;
    const double dg_d = gen.uniform(0.0, 3000.0);
    const double dg_p = gen.uniform(0.0, 3000.0);
    shifted.indemnity.fixed_cost += dg_d;
    shifted.parametric.fixed_cost += dg_p;
    const ContractOptimum d2 = optimal_deductible(shifted);
    const ContractOptimum k2 = optimal_parametric(shifted);
    CHECK(d2.parameter == d.parameter);
    CHECK(k2.parameter == k.parameter);
    CHECK(d2.mv - d.mv == doctest::Approx(-(1.0 + s.indemnity.loading) * dg_d).epsilon(1e-6));
    CHECK(k2.mv - k.mv == doctest::Approx(-(1.0 + s.parametric.loading) * dg_p).epsilon(1e-6));

    // Finite difference of the parametric objective is the closed-form slope.
    const double x = gen.uniform(0.01 * cap, 0.99 * cap);
    const double h = 1e-3 * cap;
    const double fd = (mv_parametric(s, x + h) - mv_parametric(s, x - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(mv_parametric_slope(s, x)).epsilon(1e-5).scale(1e-9));
  }
}
