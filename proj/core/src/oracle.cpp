#include "covercmp/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "covercmp/errors.hpp"
#include "covercmp/pricing.hpp"

namespace covercmp::oracle {

namespace {

constexpr double kQuadratureRelTol = 1e-10;

double integrand_value(Integrand integrand, double y, double d) {
  const double excess = std::max(y - d, 0.0);
  const double retained = std::min(y, d);
  switch (integrand) {
    case Integrand::Y:
      return y;
    case Integrand::YSquared:
      return y * y;
    case Integrand::Excess:
      return excess;
    case Integrand::ExcessSquared:
      return excess * excess;
    case Integrand::YTimesExcess:
      return y * excess;
    case Integrand::Retained:
      return retained;
    case Integrand::RetainedSquared:
      return retained * retained;
  }
  return 0.0;
}

struct BlockSums {
  double years = 0.0;
  double sum_x = 0.0;
  double sum_x2 = 0.0;
  // Per sampling unit (a = unit mean of x, b = unit mean of x^2).
  double units = 0.0;
  double sum_a = 0.0;
  double sum_b = 0.0;
  double sum_aa = 0.0;
  double sum_bb = 0.0;
  double sum_ab = 0.0;

  void add_unit(double x_sum, double x2_sum, int members) {
    years += members;
    sum_x += x_sum;
    sum_x2 += x2_sum;
    const double a = x_sum / members;
    const double b = x2_sum / members;
    units += 1.0;
    sum_a += a;
    sum_b += b;
    sum_aa += a * a;
    sum_bb += b * b;
    sum_ab += a * b;
  }

  void merge(const BlockSums& o) {
    years += o.years;
    sum_x += o.sum_x;
    sum_x2 += o.sum_x2;
    units += o.units;
    sum_a += o.sum_a;
    sum_b += o.sum_b;
    sum_aa += o.sum_aa;
    sum_bb += o.sum_bb;
    sum_ab += o.sum_ab;
  }
};

void check_design(const Scenario& s, const Design& design) {
  const double cap = s.severity.cap();
  if (design.kind != Design::Kind::None &&
      (!std::isfinite(design.parameter) || design.parameter < 0.0 ||
       design.parameter > cap)) {
    throw DomainError("design parameter " + std::to_string(design.parameter) +
                      " outside [0, " + std::to_string(cap) + "]");
  }
}

double design_premium(const Scenario& s, const Design& design) {
  switch (design.kind) {
    case Design::Kind::None:
      return 0.0;
    case Design::Kind::Indemnity:
      return indemnity_premium(s.severity, s.frequency, s.indemnity, design.parameter);
    case Design::Kind::Parametric:
      return parametric_premium(s.frequency, s.parametric, design.parameter);
  }
  return 0.0;
}

/// Net cash flow of one event with loss y: benefit - loss.
double event_flow(const Design& design, double y) {
  switch (design.kind) {
    case Design::Kind::None:
      return -y;
    case Design::Kind::Indemnity:
      return -std::min(y, design.parameter);
    case Design::Kind::Parametric:
      return design.parameter - y;
  }
  return 0.0;
}

}  // namespace

double quadrature_moment(const SeverityModel& model, Integrand integrand, double d) {
  const double cap = model.cap();
  const double nu = model.nu();
  const bool uses_d = integrand != Integrand::Y && integrand != Integrand::YSquared;
  if (uses_d && (!std::isfinite(d) || d < 0.0 || d > cap)) {
    throw DomainError("deductible " + std::to_string(d) + " outside [0, L]");
  }

  const auto weighted = [&](double y) {
    return integrand_value(integrand, y, d) * nu * std::exp(-nu * y);
  };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

  double total = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const auto integrate = [&](double a, double b) {
    if (!(b > a)) return;
    double err = 0.0;
    double norm = 0.0;
    total += Quad::integrate(weighted, a, b, 20, 1e-13, &err, &norm);
    error += err;
    l1 += norm;
  };
  if (uses_d && d > 0.0 && d < cap) {
    integrate(0.0, d);
    integrate(d, cap);
  } else {
    integrate(0.0, cap);
  }

  const double atom = integrand_value(integrand, cap, d) * model.atom_mass();
  const double scale = std::max(std::abs(total + atom), l1);
  if (error > kQuadratureRelTol * scale) {
    throw QuadratureError("quadrature did not converge: error estimate " +
                          std::to_string(error) + " for integral " + std::to_string(total));
  }
  return total + atom;
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (block + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

CountSampler::CountSampler(const FrequencyModel& freq)
    : poisson_(freq.is_poisson() || freq.variance() == freq.mean()),
      mean_(freq.mean()),
      p0_(0.0),
      nb_size_(0.0),
      nb_q_(0.0) {
  if (poisson_) {
    if (mean_ > 500.0) {
      throw DomainError("Poisson inversion sampler supports means up to 500");
    }
    p0_ = std::exp(-mean_);
    return;
  }
  if (freq.variance() < freq.mean()) {
    throw DomainError("simulation of underdispersed counts is not supported");
  }
  const double p = freq.mean() / freq.variance();
  nb_size_ = freq.mean() * freq.mean() / (freq.variance() - freq.mean());
  nb_q_ = 1.0 - p;
  p0_ = std::exp(nb_size_ * std::log(p));
  if (!(p0_ > 0.0)) {
    throw DomainError("negative binomial Pr[N = 0] underflows");
  }
}

std::uint64_t CountSampler::operator()(double u) const {
  std::uint64_t k = 0;
  double pk = p0_;
  double cdf = p0_;
  while (u > cdf && pk > 0.0) {
    if (poisson_) {
      pk *= mean_ / static_cast<double>(k + 1);
    } else {
      pk *= (static_cast<double>(k) + nb_size_) / static_cast<double>(k + 1) * nb_q_;
    }
    ++k;
    cdf += pk;
  }
  return k;
}

double censored_severity(const SeverityModel& model, double u) {
  return std::min(-std::log1p(-u) / model.nu(), model.cap());
}

MCEstimate simulate_wealth(const Scenario& s, const Design& design,
                           const SimulationConfig& cfg) {
  if (cfg.num_years < 1) {
    throw DomainError("simulation needs at least one year");
  }
  check_design(s, design);
  const CountSampler counts(s.frequency);
  const double shift = s.prefs.initial_wealth() - design_premium(s, design);
  const double beta = s.prefs.risk_aversion();

  const std::uint64_t units =
      cfg.antithetic ? (cfg.num_years + 1) / 2 : cfg.num_years;
  const std::uint64_t blocks = (units + kYearsPerBlock - 1) / kYearsPerBlock;
  std::vector<BlockSums> partial(blocks);

  const auto run_block = [&](std::uint64_t b) {
    Stream stream(block_seed(cfg.seed, b));
    BlockSums sums;
    std::vector<double> uniforms;
    const std::uint64_t first = b * kYearsPerBlock;
    const std::uint64_t last = std::min(units, first + kYearsPerBlock);
    for (std::uint64_t unit = first; unit < last; ++unit) {
      const double u_count = stream.uniform();
      if (!cfg.antithetic) {
        const std::uint64_t n = counts(u_count);
        double x = 0.0;
        for (std::uint64_t e = 0; e < n; ++e) {
          x += event_flow(design, censored_severity(s.severity, stream.uniform()));
        }
        sums.add_unit(x, x * x, 1);
        continue;
      }
      const bool paired = 2 * unit + 1 < cfg.num_years;
      const std::uint64_t n_a = counts(u_count);
      const std::uint64_t n_b = paired ? counts(1.0 - u_count) : 0;
      uniforms.resize(std::max(n_a, n_b));
      for (double& u : uniforms) u = stream.uniform();
      double x_a = 0.0;
      for (std::uint64_t e = 0; e < n_a; ++e) {
        x_a += event_flow(design, censored_severity(s.severity, uniforms[e]));
      }
      if (!paired) {
        sums.add_unit(x_a, x_a * x_a, 1);
        continue;
      }
      double x_b = 0.0;
      for (std::uint64_t e = 0; e < n_b; ++e) {
        x_b += event_flow(design, censored_severity(s.severity, 1.0 - uniforms[e]));
      }
      sums.add_unit(x_a + x_b, x_a * x_a + x_b * x_b, 2);
    }
    partial[b] = sums;
  };

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
  if (threads <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::uint64_t b = w; b < blocks; b += threads) run_block(b);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  BlockSums total;
  for (const BlockSums& p : partial) total.merge(p);

  const double n = total.years;
  const double mean_x = total.sum_x / n;
  const double raw_var = std::max(total.sum_x2 / n - mean_x * mean_x, 0.0);
  MCEstimate est;
  est.mean = shift + mean_x;
  est.variance = n > 1.0 ? raw_var * n / (n - 1.0) : 0.0;
  est.mv = est.mean - beta * est.variance;

  const double m = total.units;
  if (m > 1.0) {
    const double mean_a = total.sum_a / m;
    const double mean_b = total.sum_b / m;
    const double var_a = std::max(total.sum_aa / m - mean_a * mean_a, 0.0) * m / (m - 1.0);
    const double var_b = std::max(total.sum_bb / m - mean_b * mean_b, 0.0) * m / (m - 1.0);
    const double cov_ab = (total.sum_ab / m - mean_a * mean_b) * m / (m - 1.0);
    // mv = a - beta (b - a^2) in the shifted variable.
    const double grad_a = 1.0 + 2.0 * beta * mean_a;
    const double grad_b = -beta;
    const double var_mv =
        grad_a * grad_a * var_a + 2.0 * grad_a * grad_b * cov_ab + grad_b * grad_b * var_b;
    est.std_error_mean = std::sqrt(var_a / m);
    est.std_error_mv = std::sqrt(std::max(var_mv, 0.0) / m);
  }
  return est;
}

double closed_form_mv(const Scenario& s, const Design& design) {
  check_design(s, design);
  switch (design.kind) {
    case Design::Kind::None:
      return mv_no_insurance(s);
    case Design::Kind::Indemnity:
      return general_mv_indemnity(s, design.parameter);
    case Design::Kind::Parametric:
      return general_mv_parametric(s, design.parameter);
  }
  return 0.0;
}

double grid_search_optimum(const Scenario& s, DesignFamily family, int points) {
  if (points < 1000) {
    throw DomainError("grid search needs at least 1000 points");
  }
  const double cap = s.severity.cap();
  const auto objective = [&](double x) {
    return family == DesignFamily::Indemnity ? general_mv_indemnity(s, x)
                                             : general_mv_parametric(s, x);
  };
  double best_x = 0.0;
  double best_mv = objective(0.0);
  for (int i = 1; i < points; ++i) {
    const double x = (i == points - 1) ? cap : cap * (static_cast<double>(i) / (points - 1));
    const double mv = objective(x);
    if (mv > best_mv) {
      best_mv = mv;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace covercmp::oracle
