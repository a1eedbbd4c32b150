#include "covercmp/roots.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <string>

#include "covercmp/errors.hpp"

namespace covercmp {

namespace {

RootResult exact(double x) { return {x, x, x, 0, 0.0}; }

}  // namespace

RootResult solve_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double abs_tol, std::uintmax_t max_iterations) {
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) {
    throw NoRoot("objective not finite at bracket endpoints");
  }
  if (f_lo == 0.0) return exact(lo);
  if (f_hi == 0.0) return exact(hi);
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw NoRoot("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                 "]");
  }

  std::uintmax_t iterations = max_iterations;
  const auto close_enough = [abs_tol](double a, double b) { return std::abs(b - a) <= abs_tol; };
  const auto [a, b] =
      boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, close_enough, iterations);
  if (std::abs(b - a) > abs_tol) {
    throw NoRoot("root bracket did not close within " + std::to_string(max_iterations) +
                 " iterations");
  }
  RootResult result;
  result.lower = a;
  result.upper = b;
  result.root = 0.5 * (a + b);
  result.iterations = iterations;
  result.residual = f(result.root);
  return result;
}

RootResult solve_first_crossing(const std::function<double(double)>& f, double lo,
                                double hi, double abs_tol, int scan_points,
                                std::uintmax_t max_iterations) {
  if (scan_points < 2) scan_points = 2;
  const double step = (hi - lo) / (scan_points - 1);
  double x_prev = lo;
  double f_prev = f(lo);
  if (f_prev == 0.0) return exact(lo);
  for (int i = 1; i < scan_points; ++i) {
    const double x = (i == scan_points - 1) ? hi : lo + i * step;
    const double fx = f(x);
    if (fx == 0.0) {
      if (i < scan_points - 1) return exact(x);
      break;
    }
    if (std::signbit(fx) != std::signbit(f_prev)) {
      return solve_bracketed(f, x_prev, x, abs_tol, max_iterations);
    }
    x_prev = x;
    f_prev = fx;
  }
  if (f(hi) == 0.0) return exact(hi);
  throw NoRoot("no sign change found scanning [" + std::to_string(lo) + ", " +
               std::to_string(hi) + "]");
}

}  // namespace covercmp
