#pragma once

#include <cstdint>
#include <functional>

namespace covercmp {

struct RootResult {
  double root = 0.0;
  /// Final bracket; |upper - lower| <= abs_tol on success.
  double lower = 0.0;
  double upper = 0.0;
  std::uintmax_t iterations = 0;
  /// f(root).
  double residual = 0.0;
};

/// Root of f on [lo, hi] to absolute tolerance abs_tol in x.
///
/// Requires a sign change (or an exact zero) at the endpoints; throws NoRoot
/// otherwise, or when max_iterations is exhausted before the bracket closes.
RootResult solve_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double abs_tol, std::uintmax_t max_iterations = 200);

/// Leftmost root of f on [lo, hi].
///
/// Samples f at scan_points equally spaced abscissae, takes the first
/// adjacent pair with a strict sign change (or an exact interior zero), and
/// refines it with solve_bracketed. An exact zero at hi is accepted only when
/// no earlier sign change exists. Throws NoRoot when nothing is found.
RootResult solve_first_crossing(const std::function<double(double)>& f, double lo,
                                double hi, double abs_tol, int scan_points = 200,
                                std::uintmax_t max_iterations = 200);

}  // namespace covercmp
