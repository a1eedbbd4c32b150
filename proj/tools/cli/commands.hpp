#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "covercmp/comparison.hpp"

namespace covercmp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitInvariant = 3,
  kExitNoRoot = 4,
};

/// Entry point shared by the binary and the tests. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses "a1min:a1max:a1steps,a2min:a2max:a2steps" onto the kind's axis names.
GridSpec parse_grid(std::string_view text, SurfaceKind kind);

/// Surface table with header `axis1,axis2,delta_mv,capped,indemnity_infeasible,chosen`.
/// Currency is printed with 2 decimals, loadings with 6; truncate_zero
/// replaces negative delta_mv by 0.
std::string surface_csv(const std::vector<SurfaceCell>& cells, SurfaceKind kind,
                        bool truncate_zero);

/// Fixed-point text with `decimals` digits; never prints a negative zero.
std::string format_fixed(double value, int decimals);

}  // namespace covercmp::cli
