#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "covercmp/objective.hpp"

namespace covercmp::cli {

/// Malformed scenario document or flag value. Carries the key path and the
/// 1-based source line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& key_path, int line, const std::string& what);

  [[nodiscard]] const std::string& key_path() const noexcept { return key_path_; }
  /// 0 when the value did not come from a file (e.g. a --set override).
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  std::string key_path_;
  int line_;
};

struct ScenarioSource {
  /// Empty means the built-in baseline.
  std::string path;
  /// "section.key=value" overrides applied on top of the document.
  std::vector<std::string> overrides;
  /// Interpret gamma_d and gamma_p as per-event charges (scaled by E[N]).
  bool gamma_per_event = false;
};

struct LoadedScenario {
  Scenario scenario;
  std::vector<std::string> warnings;
};

/// Reads a YAML scenario. Missing keys default to the baseline household.
///
/// Sections and keys:
///   preferences: w0, beta (number or "normalized"), normalize_beta (bool)
///   severity:    nu | mean_full_exponential, L
///   frequency:   lambda | mean, variance, family (poisson | negative_binomial | general)
///   indemnity:   theta_d, gamma_d
///   parametric:  theta_p, gamma_p
///
/// Throws ParseError on syntax errors, unknown keys and non-numeric values,
/// DomainError when the values violate model invariants.
LoadedScenario load_scenario(const ScenarioSource& source);

/// Parses YAML text directly (same rules as load_scenario).
LoadedScenario parse_scenario(const std::string& yaml_text,
                              const std::vector<std::string>& overrides = {},
                              bool gamma_per_event = false);

/// The baseline household as a scenario document.
std::string baseline_scenario_yaml();

}  // namespace covercmp::cli
