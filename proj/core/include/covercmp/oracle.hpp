#pragma once

#include <cstdint>
#include <random>

#include "covercmp/objective.hpp"
#include "covercmp/severity.hpp"

namespace covercmp::oracle {

// Independent numerical checks for the closed forms: quadrature against the
// censored law, Monte Carlo of terminal wealth, and brute-force optimisation.

enum class Integrand {
  Y,                ///< y
  YSquared,         ///< y^2
  Excess,           ///< (y - d)+
  ExcessSquared,    ///< (y - d)+^2
  YTimesExcess,     ///< y (y - d)+
  Retained,         ///< min(y, d)
  RetainedSquared,  ///< min(y, d)^2
};

/// E[h(Y)] as the adaptive Gauss-Kronrod integral of h against nu e^{-nu y}
/// on [0, L), split at d, plus h(L) e^{-nu L}. Relative tolerance 1e-10;
/// throws QuadratureError if the error estimate does not reach it.
double quadrature_moment(const SeverityModel& model, Integrand integrand, double d = 0.0);

// ---------------------------------------------------------------------------
// Monte Carlo.

/// Random stream used by the simulator: std::mt19937_64 (fully specified by
/// the standard) with uniforms built from the top 53 bits. All samplers below
/// use inversion, so draws are identical on every conforming platform.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Seed of simulation block `block` under root seed `seed` (SplitMix64 of
/// seed + golden-ratio increment times (block + 1)).
std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block);

/// Years per independent block; blocks are merged in index order.
inline constexpr std::uint64_t kYearsPerBlock = 1u << 16;

/// Event-count sampler by inversion: Poisson, or negative binomial matched to
/// (mean, variance) when the frequency is overdispersed. Throws DomainError
/// for underdispersed general counts.
class CountSampler {
 public:
  explicit CountSampler(const FrequencyModel& freq);
  /// Count for uniform u in (0, 1).
  [[nodiscard]] std::uint64_t operator()(double u) const;

 private:
  bool poisson_;
  double mean_;
  double p0_;       // Pr[N = 0]
  double nb_size_;  // r
  double nb_q_;     // 1 - p
};

/// min(Z, L) with Z = -ln(1 - u) / nu.
double censored_severity(const SeverityModel& model, double u);

struct SimulationConfig {
  std::uint64_t num_years = 1;
  std::uint64_t seed = 0;
  /// Pair each year with one driven by 1 - u.
  bool antithetic = false;
  /// Worker threads (0 = hardware concurrency). Results do not depend on it.
  unsigned threads = 0;
};

struct Design {
  enum class Kind { None, Indemnity, Parametric };
  Kind kind = Kind::None;
  double parameter = 0.0;

  static Design none() { return {}; }
  static Design indemnity(double d) { return {Kind::Indemnity, d}; }
  static Design parametric(double k) { return {Kind::Parametric, k}; }
};

struct MCEstimate {
  double mean = 0.0;
  double variance = 0.0;
  /// mean - beta variance.
  double mv = 0.0;
  double std_error_mean = 0.0;
  /// Delta-method standard error of mv.
  double std_error_mv = 0.0;
};

/// Simulates W = w0 - premium - S + benefit over cfg.num_years years.
///
/// Without antithetic pairing every year is one sampling unit; with it each
/// pair of years (u, 1 - u) is one unit and standard errors use the pair
/// means. Deterministic for a given (scenario, design, num_years, seed,
/// antithetic), independent of threads.
MCEstimate simulate_wealth(const Scenario& s, const Design& design,
                           const SimulationConfig& cfg);

/// Closed-form MV of a design (general random-sum form, any count law).
double closed_form_mv(const Scenario& s, const Design& design);

// ---------------------------------------------------------------------------
// Brute force.

enum class DesignFamily { Indemnity, Parametric };

/// Argmax of the closed-form MV over `points` equally spaced values on [0, L]
/// (uses the general-count objective, so it covers non-Poisson scenarios).
/// Throws DomainError for points < 1000.
double grid_search_optimum(const Scenario& s, DesignFamily family, int points);

}  // namespace covercmp::oracle
