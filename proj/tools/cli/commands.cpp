#include "commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "covercmp/errors.hpp"
#include "covercmp/oracle.hpp"
#include "scenario_file.hpp"

namespace covercmp::cli {

namespace {

using nlohmann::ordered_json;

struct CommonOptions {
  std::string scenario_path;
  bool baseline = false;
  std::vector<std::string> overrides;
  bool gamma_per_event = false;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("scenario", opts.scenario_path, "Scenario file (YAML)");
  cmd->add_flag("--baseline", opts.baseline, "Use the built-in baseline household");
  cmd->add_option("--set", opts.overrides, "Override a scenario key: section.key=value");
  cmd->add_flag("--gamma-per-event", opts.gamma_per_event,
                "Read gamma_d and gamma_p as per-event charges (scaled by E[N])");
  cmd->add_option("--out", opts.out_path, "Write the report or table to this file");
}

Scenario resolve_scenario(const CommonOptions& opts, std::ostream& err) {
  if (opts.baseline && !opts.scenario_path.empty()) {
    throw ParseError("--baseline", 0, "give either a scenario file or --baseline, not both");
  }
  if (!opts.baseline && opts.scenario_path.empty()) {
    throw ParseError("scenario", 0, "a scenario file or --baseline is required");
  }
  ScenarioSource source;
  source.path = opts.baseline ? std::string{} : opts.scenario_path;
  source.overrides = opts.overrides;
  source.gamma_per_event = opts.gamma_per_event;
  LoadedScenario loaded = load_scenario(source);
  for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
  return loaded.scenario;
}

std::string money(double v) { return format_fixed(v, 2); }
std::string yes_no(bool b) { return b ? "yes" : "no"; }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ParseError("--out", 0, "cannot open '" + path + "' for writing");
  file << content;
}

double parse_double_flag(std::string_view text, const std::string& flag) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ParseError(flag, 0, "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

int parse_int_flag(std::string_view text, const std::string& flag) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(flag, 0, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct Range {
  double min;
  double max;
  int steps;
};

Range parse_range(std::string_view text, const std::string& flag) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) {
    throw ParseError(flag, 0, "expected min:max:steps, got '" + std::string(text) + "'");
  }
  return {parse_double_flag(parts[0], flag), parse_double_flag(parts[1], flag),
          parse_int_flag(parts[2], flag)};
}

SurfaceKind parse_kind(const std::string& text) {
  if (text == "dgamma") return SurfaceKind::PremiumMatchDGamma;
  if (text == "thetagamma") return SurfaceKind::PremiumMatchThetaGamma;
  if (text == "budget") return SurfaceKind::BudgetPGamma;
  throw ParseError("--kind", 0, "expected dgamma, thetagamma or budget, got '" + text + "'");
}

IndifferenceMode parse_mode(const std::string& text) {
  if (text == "optimal") return IndifferenceMode::OptimalBoth;
  if (text == "matched") return IndifferenceMode::PremiumMatched;
  throw ParseError("--mode", 0, "expected optimal or matched, got '" + text + "'");
}

oracle::Design parse_design(const std::string& text, const Scenario& s) {
  if (text == "none") return oracle::Design::none();
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ParseError("--design", 0, "expected none, indemnity:D or parametric:K");
  }
  const std::string kind = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  const bool optimal = value == "opt";
  if (kind == "indemnity") {
    const double d = optimal ? (s.frequency.is_poisson() ? optimal_deductible(s)
                                                         : general_deductible_optimum(s))
                                   .parameter
                             : parse_double_flag(value, "--design");
    return oracle::Design::indemnity(d);
  }
  if (kind == "parametric") {
    const double k = optimal ? (s.frequency.is_poisson() ? optimal_parametric(s)
                                                         : general_parametric_optimum(s))
                                   .parameter
                             : parse_double_flag(value, "--design");
    return oracle::Design::parametric(k);
  }
  throw ParseError("--design", 0, "unknown design '" + kind + "'");
}

void emit(const CommonOptions& opts, std::ostream& out, const std::string& text,
          const ordered_json& report) {
  out << text;
  if (!opts.out_path.empty()) write_file(opts.out_path, report.dump(2) + "\n");
}

std::string frequency_label(const FrequencyModel& f) {
  return fmt::format("{} (mean {}, variance {})", f.is_poisson() ? "poisson" : "general",
                     f.mean(), f.variance());
}

// ---------------------------------------------------------------------------

int cmd_optimize(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  const Scenario s = resolve_scenario(opts, err);
  const bool poisson = s.frequency.is_poisson();
  const ContractOptimum d_opt = poisson ? optimal_deductible(s) : general_deductible_optimum(s);
  const ContractOptimum k_opt = poisson ? optimal_parametric(s) : general_parametric_optimum(s);
  const DualityCheck duality = duality_gap(s);
  const double mv_none = mv_no_insurance(s);

  std::ostringstream text;
  text << "frequency: " << frequency_label(s.frequency) << '\n'
       << "objective: " << (poisson ? "compound-poisson closed form" : "general-count")
       << '\n'
       << "mean_severity: " << money(mean_severity(s.severity)) << '\n'
       << "d_star: " << money(d_opt.parameter) << '\n'
       << "d_star_clamped: " << yes_no(d_opt.clamped) << '\n'
       << "k_star: " << money(k_opt.parameter) << '\n'
       << "k_star_clamped: " << yes_no(k_opt.clamped) << '\n'
       << "indemnity_premium: " << money(d_opt.premium) << '\n'
       << "parametric_premium: " << money(k_opt.premium) << '\n'
       << "mv_indemnity: " << money(d_opt.mv) << '\n'
       << "mv_parametric: " << money(k_opt.mv) << '\n'
       << "mv_no_insurance: " << money(mv_none) << '\n'
       << "duality_gap: " << money(duality.gap) << '\n'
       << "duality_identity_applies: " << yes_no(duality.identity_applies) << '\n';

  ordered_json report{
      {"frequency",
       {{"poisson", poisson}, {"mean", s.frequency.mean()}, {"variance", s.frequency.variance()}}},
      {"mean_severity", mean_severity(s.severity)},
      {"indemnity",
       {{"d_star", d_opt.parameter},
        {"clamped", d_opt.clamped},
        {"premium", d_opt.premium},
        {"mv", d_opt.mv}}},
      {"parametric",
       {{"k_star", k_opt.parameter},
        {"clamped", k_opt.clamped},
        {"premium", k_opt.premium},
        {"mv", k_opt.mv}}},
      {"mv_no_insurance", mv_none},
      {"duality", {{"gap", duality.gap}, {"identity_applies", duality.identity_applies}}},
  };
  emit(opts, out, text.str(), report);
  return kExitOk;
}

int cmd_indifference(const CommonOptions& opts, const std::string& target,
                     const std::string& mode_text, std::ostream& out, std::ostream& err) {
  const IndifferenceMode mode = parse_mode(mode_text);
  if (target != "gamma" && target != "theta") {
    throw ParseError("--target", 0, "expected gamma or theta, got '" + target + "'");
  }
  const Scenario s = resolve_scenario(opts, err);
  const bool gamma = target == "gamma";
  const IndifferenceResult r =
      gamma ? indifference_gamma_d(s, mode) : indifference_theta_d(s, mode);
  const int decimals = gamma ? 2 : 6;

  std::ostringstream text;
  text << "target: " << (gamma ? "gamma_d" : "theta_d") << '\n'
       << "mode: " << mode_text << '\n'
       << "root: " << format_fixed(r.root, decimals) << '\n'
       << "bracket: [" << format_fixed(r.bracket_lo, decimals) << ", "
       << format_fixed(r.bracket_hi, decimals) << "]\n"
       << "iterations: " << r.iterations << '\n'
       << "residual: " << fmt::format("{:.3e}", r.residual) << '\n';
  ordered_json report{{"target", gamma ? "gamma_d" : "theta_d"},
                      {"mode", mode_text},
                      {"root", r.root},
                      {"bracket", {r.bracket_lo, r.bracket_hi}},
                      {"iterations", r.iterations},
                      {"residual", r.residual}};
  emit(opts, out, text.str(), report);
  return kExitOk;
}

int cmd_surface(const CommonOptions& opts, const std::string& kind_text,
                const std::string& grid_text, bool truncate_zero, unsigned threads,
                std::ostream& out, std::ostream& err) {
  const SurfaceKind kind = parse_kind(kind_text);
  const Scenario s = resolve_scenario(opts, err);
  const GridSpec grid = grid_text.empty() ? default_grid(kind, s) : parse_grid(grid_text, kind);
  const std::string csv = surface_csv(surface(s, grid, kind, threads), kind, truncate_zero);
  if (opts.out_path.empty()) {
    out << csv;
  } else {
    write_file(opts.out_path, csv);
  }
  return kExitOk;
}

std::string budget_row(const Scenario& s, double budget) {
  const BudgetChoice p = budget_constrained_parametric(s, budget);
  const BudgetChoice i = budget_constrained_indemnity(s, budget);
  const SurfaceCell cell =
      evaluate_cell(s, SurfaceKind::BudgetPGamma, budget, s.indemnity.fixed_cost);
  const auto param = [](const BudgetChoice& c) {
    return c.choice == Choice::NoInsurance ? std::string{} : money(c.parameter);
  };
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", money(budget),
                     to_string(cell.chosen), param(p), money(p.spent), money(p.mv), param(i),
                     money(i.spent), i.infeasible ? "true" : "false", money(i.mv),
                     money(mv_no_insurance(s)), money(cell.delta_mv));
}

int cmd_budget(const CommonOptions& opts, const std::optional<double>& budget,
               const std::string& sweep_text, std::ostream& out, std::ostream& err) {
  if (budget.has_value() == !sweep_text.empty()) {
    throw ParseError("--budget", 0, "give exactly one of --budget or --sweep");
  }
  const Scenario s = resolve_scenario(opts, err);

  if (budget) {
    const BudgetChoice p = budget_constrained_parametric(s, *budget);
    const BudgetChoice i = budget_constrained_indemnity(s, *budget);
    const SurfaceCell cell =
        evaluate_cell(s, SurfaceKind::BudgetPGamma, *budget, s.indemnity.fixed_cost);
    std::ostringstream text;
    text << "budget: " << money(*budget) << '\n'
         << "indemnity_floor: " << money(s.indemnity.premium_floor()) << '\n'
         << "parametric.choice: " << to_string(p.choice) << '\n'
         << "parametric.k: " << money(p.parameter) << '\n'
         << "parametric.spent: " << money(p.spent) << '\n'
         << "parametric.mv: " << money(p.mv) << '\n'
         << "indemnity.choice: " << to_string(i.choice) << '\n'
         << "indemnity.infeasible: " << yes_no(i.infeasible) << '\n'
         << "indemnity.d: " << money(i.parameter) << '\n'
         << "indemnity.spent: " << money(i.spent) << '\n'
         << "indemnity.mv: " << money(i.mv) << '\n'
         << "no_insurance.mv: " << money(mv_no_insurance(s)) << '\n'
         << "chosen: " << to_string(cell.chosen) << '\n'
         << "delta_mv: " << money(cell.delta_mv) << '\n';
    const auto as_json = [](const BudgetChoice& c) {
      return ordered_json{{"choice", to_string(c.choice)}, {"parameter", c.parameter},
                          {"spent", c.spent},           {"mv", c.mv},
                          {"tie", c.tie},               {"infeasible", c.infeasible}};
    };
    ordered_json report{{"budget", *budget},
                        {"parametric", as_json(p)},
                        {"indemnity", as_json(i)},
                        {"mv_no_insurance", mv_no_insurance(s)},
                        {"chosen", to_string(cell.chosen)},
                        {"delta_mv", cell.delta_mv}};
    emit(opts, out, text.str(), report);
    return kExitOk;
  }

  const Range range = parse_range(sweep_text, "--sweep");
  const BudgetLandmarks marks = budget_landmarks(s, range.min, range.max, range.steps);
  std::ostringstream table;
  table << "budget,chosen,parametric_k,parametric_spent,mv_parametric,indemnity_d,"
           "indemnity_spent,indemnity_infeasible,mv_indemnity,mv_none,delta_mv\n";
  const GridAxis axis{"budget", range.min, range.max, range.steps};
  for (int i = 0; i < range.steps; ++i) table << budget_row(s, axis.value(i));

  out << "# indemnity_floor: " << money(marks.indemnity_floor) << '\n'
      << "# indemnity_optimum_premium: " << money(marks.indemnity_optimum_premium) << '\n'
      << "# parametric_optimum_premium: " << money(marks.parametric_optimum_premium) << '\n'
      << "# indifference_budget: "
      << (marks.indifference_budget ? money(*marks.indifference_budget) : "none") << '\n';
  if (opts.out_path.empty()) {
    out << table.str();
  } else {
    write_file(opts.out_path, table.str());
  }
  return kExitOk;
}

int cmd_simulate(const CommonOptions& opts, const std::string& design_text,
                 std::uint64_t years, std::uint64_t seed, bool antithetic, unsigned threads,
                 std::ostream& out, std::ostream& err) {
  const Scenario s = resolve_scenario(opts, err);
  const oracle::Design design = parse_design(design_text, s);
  const oracle::SimulationConfig cfg{years, seed, antithetic, threads};
  const oracle::MCEstimate est = oracle::simulate_wealth(s, design, cfg);
  const double closed = oracle::closed_form_mv(s, design);
  const double z = est.std_error_mv > 0.0 ? (est.mv - closed) / est.std_error_mv : 0.0;

  std::ostringstream text;
  text << "design: " << design_text << '\n'
       << "years: " << years << '\n'
       << "seed: " << seed << '\n'
       << "antithetic: " << yes_no(antithetic) << '\n'
       << "mean: " << format_fixed(est.mean, 4) << '\n'
       << "variance: " << format_fixed(est.variance, 4) << '\n'
       << "mv: " << format_fixed(est.mv, 4) << '\n'
       << "std_error_mean: " << format_fixed(est.std_error_mean, 4) << '\n'
       << "std_error_mv: " << format_fixed(est.std_error_mv, 4) << '\n'
       << "closed_form_mv: " << format_fixed(closed, 4) << '\n'
       << "z_score: " << format_fixed(z, 4) << '\n';
  ordered_json report{{"design", design_text},
                      {"years", years},
                      {"seed", seed},
                      {"antithetic", antithetic},
                      {"mean", est.mean},
                      {"variance", est.variance},
                      {"mv", est.mv},
                      {"std_error_mean", est.std_error_mean},
                      {"std_error_mv", est.std_error_mv},
                      {"closed_form_mv", closed},
                      {"z_score", z}};
  emit(opts, out, text.str(), report);
  return kExitOk;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  std::string s = fmt::format("{:.{}f}", value, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

GridSpec parse_grid(std::string_view text, SurfaceKind kind) {
  const auto axes = split(text, ',');
  if (axes.size() != 2) {
    throw ParseError("--grid", 0, "expected two comma-separated axes");
  }
  const Range a1 = parse_range(axes[0], "--grid");
  const Range a2 = parse_range(axes[1], "--grid");
  const auto [name1, name2] = surface_axis_names(kind);
  GridSpec grid{{std::string(name1), a1.min, a1.max, a1.steps},
                {std::string(name2), a2.min, a2.max, a2.steps}};
  grid.validate();
  return grid;
}

std::string surface_csv(const std::vector<SurfaceCell>& cells, SurfaceKind kind,
                        bool truncate_zero) {
  const int axis1_decimals = kind == SurfaceKind::PremiumMatchThetaGamma ? 6 : 2;
  std::string csv = "axis1,axis2,delta_mv,capped,indemnity_infeasible,chosen\n";
  csv.reserve(cells.size() * 48);
  for (const SurfaceCell& c : cells) {
    const double delta = truncate_zero && c.delta_mv < 0.0 ? 0.0 : c.delta_mv;
    csv += fmt::format("{},{},{},{},{},{}\n", format_fixed(c.axis1, axis1_decimals),
                       format_fixed(c.axis2, 2), format_fixed(delta, 2),
                       c.capped ? "true" : "false", c.indemnity_infeasible ? "true" : "false",
                       to_string(c.chosen));
  }
  return csv;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compare indemnity and parametric insurance under mean-variance preferences"};
  app.require_subcommand(1);

  CommonOptions opt_optimize, opt_indiff, opt_surface, opt_budget, opt_sim;

  auto* optimize = app.add_subcommand("optimize", "Optimal deductible and per-event payment");
  add_common(optimize, opt_optimize);

  std::string target = "gamma";
  std::string mode = "optimal";
  auto* indiff = app.add_subcommand("indifference", "Indifference fixed cost or loading");
  add_common(indiff, opt_indiff);
  indiff->add_option("--target", target, "gamma or theta")->capture_default_str();
  indiff->add_option("--mode", mode, "optimal or matched")->capture_default_str();

  std::string kind = "dgamma";
  std::string grid;
  bool truncate_zero = false;
  unsigned surface_threads = 0;
  auto* surf = app.add_subcommand("surface", "MV difference surface as CSV");
  add_common(surf, opt_surface);
  surf->add_option("--kind", kind, "dgamma, thetagamma or budget")->capture_default_str();
  surf->add_option("--grid", grid, "a1min:a1max:a1steps,a2min:a2max:a2steps");
  surf->add_flag("--truncate-zero", truncate_zero, "Report max(delta_mv, 0)");
  surf->add_option("--threads", surface_threads, "Worker threads (0 = all cores)");

  std::optional<double> budget;
  std::string sweep;
  auto* bud = app.add_subcommand("budget", "Budget-constrained contract choice");
  add_common(bud, opt_budget);
  bud->add_option("--budget", budget, "Premium budget");
  bud->add_option("--sweep", sweep, "min:max:steps budget sweep (CSV)");

  std::string design = "none";
  std::uint64_t years = 1'000'000;
  std::uint64_t seed = 42;
  bool antithetic = false;
  unsigned sim_threads = 0;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo check of a design's MV");
  add_common(sim, opt_sim);
  sim->add_option("--design", design, "none, indemnity:D, parametric:K (D/K may be 'opt')")
      ->capture_default_str();
  sim->add_option("--years", years, "Simulated years")->capture_default_str();
  sim->add_option("--seed", seed, "Root seed")->capture_default_str();
  sim->add_flag("--antithetic", antithetic, "Antithetic year pairs");
  sim->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(opt_optimize, out, err);
    if (indiff->parsed()) return cmd_indifference(opt_indiff, target, mode, out, err);
    if (surf->parsed()) {
      return cmd_surface(opt_surface, kind, grid, truncate_zero, surface_threads, out, err);
    }
    if (bud->parsed()) return cmd_budget(opt_budget, budget, sweep, out, err);
    if (sim->parsed()) {
      return cmd_simulate(opt_sim, design, years, seed, antithetic, sim_threads, out, err);
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const NoRoot& e) {
    err << "no root: " << e.what() << '\n';
    return kExitNoRoot;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const NonMonotoneFOC& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const QuadratureError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitParse;
}

}  // namespace covercmp::cli
