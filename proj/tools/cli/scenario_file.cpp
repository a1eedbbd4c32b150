#include "scenario_file.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "covercmp/errors.hpp"

namespace covercmp::cli {

namespace {

std::string describe(const std::string& key_path, int line, const std::string& what) {
  std::ostringstream os;
  os << key_path;
  if (line > 0) os << " (line " << line << ")";
  os << ": " << what;
  return os.str();
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"preferences", {"w0", "beta", "normalize_beta"}},
      {"severity", {"nu", "mean_full_exponential", "L"}},
      {"frequency", {"lambda", "mean", "variance", "family"}},
      {"indemnity", {"theta_d", "gamma_d"}},
      {"parametric", {"theta_p", "gamma_p"}},
  };
  return keys;
}

int line_of(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

std::optional<double> parse_plain_number(const std::string& text) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && end[-1] == ' ') --end;
  if (begin < end && *begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

/// Decimal number, or a ratio "a/b" such as 1/350000.
std::optional<double> parse_number(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_plain_number(text);
  const auto num = parse_plain_number(text.substr(0, slash));
  const auto den = parse_plain_number(text.substr(slash + 1));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

class Document {
 public:
  explicit Document(YAML::Node root) : root_(std::move(root)) {}

  void check_schema() const {
    if (!root_ || root_.IsNull()) return;
    if (!root_.IsMap()) {
      throw ParseError("<root>", line_of(root_), "expected a mapping of sections");
    }
    for (const auto& section : root_) {
      const std::string name = section.first.as<std::string>();
      const auto it = schema().find(name);
      if (it == schema().end()) {
        throw ParseError(name, line_of(section.first), "unknown section");
      }
      if (section.second.IsNull()) continue;
      if (!section.second.IsMap()) {
        throw ParseError(name, line_of(section.second), "expected a mapping of keys");
      }
      for (const auto& entry : section.second) {
        const std::string key = entry.first.as<std::string>();
        if (!it->second.contains(key)) {
          throw ParseError(name + "." + key, line_of(entry.first), "unknown key");
        }
        if (!entry.second.IsScalar()) {
          throw ParseError(name + "." + key, line_of(entry.second), "expected a scalar value");
        }
      }
    }
  }

  [[nodiscard]] YAML::Node find(const std::string& section, const std::string& key) const {
    if (!root_ || !root_.IsMap()) return {};
    const YAML::Node sec = root_[section];
    if (!sec || !sec.IsMap()) return {};
    return sec[key];
  }

  [[nodiscard]] bool has(const std::string& section, const std::string& key) const {
    const YAML::Node node = find(section, key);
    return node && !node.IsNull();
  }

  [[nodiscard]] std::string text(const std::string& section, const std::string& key) const {
    return find(section, key).Scalar();
  }

  [[nodiscard]] double number(const std::string& section, const std::string& key,
                              double fallback) const {
    const YAML::Node node = find(section, key);
    if (!node || node.IsNull()) return fallback;
    const auto value = parse_number(node.Scalar());
    if (!value || !std::isfinite(*value)) {
      throw ParseError(section + "." + key, line_of(node),
                       "expected a number, got '" + node.Scalar() + "'");
    }
    return *value;
  }

  [[nodiscard]] bool boolean(const std::string& section, const std::string& key,
                             bool fallback) const {
    const YAML::Node node = find(section, key);
    if (!node || node.IsNull()) return fallback;
    const std::string& s = node.Scalar();
    if (s == "true" || s == "yes") return true;
    if (s == "false" || s == "no") return false;
    throw ParseError(section + "." + key, line_of(node), "expected true or false");
  }

  [[nodiscard]] int line(const std::string& section, const std::string& key) const {
    const YAML::Node node = find(section, key);
    return node ? line_of(node) : 0;
  }

  void set(const std::string& section, const std::string& key, const std::string& value) {
    if (!root_ || !root_.IsMap()) root_ = YAML::Node(YAML::NodeType::Map);
    if (!root_[section] || !root_[section].IsMap()) {
      root_[section] = YAML::Node(YAML::NodeType::Map);
    }
    root_[section][key] = value;
  }

 private:
  YAML::Node root_;
};

void apply_override(Document& doc, const std::string& override_text) {
  const auto eq = override_text.find('=');
  const auto dot = override_text.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ParseError("--set", 0, "expected section.key=value, got '" + override_text + "'");
  }
  const std::string section = override_text.substr(0, dot);
  const std::string key = override_text.substr(dot + 1, eq - dot - 1);
  const auto it = schema().find(section);
  if (it == schema().end()) throw ParseError(section, 0, "unknown section");
  if (!it->second.contains(key)) throw ParseError(section + "." + key, 0, "unknown key");
  doc.set(section, key, override_text.substr(eq + 1));
}

Scenario interpret(const Document& doc, bool gamma_per_event,
                   std::vector<std::string>& warnings) {
  const Scenario base = baseline_scenario();

  const double w0 = doc.number("preferences", "w0", base.prefs.initial_wealth());
  double beta = 1.0 / w0;
  const bool normalize_flag = doc.boolean("preferences", "normalize_beta", false);
  if (doc.has("preferences", "beta")) {
    if (doc.text("preferences", "beta") != "normalized") {
      beta = doc.number("preferences", "beta", beta);
      if (normalize_flag) {
        warnings.push_back(
            "preferences: explicit beta overrides normalize_beta; using beta = " +
            doc.text("preferences", "beta"));
      }
    }
  }
  const Preferences prefs(w0, beta);

  const double cap = doc.number("severity", "L", base.severity.cap());
  const bool has_nu = doc.has("severity", "nu");
  const bool has_mean = doc.has("severity", "mean_full_exponential");
  if (has_nu && has_mean) {
    throw ParseError("severity.mean_full_exponential",
                     doc.line("severity", "mean_full_exponential"),
                     "give either nu or mean_full_exponential, not both");
  }
  const SeverityModel severity =
      has_mean ? SeverityModel::from_exponential_mean(
                     doc.number("severity", "mean_full_exponential", 0.0), cap)
               : SeverityModel(doc.number("severity", "nu", base.severity.nu()), cap);

  const bool has_lambda = doc.has("frequency", "lambda");
  const bool has_moments = doc.has("frequency", "mean") || doc.has("frequency", "variance");
  if (has_lambda && has_moments) {
    throw ParseError("frequency.lambda", doc.line("frequency", "lambda"),
                     "give either lambda or mean/variance, not both");
  }
  std::optional<FrequencyModel> frequency;
  if (!has_moments) {
    frequency = FrequencyModel::poisson(
        doc.number("frequency", "lambda", base.frequency.mean()));
    if (doc.has("frequency", "family") && doc.text("frequency", "family") != "poisson") {
      throw ParseError("frequency.family", doc.line("frequency", "family"),
                       "lambda implies family poisson");
    }
  } else {
    const double mean = doc.number("frequency", "mean", base.frequency.mean());
    const double variance = doc.number("frequency", "variance", mean);
    std::string family = doc.has("frequency", "family") ? doc.text("frequency", "family")
                         : variance == mean                ? "poisson"
                         : variance > mean                 ? "negative_binomial"
                                                           : "general";
    const int family_line = doc.line("frequency", "family");
    if (family == "poisson") {
      if (variance != mean) {
        throw ParseError("frequency.variance", doc.line("frequency", "variance"),
                         "poisson family requires variance equal to mean");
      }
      frequency = FrequencyModel::poisson(mean);
    } else if (family == "negative_binomial") {
      if (!(variance > mean)) {
        throw ParseError("frequency.variance", doc.line("frequency", "variance"),
                         "negative_binomial family requires variance above mean");
      }
      frequency = FrequencyModel::general(mean, variance);
    } else if (family == "general") {
      frequency = FrequencyModel::general(mean, variance);
    } else {
      throw ParseError("frequency.family", family_line,
                       "expected poisson, negative_binomial or general, got '" + family + "'");
    }
  }

  PricingParams indemnity{doc.number("indemnity", "theta_d", base.indemnity.loading),
                          doc.number("indemnity", "gamma_d", base.indemnity.fixed_cost)};
  PricingParams parametric{doc.number("parametric", "theta_p", base.parametric.loading),
                           doc.number("parametric", "gamma_p", base.parametric.fixed_cost)};
  if (gamma_per_event) {
    indemnity.fixed_cost *= frequency->mean();
    parametric.fixed_cost *= frequency->mean();
  }

  Scenario s{prefs, severity, *frequency, indemnity, parametric};
  s.validate();
  return s;
}

LoadedScenario load_document(YAML::Node root, const std::vector<std::string>& overrides,
                             bool gamma_per_event) {
  Document doc(std::move(root));
  doc.check_schema();
  for (const auto& o : overrides) apply_override(doc, o);
  std::vector<std::string> warnings;
  Scenario s = interpret(doc, gamma_per_event, warnings);
  return {s, std::move(warnings)};
}

}  // namespace

ParseError::ParseError(const std::string& key_path, int line, const std::string& what)
    : std::runtime_error(describe(key_path, line, what)), key_path_(key_path), line_(line) {}

LoadedScenario parse_scenario(const std::string& yaml_text,
                              const std::vector<std::string>& overrides,
                              bool gamma_per_event) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ParseError("<document>", e.mark.line + 1, e.msg);
  }
  return load_document(root, overrides, gamma_per_event);
}

LoadedScenario load_scenario(const ScenarioSource& source) {
  if (source.path.empty()) {
    return parse_scenario("", source.overrides, source.gamma_per_event);
  }
  std::ifstream in(source.path);
  if (!in) {
    throw ParseError(source.path, 0, "cannot open scenario file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), source.overrides, source.gamma_per_event);
}

std::string baseline_scenario_yaml() {
  return R"(# Household with a $500,000 house in a 1-in-50-year flood plain.
preferences:
  w0: 150000
  beta: normalized
severity:
  nu: 1/350000
  L: 500000
frequency:
  lambda: 1/50
indemnity:
  theta_d: 0.3
  gamma_d: 0
parametric:
  theta_p: 0.3
  gamma_p: 0
)";
}

}  // namespace covercmp::cli
