#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

using namespace covercmp;
using namespace covercmp::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "covercmp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string value_of(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + ": ");
  if (pos == std::string::npos) return "";
  const auto start = pos + key.size() + 2;
  return text.substr(start, text.find('\n', start) - start);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& row) {
  std::vector<std::string> out;
  std::istringstream in(row);
  for (std::string field; std::getline(in, field, ',');) out.push_back(field);
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("covercmp_cli_test_" + name);
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_fixed(1234.5678, 2) == "1234.57");
  CHECK(format_fixed(-0.001, 2) == "0.00");
  CHECK(format_fixed(-0.0, 2) == "0.00");
  CHECK(format_fixed(-0.006, 2) == "-0.01");
  CHECK(format_fixed(0.2, 6) == "0.200000");
}

TEST_CASE("grid flag") {
  const GridSpec g = parse_grid("0:100:3,5:10:2", SurfaceKind::BudgetPGamma);
  CHECK(g.axis1.name == "budget");
  CHECK(g.axis2.name == "gamma_d");
  CHECK(g.axis1.steps == 3);
  CHECK(g.axis2.max == 10.0);
  CHECK_THROWS(parse_grid("0:100:3", SurfaceKind::BudgetPGamma));
  CHECK_THROWS(parse_grid("0:100,5:10:2", SurfaceKind::BudgetPGamma));
  CHECK_THROWS(parse_grid("0:x:3,5:10:2", SurfaceKind::BudgetPGamma));
  CHECK_THROWS(parse_grid("0:100:1,5:10:2", SurfaceKind::BudgetPGamma));
}

TEST_CASE("optimize") {
  const Run r = invoke({"optimize", "--baseline"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "d_star") == "22500.00");
  CHECK(value_of(r.out, "k_star") == "243622.14");
  CHECK(value_of(r.out, "indemnity_premium") == "6352.58");
  CHECK(value_of(r.out, "parametric_premium") == "6334.18");
  CHECK(value_of(r.out, "mv_no_insurance") == "131023.21");
  CHECK(value_of(r.out, "duality_gap") == "0.00");

  const Run free = invoke({"optimize", "--baseline", "--set", "indemnity.theta_d=0"});
  CHECK(value_of(free.out, "d_star") == "0.00");
  CHECK(value_of(free.out, "indemnity_premium") == "5322.44");

  const Run general = invoke({"optimize", "--baseline", "--set", "frequency.mean=0.02", "--set",
                           "frequency.variance=0.04"});
  REQUIRE(general.code == 0);
  CHECK(value_of(general.out, "objective") == "general-count");
  CHECK(value_of(general.out, "k_star") == "254872.14");
  CHECK(value_of(general.out, "duality_gap") != "0.00");
  CHECK(value_of(general.out, "duality_identity_applies") == "no");
}

TEST_CASE("json report") {
  const auto path = temp_path("optimize.json");
  const Run r = invoke({"optimize", "--baseline", "--out", path.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("\"d_star\": 22500.0") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("indifference") {
  const Run g1 = invoke({"indifference", "--baseline", "--target", "gamma", "--mode", "optimal"});
  REQUIRE(g1.code == 0);
  CHECK(value_of(g1.out, "root") == "3238.56");
  const Run g2 = invoke({"indifference", "--baseline", "--target", "gamma", "--mode", "matched"});
  CHECK(value_of(g2.out, "root") == "9980.06");
  const Run t2 = invoke({"indifference", "--baseline", "--set", "parametric.theta_p=0.2",
                      "--target", "theta", "--mode", "matched"});
  CHECK(value_of(t2.out, "root").substr(0, 4) == "1.57");
  CHECK(value_of(t2.out, "bracket") == "[0.200001, 6.666667]");

  const Run none = invoke({"indifference", "--baseline", "--set", "parametric.gamma_p=100000"});
  CHECK(none.code == kExitNoRoot);
  CHECK(none.err.find("no root") != std::string::npos);
}

TEST_CASE("surface") {
  const Run r = invoke({"surface", "--baseline", "--kind", "dgamma", "--grid",
                     "0:500000:2,0:15000:2"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "axis1,axis2,delta_mv,capped,indemnity_infeasible,chosen");
  CHECK(rows[1].rfind("0.00,0.00,", 0) == 0);
  CHECK(rows[4].rfind("500000.00,15000.00,", 0) == 0);

  const Run truncated = invoke({"surface", "--baseline", "--kind", "dgamma", "--grid",
                             "0:500000:2,0:15000:2", "--truncate-zero"});
  CHECK(lines(truncated.out)[1] == "0.00,0.00,0.00,false,false,indemnity");

  const Run theta = invoke({"surface", "--baseline", "--kind", "thetagamma", "--grid",
                         "0.2:2:2,0:1:2"});
  CHECK(lines(theta.out)[1].rfind("0.200000,0.00,", 0) == 0);

  SUBCASE("budget rows below the indemnity floor are infeasible") {
    const Run b = invoke({"surface", "--baseline", "--kind", "budget", "--grid",
                       "0:2600:27,1000:2000:2"});
    REQUIRE(b.code == 0);
    int checked = 0;
    for (const auto& row : lines(b.out)) {
      const auto f = fields(row);
      if (f[0] == "axis1" || f[1] != "1000.00") continue;
      CHECK((f[4] == "true") == (std::stod(f[0]) < 1300.0));
      ++checked;
    }
    CHECK(checked == 27);
  }

  SUBCASE("file output matches stdout and repeats byte for byte") {
    const auto path = temp_path("surface.csv");
    const std::vector<std::string> args{"surface", "--baseline", "--kind", "budget", "--grid",
                                        "0:12000:31,0:5000:11"};
    auto with_out = args;
    with_out.insert(with_out.end(), {"--out", path.string(), "--threads", "3"});
    REQUIRE(invoke(with_out).code == 0);
    std::ifstream in(path, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == invoke(args).out);
    std::filesystem::remove(path);
  }
}

TEST_CASE("budget") {
  const Run single = invoke({"budget", "--baseline", "--set", "indemnity.gamma_d=1000",
                          "--budget", "1000"});
  REQUIRE(single.code == 0);
  CHECK(value_of(single.out, "indemnity.infeasible") == "yes");
  CHECK(value_of(single.out, "chosen") == "parametric");

  const Run zero = invoke({"budget", "--baseline", "--budget", "0"});
  CHECK(value_of(zero.out, "chosen") == "none");

  const Run sweep = invoke({"budget", "--baseline", "--set", "indemnity.gamma_d=1000", "--sweep",
                         "0:12000:25"});
  REQUIRE(sweep.code == 0);
  const auto rows = lines(sweep.out);
  CHECK(rows[0] == "# indemnity_floor: 1300.00");
  CHECK(rows[3].rfind("# indifference_budget: 34", 0) == 0);
  CHECK(rows[4].rfind("budget,chosen,", 0) == 0);
  CHECK(rows.size() == 5 + 25);

  CHECK(invoke({"budget", "--baseline"}).code == kExitParse);
  CHECK(invoke({"budget", "--baseline", "--budget", "1", "--sweep", "0:1:2"}).code == kExitParse);
  CHECK(invoke({"budget", "--baseline", "--budget", "-5"}).code == kExitInvariant);
}

TEST_CASE("simulate") {
  const std::vector<std::string> args{"simulate", "--baseline", "--design", "indemnity:22500",
                                      "--years", "200000", "--seed", "42"};
  const Run a = invoke(args);
  const Run b = invoke(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(std::abs(std::stod(value_of(a.out, "z_score"))) < 3.0);

  const Run one = invoke({"simulate", "--baseline", "--design", "none", "--years", "1"});
  CHECK(one.code == 0);
  CHECK(value_of(one.out, "years") == "1");

  const Run opt = invoke({"simulate", "--baseline", "--design", "parametric:opt", "--years", "10"});
  CHECK(opt.code == 0);

  CHECK(invoke({"simulate", "--baseline", "--design", "bogus"}).code == kExitParse);
  CHECK(invoke({"simulate", "--baseline", "--design", "indemnity:abc"}).code == kExitParse);
  CHECK(invoke({"simulate", "--baseline", "--design", "indemnity:-3"}).code == kExitInvariant);
  CHECK(invoke({"simulate", "--baseline", "--years", "0"}).code == kExitInvariant);
}

TEST_CASE("scenario files and errors") {
  const auto path = temp_path("scenario.yaml");
  {
    std::ofstream f(path);
    f << "indemnity:\n  theta_d: 0.5\n";
  }
  const Run r = invoke({"optimize", path.string()});
  CHECK(r.code == 0);
  CHECK(value_of(r.out, "d_star") == "37500.00");
  {
    std::ofstream f(path);
    f << "indemnity:\n  theta: 0.5\n";
  }
  const Run bad = invoke({"optimize", path.string()});
  CHECK(bad.code == kExitParse);
  CHECK(bad.err.find("indemnity.theta (line 2)") != std::string::npos);
  {
    std::ofstream f(path);
    f << "severity:\n  nu: -1\n";
  }
  CHECK(invoke({"optimize", path.string()}).code == kExitInvariant);
  std::filesystem::remove(path);

  CHECK(invoke({"optimize"}).code == kExitParse);
  CHECK(invoke({"optimize", "--baseline", "x.yaml"}).code == kExitParse);
  CHECK(invoke({}).code == kExitParse);
  CHECK(invoke({"frobnicate"}).code == kExitParse);
  CHECK(invoke({"surface", "--baseline", "--kind", "other"}).code == kExitParse);
  CHECK(invoke({"indifference", "--baseline", "--mode", "other"}).code == kExitParse);
  CHECK(invoke({"--help"}).code == 0);
}
