#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <dirac/apath.hpp>
#include <dirac/config.hpp>
#include <dirac/scenario.hpp>
#include <string>
#include <vector>

using namespace dirac;

namespace {

std::vector<std::string> check_names(const Scenario& s) {
  std::vector<std::string> out;
  for (const ScenarioCheck& c : s.checks) out.push_back(c.name);
  return out;
}

const CheckReport* find_check(const RunReport& r, const std::string& name) {
  for (const CheckReport& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

void expect_all_pass(const RunReport& rep) {
  for (const CheckReport& c : rep.checks) {
    INFO(c.name, ": residual ", c.max_residual, ", tol ", c.tol, "; ", c.note);
    CHECK(c.pass);
  }
  CHECK(rep.all_pass());
}

// linear bracket over the rotation algebra, reduced by the axial circle,
// mirroring the built-in fixture but assembled from expression strings
const char* kRotationConfig = R"(
name = "rotation-demo"

[chart]
name = "xi"
dim = 3
lo = [0.6, -0.5, -0.5]
hi = [1.6, 0.5, 0.5]

[structure]
kind = "poisson"
matrix = [["0", "x3", "-x2"],
          ["-x3", "0", "x1"],
          ["x2", "-x1", "0"]]

[action]
dim = 1
generators = [["-x2", "x1", "0"]]

[quotient]
name = "y"
dim = 2
lo = [0.5, -0.45]
hi = [2.3, 0.45]
p = ["x1*x1 + x2*x2", "x3"]
sigma = ["sqrt(x1)", "0", "x2"]
)";

}  // namespace

TEST_CASE("parser handles sections, arrays, comments and strings") {
  ConfigDoc doc = parse_config(R"(# leading comment
name = "demo"  # trailing comment
count = 3
scale = -2.5e-2
flag = true

[alpha]
word = "a \"quoted\" backslash \\ done"
items = [1, 2, [3, 4],]
empty = []

[beta]
pair = ["x1", "x2"]
)");

  REQUIRE(doc.sections.size() == 3);
  const ConfigSection& root = doc.at("");
  CHECK(root.at("name").as_string() == "demo");
  CHECK(root.at("count").as_int() == 3);
  CHECK(root.at("scale").as_number() == doctest::Approx(-0.025));
  CHECK(root.at("flag").kind == ConfigValue::Kind::Bool);
  CHECK(root.at("flag").flag);

  const ConfigSection& alpha = doc.at("alpha");
  CHECK(alpha.line == 7);
  CHECK(alpha.at("word").as_string() == "a \"quoted\" backslash \\ done");
  const auto& items = alpha.at("items").as_array();
  REQUIRE(items.size() == 3);
  CHECK(items[0].as_number() == 1);
  REQUIRE(items[2].as_array().size() == 2);
  CHECK(items[2].as_array()[1].as_number() == 4);
  CHECK(alpha.at("items").line == 9);
  CHECK(alpha.at("empty").as_array().empty());

  CHECK(doc.at("beta").line == 12);
  CHECK(doc.find("gamma") == nullptr);
}

TEST_CASE("parser reports malformed input with line numbers") {
  CHECK_THROWS_WITH_AS(parse_config("x = \"abc"), "unterminated string (line 1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("x 3"), "expected '=' after key 'x' (line 1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[a]\nx = 1\nx = 2"),
                       "duplicate key 'x' in [a] (line 3)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[a]\n[a]"), "duplicate section [a] (line 2)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("x = [1, 2"),
                       "expected ',' or ']' in array (line 1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("x = @"), "unexpected character '@' (line 1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("x ="), "expected a value (line 1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("x = 1.2.3"),
                       "expected a value, got '1.2.3' (line 1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[a\nx = 1"),
                       "expected ']' after section name (line 1)", ConfigError);
}

TEST_CASE("checked accessors name what they expected") {
  ConfigDoc doc = parse_config("[alpha]\nn = 3\nw = \"s\"");
  CHECK_THROWS_WITH_AS(doc.at("alpha").at("n").as_string(),
                       "expected a quoted string (line 2)", ConfigError);
  CHECK_THROWS_WITH_AS(doc.at("alpha").at("w").as_number(),
                       "expected a number (line 3)", ConfigError);
  CHECK_THROWS_WITH_AS(doc.at("alpha").at("n").as_array(),
                       "expected an array (line 2)", ConfigError);
  CHECK_THROWS_WITH_AS(doc.at("alpha").at("zzz"),
                       "[alpha] is missing key 'zzz' (line 1)", ConfigError);
  CHECK_THROWS_WITH_AS(doc.at("gamma"), "missing section [gamma]", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("n = 2.5").at("").at("n").as_int(),
                       "expected an integer (line 1)", ConfigError);
}

TEST_CASE("a poisson config with action and quotient verifies end to end") {
  Scenario s = scenario_from_config(parse_config(kRotationConfig));
  CHECK(s.name == "rotation-demo");
  REQUIRE(s.charts.size() == 2);
  CHECK(s.charts[0].name == "xi");
  CHECK(s.charts[1].name == "y");
  CHECK(check_names(s) ==
        std::vector<std::string>{"dirac-lagrangian", "dirac-involutive", "im-axioms",
                                 "action-structure", "action-preserves-dirac",
                                 "infinitesimal-symmetry", "quotient-model",
                                 "reduced-comparison"});

  RunSettings settings;
  settings.n_samples = 25;
  settings.seed = 7;
  RunReport rep = run_scenario(s, settings);
  expect_all_pass(rep);
  CHECK(rep.samples.at("xi").size() == 25);
  CHECK(rep.samples.at("y").size() == 25);
}

TEST_CASE("a frame-backed structure builds and verifies") {
  Scenario s = scenario_from_config(parse_config(R"(
[chart]
dim = 2
lo = -1
hi = 1

[structure]
kind = "frame"
x_parts = [["1", "0"], ["0", "1"]]
a_parts = [["0", "1"], ["-1", "0"]]
)"));
  CHECK(s.name == "custom");
  CHECK(s.charts[0].name == "m");
  CHECK(check_names(s) ==
        std::vector<std::string>{"dirac-lagrangian", "dirac-involutive", "im-axioms"});

  RunSettings settings;
  settings.n_samples = 30;
  settings.seed = 3;
  expect_all_pass(run_scenario(s, settings));
}

TEST_CASE("a non-closed two-form parses but fails involutivity") {
  Scenario s = scenario_from_config(parse_config(R"(
[chart]
dim = 3
lo = -1
hi = 1

[structure]
kind = "twoform"
matrix = [["0", "x3", "0"], ["-x3", "0", "0"], ["0", "0", "0"]]
)"));
  RunSettings settings;
  settings.n_samples = 20;
  settings.seed = 5;
  RunReport rep = run_scenario(s, settings);

  const CheckReport* lag = find_check(rep, "dirac-lagrangian");
  REQUIRE(lag != nullptr);
  CHECK(lag->pass);
  const CheckReport* inv = find_check(rep, "dirac-involutive");
  REQUIRE(inv != nullptr);
  CHECK_FALSE(inv->pass);
  CHECK(inv->max_residual > 1e-3);
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("structure assembly rejects broken input with its reason") {
  auto with_structure = [](const std::string& body) {
    return "[chart]\ndim = 2\nlo = -1\nhi = 1\n\n[structure]\n" + body;
  };
  CHECK_THROWS_WITH_AS(
      scenario_from_config(parse_config(with_structure("kind = \"spinor\"\nmatrix = [[]]"))),
      doctest::Contains("kind must be"), ConfigError);
  CHECK_THROWS_WITH_AS(scenario_from_config(parse_config(with_structure(
                           "kind = \"poisson\"\nmatrix = [[\"0\", \"1\"], [\"1\", \"0\"]]"))),
                       doctest::Contains("not antisymmetric"), ConfigError);
  CHECK_THROWS_WITH_AS(scenario_from_config(parse_config(with_structure(
                           "kind = \"poisson\"\nmatrix = [[\"0\", \"x9\"], [\"-x9\", \"0\"]]"))),
                       doctest::Contains("matrix:"), ConfigError);
  CHECK_THROWS_WITH_AS(
      scenario_from_config(parse_config(with_structure(
          "kind = \"frame\"\nx_parts = [[\"1\", \"0\"]]\na_parts = [[\"0\", \"1\"], [\"1\", \"0\"]]"))),
      doctest::Contains("same number of rows"), ConfigError);
  CHECK_THROWS_WITH_AS(
      scenario_from_config(parse_config(with_structure(
          "kind = \"poisson\"\nmatrix = [[\"0\", \"x1\"], [\"-x1\", \"0\"], [\"0\", \"0\"]]"))),
      doctest::Contains("needs 2 rows"), ConfigError);
}

TEST_CASE("chart assembly validates dimensions and bounds") {
  CHECK_THROWS_WITH_AS(
      scenario_from_config(parse_config("[chart]\ndim = 0\nlo = -1\nhi = 1")),
      doctest::Contains("dim must be positive"), ConfigError);
  CHECK_THROWS_WITH_AS(
      scenario_from_config(parse_config("[chart]\ndim = 2\nlo = 1\nhi = -1")),
      doctest::Contains("lo < hi"), ConfigError);
  CHECK_THROWS_WITH_AS(
      scenario_from_config(parse_config("[chart]\ndim = 3\nlo = [0, 0]\nhi = 1")),
      doctest::Contains("lo needs 3 bounds"), ConfigError);
}

TEST_CASE("action assembly enforces the bracket axioms") {
  auto with_action = [](const std::string& body) {
    return std::string(
               "[chart]\ndim = 3\nlo = -1\nhi = 1\n\n[structure]\nkind = \"poisson\"\n"
               "matrix = [[\"0\", \"x3\", \"-x2\"], [\"-x3\", \"0\", \"x1\"], "
               "[\"x2\", \"-x1\", \"0\"]]\n\n[action]\n") +
           body;
  };
  // [e1,e2] = e3 and [e1,e3] = e1 cannot close: the Jacobi identity fails
  CHECK_THROWS_WITH_AS(
      scenario_from_config(parse_config(with_action(
          "dim = 3\nstructure_constants = [[1, 2, 3, 1], [1, 3, 1, 1]]\n"
          "generators = [[\"0\", \"0\", \"0\"], [\"0\", \"0\", \"0\"], [\"0\", \"0\", \"0\"]]"))),
      doctest::Contains("[action]"), ConfigError);
  CHECK_THROWS_WITH_AS(scenario_from_config(parse_config(with_action(
                           "dim = 2\nstructure_constants = [[1, 1, 2, 1]]\n"
                           "generators = [[\"0\", \"0\", \"0\"], [\"0\", \"0\", \"0\"]]"))),
                       doctest::Contains("vanish by antisymmetry"), ConfigError);
  CHECK_THROWS_WITH_AS(scenario_from_config(parse_config(with_action(
                           "dim = 2\nstructure_constants = [[1, 3, 2, 1]]\n"
                           "generators = [[\"0\", \"0\", \"0\"], [\"0\", \"0\", \"0\"]]"))),
                       doctest::Contains("bounded by dim"), ConfigError);
  CHECK_THROWS_WITH_AS(
      scenario_from_config(parse_config(
          with_action("dim = 1\ngenerators = [[\"-x2\", \"x1\", \"0\"], [\"0\", \"0\", \"0\"]]"))),
      doctest::Contains("needs 1 rows"), ConfigError);
}

TEST_CASE("a quotient section without an action is rejected") {
  CHECK_THROWS_WITH_AS(
      scenario_from_config(parse_config(R"(
[chart]
dim = 2
lo = -1
hi = 1

[structure]
kind = "frame"
x_parts = [["1", "0"]]
a_parts = [["0", "0"]]

[quotient]
dim = 1
lo = -1
hi = 1
p = ["x1"]
sigma = ["x1", "0"]
)")),
      doctest::Contains("[quotient] requires an [action]"), ConfigError);
}

TEST_CASE("a path config integrates the expected momentum") {
  ConfigDoc doc = parse_config(R"(
[chart]
dim = 3
lo = -1
hi = 1

[structure]
kind = "poisson"
matrix = [["0", "x3", "-x2"],
          ["-x3", "0", "x1"],
          ["x2", "-x1", "0"]]

[action]
dim = 1
generators = [["-x2", "x1", "0"]]

[path]
intervals = 400
tol = 1e-4
base = ["0.4", "0.7*sin(t + 0.5)", "0.7*cos(t + 0.5)"]
coeffs = ["1", "0", "0"]
)");
  PathSetup setup = path_from_config(doc);
  CHECK(setup.path.intervals() == 400);
  CHECK(setup.path.dim() == 3);
  CHECK(setup.algebroid.rank == 3);
  CHECK(setup.tol == 1e-4);
  REQUIRE(setup.act.has_value());

  CheckReport rep = check_apath(setup.path, setup.algebroid, setup.tol);
  INFO(rep.note, "; residual ", rep.max_residual);
  CHECK(rep.pass);

  // the coefficient path is the differential of the first coordinate, so the
  // circle momentum is the integral of minus the second base coordinate
  Eigen::VectorXd j = integrate_J(setup.path, setup.algebroid, setup.mu, *setup.act);
  REQUIRE(j.size() == 1);
  CHECK(j(0) == doctest::Approx(0.7 * (std::cos(1.5) - std::cos(0.5))).epsilon(1e-8));
}

TEST_CASE("path configs validate their grid and gate") {
  const char* head = R"(
[chart]
dim = 2
lo = -1
hi = 1

[structure]
kind = "frame"
x_parts = [["1", "0"]]
a_parts = [["0", "0"]]

[path]
)";
  CHECK_THROWS_WITH_AS(
      path_from_config(parse_config(std::string(head) +
                                    "intervals = 1\nbase = [\"t\", \"0\"]\ncoeffs = [\"1\"]")),
      doctest::Contains("at least 2 intervals"), ConfigError);
  CHECK_THROWS_WITH_AS(
      path_from_config(parse_config(std::string(head) +
                                    "intervals = 4\ntol = 0\nbase = [\"t\", \"0\"]\ncoeffs = [\"1\"]")),
      doctest::Contains("tol must be positive"), ConfigError);
  PathSetup setup = path_from_config(
      parse_config(std::string(head) + "intervals = 4\nbase = [\"t\", \"0\"]\ncoeffs = [\"1\"]"));
  CHECK(setup.tol == 1e-3);
  CHECK_FALSE(setup.act.has_value());
  CHECK(check_apath(setup.path, setup.algebroid, 1e-9).pass);
}
