// Command-line front end: list and run the built-in scenarios, check
// user-defined structures from config files, integrate configured paths, and
// emit deterministic JSON reports.
//
// Exit codes: 0 all checks pass, 1 at least one check fails, 2 configuration
// error (unknown scenario, malformed config or flags, convention violations).

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <dirac/apath.hpp>
#include <dirac/config.hpp>
#include <dirac/report.hpp>
#include <dirac/sampling.hpp>
#include <dirac/scenario.hpp>

using namespace dirac;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, double> tol_map(const std::vector<std::string>& specs) {
  std::map<std::string, double> out;
  for (const std::string& s : specs) {
    size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--tol expects NAME=VALUE, got '" + s + "'", 0);
    double v = 0.0;
    try {
      size_t used = 0;
      v = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("--tol value in '" + s + "' is not a number", 0);
    }
    if (!(v > 0.0)) throw ConfigError("--tol value in '" + s + "' must be positive", 0);
    out[s.substr(0, eq)] = v;
  }
  return out;
}

void print_check_line(const CheckReport& c) {
  std::cout << (c.pass ? "[ ok ] " : "[FAIL] ") << std::left << std::setw(26) << c.name
            << " max residual " << std::scientific << std::setprecision(3) << c.max_residual
            << "  (tol " << c.tol << ", " << c.n_points << " pts)\n";
  if (!c.pass) {
    if (c.worst_point.size() > 0)
      std::cout << "       worst sample " << point_string(c.worst_point)
                << (c.worst_chart.empty() ? "" : " in chart " + c.worst_chart) << "\n";
    if (!c.note.empty()) std::cout << "       " << c.note << "\n";
  }
}

int finish_run(const RunReport& rep, const std::string& report_path) {
  std::cout << "scenario " << rep.scenario << ": " << rep.n_samples
            << " samples per chart, seed " << rep.seed;
  if (rep.basepoint_variant != 0) std::cout << ", basepoint variant " << rep.basepoint_variant;
  std::cout << "\n";
  for (const CheckReport& c : rep.checks) print_check_line(c);
  std::cout << (rep.all_pass() ? "all checks passed" : "CHECKS FAILED") << "\n";
  if (!report_path.empty()) write_text_atomic(report_path, to_json_string(rep));
  return rep.all_pass() ? 0 : 1;
}

int run_builtin(const std::string& name, int variant, const RunSettings& settings,
                const std::string& report_path) {
  Scenario s = make_scenario(name, variant);
  return finish_run(run_scenario(s, settings), report_path);
}

int run_config(const std::string& path, const RunSettings& settings,
               const std::string& report_path) {
  Scenario s = scenario_from_config(parse_config(read_file(path)));
  if (s.act.dim() > 0) {
    // reject sign-convention mistakes before the checks dilute them into
    // residual noise; the diagnostic names the offending sample
    std::vector<ChartPoint> pts = sample_points(
        s.charts[0], std::min(settings.n_samples, 32), mix_seed(settings.seed, 0));
    try {
      validate_group_action(s.act, pts);
    } catch (const std::runtime_error& e) {
      std::cerr << "action convention error: " << e.what() << "\n";
      return 2;
    }
  }
  return finish_run(run_scenario(s, settings), report_path);
}

int run_integrate(const std::string& path, const std::string& report_path) {
  ConfigDoc doc = parse_config(read_file(path));
  PathSetup setup = path_from_config(doc);
  std::cout << "path: " << setup.path.intervals() << " intervals, dim " << setup.path.dim()
            << ", rank " << setup.algebroid.rank << "\n";

  CheckReport rep = check_apath(setup.path, setup.algebroid, setup.tol);
  if (setup.act.has_value()) {
    Eigen::VectorXd j = integrate_J(setup.path, setup.algebroid, setup.mu, *setup.act);
    rep.note += (rep.note.empty() ? "" : "; ") + ("momentum J = " + point_string(j));
    std::cout << "momentum J = " << point_string(j) << "\n";
  }
  print_check_line(rep);

  if (!report_path.empty()) {
    const ConfigSection* root = doc.find("");
    RunReport out;
    out.scenario = root && root->has("name") ? root->at("name").as_string() : "path";
    out.n_samples = setup.path.intervals();
    out.checks.push_back(rep);
    write_text_atomic(report_path, to_json_string(out));
  }
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification of Dirac structures, symmetries, and quotients"};
  app.require_subcommand(1);

  app.add_subcommand("list", "list the built-in scenarios");

  std::string scenario_name;
  std::string config_path;
  std::string report_path;
  std::vector<std::string> tol_specs;
  int samples = 200;
  std::uint64_t seed = 42;
  int variant = 0;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--samples", samples, "sample points per chart")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "seed fixing every sample point");
    cmd->add_option("--tol", tol_specs,
                    "override a check tolerance (NAME=VALUE, repeatable; NAME 'all' matches "
                    "checks without an exact-name override)");
    cmd->add_option("--report", report_path, "write the JSON run report to this file");
  };

  CLI::App* run = app.add_subcommand("run", "run a built-in scenario");
  run->add_option("scenario", scenario_name, "scenario name, see 'list'")->required();
  add_run_flags(run);
  run->add_option("--basepoint-variant", variant,
                  "alternate structure-chart basepoint, where the scenario defines one")
      ->check(CLI::Range(0, 1));

  CLI::App* check = app.add_subcommand("check", "verify a structure defined in a config file");
  check->add_option("config", config_path, "config file (see README for the schema)")
      ->required();
  add_run_flags(check);

  CLI::App* integrate =
      app.add_subcommand("integrate", "verify a configured path and integrate its momentum");
  integrate->add_option("config", config_path, "config file with a [path] section")
      ->required();
  integrate->add_option("--report", report_path, "write the JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const std::string& n : scenario_names())
        std::cout << std::left << std::setw(26) << n << " " << make_scenario(n).summary << "\n";
      return 0;
    }

    RunSettings settings;
    settings.n_samples = samples;
    settings.seed = seed;
    settings.tol_overrides = tol_map(tol_specs);

    if (app.got_subcommand("run")) return run_builtin(scenario_name, variant, settings, report_path);
    if (app.got_subcommand("check")) return run_config(config_path, settings, report_path);
    return run_integrate(config_path, report_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
