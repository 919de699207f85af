#pragma once

// Config-file front end: a small TOML subset (sections, scalar values,
// nested arrays, # comments) whose coefficient matrices are expression
// strings, assembled into runnable scenarios and discretized paths.
//
// Schema overview (details in the README):
//   name = "..."            optional scenario label
//   [chart]     name, dim, lo, hi          (lo/hi: number or array)
//   [structure] kind = "poisson" | "twoform" | "frame"
//               matrix = [[expr, ...], ...]          poisson/twoform
//               x_parts, a_parts = [[expr, ...], ...] frame sections
//   [action]    dim, structure_constants = [[i, j, k, f], ...] (1-based),
//               generators = [[expr, ...], ...], bilinear_form optional
//   [quotient]  name, dim, lo, hi, p = [expr, ...], sigma = [expr, ...]
//   [path]      intervals, tol, base = [expr, ...], coeffs = [expr, ...]
// Expressions use x1..xn of the enclosing map's input; t aliases x1 for
// one-dimensional inputs.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <dirac/apath.hpp>
#include <dirac/scenario.hpp>

namespace dirac {

// Invalid config content; line is 1-based in the source text, 0 if unknown.
struct ConfigError : std::runtime_error {
  int line;
  ConfigError(const std::string& what, int at)
      : std::runtime_error(at > 0 ? what + " (line " + std::to_string(at) + ")" : what),
        line(at) {}
};

struct ConfigValue {
  enum class Kind { String, Number, Bool, Array };

  Kind kind = Kind::Number;
  std::string text;
  double number = 0.0;
  bool flag = false;
  std::vector<ConfigValue> items;
  int line = 0;

  // checked accessors; throw ConfigError naming the expected kind
  const std::string& as_string() const;
  double as_number() const;
  int as_int() const;  // must be integral-valued
  const std::vector<ConfigValue>& as_array() const;
};

struct ConfigSection {
  std::string name;  // "" for keys above the first section header
  int line = 0;
  std::map<std::string, ConfigValue> entries;

  bool has(const std::string& key) const { return entries.count(key) > 0; }
  // throws ConfigError citing the section when the key is missing
  const ConfigValue& at(const std::string& key) const;
};

struct ConfigDoc {
  std::vector<ConfigSection> sections;  // in file order

  const ConfigSection* find(const std::string& name) const;
  // throws ConfigError when the section is missing
  const ConfigSection& at(const std::string& name) const;
};

// Throws ConfigError with the offending line on malformed input.
ConfigDoc parse_config(const std::string& text);

// [chart] + [structure] with the applicable checks: the Dirac checks always,
// symmetry checks with [action], quotient-model and reduced-comparison
// checks with [quotient] (which requires [action]).  Structure matrices are
// rejected here if they fail the antisymmetry gate at the chart center.
Scenario scenario_from_config(const ConfigDoc& doc);

// [path] over the configured structure: the discretized path, its declared
// residual gate, and the algebroid data needed to integrate momenta.
struct PathSetup {
  APath path;
  double tol = 1e-3;
  AnchoredAlgebroid algebroid;
  IMForm mu;
  std::optional<GroupActionData> act;
};

PathSetup path_from_config(const ConfigDoc& doc);

}  // namespace dirac
