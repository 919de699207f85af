#pragma once

// Built-in verification scenarios.  A scenario bundles named charts, a Dirac
// structure with a compatible group action and quotient model, and an ordered
// list of checks; running one samples every chart deterministically and
// executes the checks, capturing exceptions as failed entries so degenerate
// inputs surface in the report instead of crashing the run.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <dirac/algebroid.hpp>
#include <dirac/courant.hpp>
#include <dirac/reduction.hpp>
#include <dirac/report.hpp>

namespace dirac {

// Shared per-chart sample sets, keyed by chart name; every check of a run
// sees the same points.
using SampleMap = std::map<std::string, std::vector<ChartPoint>>;

const std::vector<ChartPoint>& samples_for(const SampleMap& samples, const std::string& chart);

struct ScenarioCheck {
  std::string name;
  double default_tol = 0.0;
  std::function<CheckReport(const SampleMap&, double tol)> run;
};

struct Scenario {
  std::string name;
  std::string summary;
  std::vector<Chart> charts;  // charts[0] carries the Dirac structure
  DiracStructure l;
  GroupActionData act;
  QuotientModel quotient;
  // projectable frame matched across the quotient, when one is known in
  // closed form; sharpens the reduced-comparison part of the reduction check
  std::optional<MatchedFrames> frames;
  std::vector<ScenarioCheck> checks;
  int basepoint_variant = 0;
};

struct RunSettings {
  int n_samples = 200;
  uint64_t seed = 42;
  // per-check tolerance overrides by check name; key "all" applies to every
  // check that has no exact-name entry
  std::map<std::string, double> tol_overrides;

  double tol_for(const std::string& name, double fallback) const;
};

std::vector<std::string> scenario_names();

// Throws std::invalid_argument for unknown names or variants the scenario
// does not define.
Scenario make_scenario(const std::string& name, int basepoint_variant = 0);

// Samples chart i with substream i of the seed, then runs the checks in
// order.  A check that throws is recorded as failed with the message in its
// note and a sentinel residual.
RunReport run_scenario(const Scenario& s, const RunSettings& settings);

}  // namespace dirac
