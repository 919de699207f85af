#pragma once

// Check outcomes and their JSON serialization.  A report passes exactly when
// max_residual < tol; aggregate checks normalize their sub-residuals so this
// invariant holds for them too.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <dirac/chart.hpp>

namespace dirac {

struct CheckReport {
  std::string name;
  std::string anchor;  // the identity or quantity this check verifies
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  int n_points = 0;
  Eigen::VectorXd worst_point;  // empty when no sample is singled out
  std::string worst_chart;
  std::string note;

  void finalize() { pass = max_residual < tol; }
};

struct RunReport {
  std::string scenario;
  uint64_t seed = 0;
  int n_samples = 0;
  int basepoint_variant = 0;
  std::map<std::string, double> tol_overrides;
  std::vector<CheckReport> checks;
  std::map<std::string, std::vector<Eigen::VectorXd>> samples;  // per chart

  bool all_pass() const;
};

// Deterministic (sorted keys, fixed float formatting) serialization.
std::string to_json_string(const RunReport& r);
std::string to_json_string(const CheckReport& r);

// Parses a serialized RunReport back; used by the round-trip tests.
RunReport run_report_from_json(const std::string& text);

// Writes via a temp file plus rename so readers never observe a torn file.
void write_text_atomic(const std::string& path, const std::string& content);

// "(x1, x2, ...)" for error messages that name a sample point.
std::string point_string(const Eigen::VectorXd& x);

}  // namespace dirac
