#pragma once

// Residual scans: every check reduces to "evaluate a nonnegative residual at
// each sample point, report the max and where it happened".  The per-point
// evaluations run under OpenMP when enabled; the reduction is always a serial
// left-to-right pass, so results (and serialized reports) are identical for
// any thread count.

#include <functional>
#include <vector>

#include <dirac/chart.hpp>
#include <dirac/report.hpp>

namespace dirac {

bool parallel_scans_enabled();
void set_parallel_scans(bool on);

struct ScanResult {
  std::vector<double> residuals;
  double max_residual = 0.0;
  int worst_index = -1;  // lowest index attaining the max; -1 when empty
};

// fn(i) must be pure; exceptions are captured and rethrown for the lowest
// failing index.
ScanResult scan_residuals(int n, const std::function<double(int)>& fn);
ScanResult scan_residuals_serial(int n, const std::function<double(int)>& fn);

// Fills a report from a scan over the given sample points (fn indexed like
// pts). finalize() is applied.
CheckReport report_from_scan(std::string name, std::string anchor, double tol,
                             const std::vector<ChartPoint>& pts,
                             const std::function<double(int)>& fn);

}  // namespace dirac
