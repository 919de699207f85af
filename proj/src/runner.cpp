#include <dirac/runner.hpp>

#include <atomic>
#include <exception>

namespace dirac {

namespace {

std::atomic<bool> g_parallel{true};

ScanResult reduce_serial(std::vector<double> residuals) {
  ScanResult r;
  r.residuals = std::move(residuals);
  for (size_t i = 0; i < r.residuals.size(); ++i) {
    if (r.worst_index < 0 || r.residuals[i] > r.max_residual) {
      r.max_residual = r.residuals[i];
      r.worst_index = static_cast<int>(i);
    }
  }
  if (r.worst_index < 0) r.max_residual = 0.0;
  return r;
}

}  // namespace

bool parallel_scans_enabled() { return g_parallel.load(); }
void set_parallel_scans(bool on) { g_parallel.store(on); }

ScanResult scan_residuals_serial(int n, const std::function<double(int)>& fn) {
  std::vector<double> res(n);
  for (int i = 0; i < n; ++i) res[i] = fn(i);
  return reduce_serial(std::move(res));
}

ScanResult scan_residuals(int n, const std::function<double(int)>& fn) {
  if (!parallel_scans_enabled()) return scan_residuals_serial(n, fn);
  std::vector<double> res(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      res[i] = fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (int i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
  return reduce_serial(std::move(res));
}

CheckReport report_from_scan(std::string name, std::string anchor, double tol,
                             const std::vector<ChartPoint>& pts,
                             const std::function<double(int)>& fn) {
  CheckReport rep;
  rep.name = std::move(name);
  rep.anchor = std::move(anchor);
  rep.tol = tol;
  rep.n_points = static_cast<int>(pts.size());
  ScanResult scan = scan_residuals(static_cast<int>(pts.size()), fn);
  rep.max_residual = scan.max_residual;
  if (scan.worst_index >= 0) {
    rep.worst_point = pts[scan.worst_index].x;
    rep.worst_chart = pts[scan.worst_index].chart;
  }
  rep.finalize();
  return rep;
}

}  // namespace dirac
