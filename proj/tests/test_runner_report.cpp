#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <dirac/report.hpp>
#include <dirac/runner.hpp>
#include <dirac/sampling.hpp>
#include <filesystem>
#include <fstream>

using namespace dirac;

TEST_CASE("parallel and serial scans agree bitwise") {
  Chart c = Chart::box("m", 3, -1, 1);
  auto pts = sample_points(c, 500, 42);
  auto fn = [&](int i) {
    // arbitrary deterministic residual
    const auto& x = pts[i].x;
    return std::abs(std::sin(x(0) * 3.7) * std::exp(x(1)) + x(2) * x(2));
  };
  set_parallel_scans(true);
  ScanResult par = scan_residuals(500, fn);
  ScanResult ser = scan_residuals_serial(500, fn);
  set_parallel_scans(true);
  REQUIRE(par.residuals.size() == ser.residuals.size());
  for (size_t i = 0; i < par.residuals.size(); ++i) CHECK(par.residuals[i] == ser.residuals[i]);
  CHECK(par.max_residual == ser.max_residual);
  CHECK(par.worst_index == ser.worst_index);
}

TEST_CASE("worst index is the lowest index attaining the max") {
  auto fn = [](int i) { return (i == 3 || i == 7) ? 2.0 : 1.0; };
  ScanResult r = scan_residuals_serial(10, fn);
  CHECK(r.worst_index == 3);
  CHECK(r.max_residual == 2.0);
}

TEST_CASE("scan exceptions rethrow deterministically") {
  auto fn = [](int i) -> double {
    if (i >= 5) throw std::runtime_error("bad sample " + std::to_string(i));
    return 0.0;
  };
  set_parallel_scans(true);
  try {
    (void)scan_residuals(10, fn);
    FAIL("expected exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "bad sample 5");
  }
}

TEST_CASE("report pass flag obeys the strict inequality invariant") {
  CheckReport r;
  r.max_residual = 1e-7;
  r.tol = 1e-7;
  r.finalize();
  CHECK_FALSE(r.pass);
  r.max_residual = 0.999e-7;
  r.finalize();
  CHECK(r.pass);
}

TEST_CASE("run report serialization is deterministic and round-trips") {
  RunReport r;
  r.scenario = "demo";
  r.seed = 42;
  r.n_samples = 3;
  r.basepoint_variant = 1;
  r.tol_overrides = {{"dirac-lagrangian", 1e-6}};
  CheckReport c;
  c.name = "demo-check";
  c.anchor = "residual of <s,s>";
  c.max_residual = 1.25e-9;
  c.tol = 1e-7;
  c.n_points = 3;
  c.worst_point = Eigen::Vector3d(0.1, -0.2, 0.33);
  c.worst_chart = "m";
  c.note = "";
  c.finalize();
  r.checks.push_back(c);
  r.samples["m"] = {Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(4, 5, 6)};

  std::string s1 = to_json_string(r);
  std::string s2 = to_json_string(r);
  CHECK(s1 == s2);

  RunReport back = run_report_from_json(s1);
  CHECK(to_json_string(back) == s1);
  CHECK(back.all_pass());
  CHECK(back.checks[0].worst_point(2) == doctest::Approx(0.33));
  CHECK(back.samples.at("m").size() == 2);
}

TEST_CASE("atomic write replaces the target completely") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "diracv_report_test.json";
  write_text_atomic(p.string(), "first");
  write_text_atomic(p.string(), "second-longer");
  std::ifstream in(p);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "second-longer");
  fs::remove(p);
}
