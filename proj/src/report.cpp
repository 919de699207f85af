#include <dirac/report.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dirac {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

json check_to_json(const CheckReport& c) {
  json j;
  j["name"] = c.name;
  j["anchor"] = c.anchor;
  j["max_residual"] = c.max_residual;
  j["tol"] = c.tol;
  j["pass"] = c.pass;
  j["n_points"] = c.n_points;
  j["worst_point"] = vec_to_json(c.worst_point);
  j["worst_chart"] = c.worst_chart;
  j["note"] = c.note;
  return j;
}

CheckReport check_from_json(const json& j) {
  CheckReport c;
  c.name = j.at("name").get<std::string>();
  c.anchor = j.at("anchor").get<std::string>();
  c.max_residual = j.at("max_residual").get<double>();
  c.tol = j.at("tol").get<double>();
  c.pass = j.at("pass").get<bool>();
  c.n_points = j.at("n_points").get<int>();
  c.worst_point = vec_from_json(j.at("worst_point"));
  c.worst_chart = j.at("worst_chart").get<std::string>();
  c.note = j.at("note").get<std::string>();
  return c;
}

}  // namespace

bool RunReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string to_json_string(const RunReport& r) {
  json j;
  j["all_pass"] = r.all_pass();
  json cfg;
  cfg["scenario"] = r.scenario;
  cfg["seed"] = r.seed;
  cfg["n_samples"] = r.n_samples;
  cfg["basepoint_variant"] = r.basepoint_variant;
  cfg["tolerance_overrides"] = json(r.tol_overrides);
  j["config"] = cfg;
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_to_json(c));
  j["checks"] = checks;
  json samples;
  for (const auto& [chart, pts] : r.samples) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(vec_to_json(p));
    samples[chart] = a;
  }
  j["samples"] = samples;
  return j.dump(2);
}

std::string to_json_string(const CheckReport& r) { return check_to_json(r).dump(2); }

RunReport run_report_from_json(const std::string& text) {
  json j = json::parse(text);
  RunReport r;
  const json& cfg = j.at("config");
  r.scenario = cfg.at("scenario").get<std::string>();
  r.seed = cfg.at("seed").get<uint64_t>();
  r.n_samples = cfg.at("n_samples").get<int>();
  r.basepoint_variant = cfg.at("basepoint_variant").get<int>();
  r.tol_overrides = cfg.at("tolerance_overrides").get<std::map<std::string, double>>();
  for (const auto& c : j.at("checks")) r.checks.push_back(check_from_json(c));
  for (auto it = j.at("samples").begin(); it != j.at("samples").end(); ++it) {
    std::vector<Eigen::VectorXd> pts;
    for (const auto& p : it.value()) pts.push_back(vec_from_json(p));
    r.samples[it.key()] = std::move(pts);
  }
  return r;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string point_string(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x(i);
  }
  os << ")";
  return os.str();
}

}  // namespace dirac
