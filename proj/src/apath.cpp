#include <dirac/apath.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dirac {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

std::string node_chart(double t) {
  std::ostringstream s;
  s << "t=" << t;
  return s.str();
}

}  // namespace

Eigen::VectorXd APath::velocity(int i) const {
  const int n_int = intervals();
  require(n_int >= 2, "path velocity needs at least 2 intervals");
  const double h = 1.0 / n_int;
  if (i == 0) return (-3.0 * base.row(0) + 4.0 * base.row(1) - base.row(2)) / (2.0 * h);
  if (i == n_int)
    return (3.0 * base.row(n_int) - 4.0 * base.row(n_int - 1) + base.row(n_int - 2)) /
           (2.0 * h);
  return (base.row(i + 1) - base.row(i - 1)) / (2.0 * h);
}

APath sample_apath(const SmoothMap& base, const SmoothMap& coeff, int n_intervals) {
  require(base.in_dim() == 1 && coeff.in_dim() == 1, "path closures must take the single input t");
  require(n_intervals >= 2, "path sampling needs at least 2 intervals");
  APath p;
  p.base.resize(n_intervals + 1, base.out_dim());
  p.coeff.resize(n_intervals + 1, coeff.out_dim());
  Eigen::VectorXd t(1);
  for (int i = 0; i <= n_intervals; ++i) {
    t(0) = static_cast<double>(i) / n_intervals;
    p.base.row(i) = base.values(t);
    p.coeff.row(i) = coeff.values(t);
  }
  return p;
}

Eigen::VectorXd integrate_columns(const Eigen::MatrixXd& samples) {
  const int n_int = static_cast<int>(samples.rows()) - 1;
  require(n_int >= 2, "quadrature needs at least 2 intervals");
  const double h = 1.0 / n_int;
  if (n_int % 2 == 0) {
    Eigen::VectorXd acc = samples.row(0) + samples.row(n_int);
    for (int i = 1; i < n_int; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * samples.row(i);
    return (h / 3.0) * acc;
  }
  Eigen::VectorXd acc = 0.5 * (samples.row(0) + samples.row(n_int));
  for (int i = 1; i < n_int; ++i) acc += samples.row(i);
  return h * acc;
}

CheckReport check_apath(const APath& path, const AnchoredAlgebroid& a, double tol) {
  require(path.dim() == a.n && path.rank() == a.rank,
          "check_apath: path does not fit the algebroid");
  require(path.intervals() >= 2, "check_apath: path needs at least 2 intervals");
  std::vector<ChartPoint> pts(path.intervals() + 1);
  for (int i = 0; i <= path.intervals(); ++i)
    pts[i] = ChartPoint{node_chart(path.time(i)), path.base.row(i)};
  auto fn = [&](int i) {
    Eigen::VectorXd x = path.base.row(i);
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(a.n);
    for (int j = 0; j < a.rank; ++j) rho += path.coeff(i, j) * a.anchor[j].values(x);
    return (rho - path.velocity(i)).norm();
  };
  return report_from_scan("apath-condition", "rho(a(t)) = dx/dt along the path", tol, pts, fn);
}

Eigen::VectorXd integrate_J(const APath& path, const AnchoredAlgebroid& a, const IMForm& mu,
                            const GroupActionData& act) {
  require(path.dim() == a.n && path.rank() == a.rank,
          "integrate_J: path does not fit the algebroid");
  require(mu.size() == a.rank, "integrate_J: one form per frame generator required");
  require(path.intervals() >= 2, "integrate_J: path needs at least 2 intervals");
  const int d = act.dim();
  Eigen::MatrixXd g(path.intervals() + 1, d);
  for (int i = 0; i <= path.intervals(); ++i) {
    Eigen::VectorXd x = path.base.row(i);
    Eigen::VectorXd mua = Eigen::VectorXd::Zero(a.n);
    for (int j = 0; j < a.rank; ++j) mua += path.coeff(i, j) * mu.values[j].values(x);
    for (int u = 0; u < d; ++u) g(i, u) = mua.dot(act.generators[u].values(x));
  }
  return integrate_columns(g);
}

Eigen::VectorXd integrate_vector_path(const APath& path) { return integrate_columns(path.coeff); }

APath concat(const APath& p1, const APath& p2) {
  require(p1.dim() == p2.dim() && p1.rank() == p2.rank(), "concat: path shapes differ");
  require(p1.intervals() == p2.intervals(), "concat: interval counts differ");
  const int n_int = p1.intervals();
  if ((p1.base.row(n_int) - p2.base.row(0)).norm() > 1e-9)
    throw std::invalid_argument("concat: base endpoint mismatch");

  APath out;
  out.base.resize(2 * n_int + 1, p1.dim());
  out.coeff.resize(2 * n_int + 1, p1.rank());
  out.base.topRows(n_int) = p1.base.topRows(n_int);
  out.coeff.topRows(n_int) = 2.0 * p1.coeff.topRows(n_int);
  out.base.row(n_int) = 0.5 * (p1.base.row(n_int) + p2.base.row(0));
  out.coeff.row(n_int) = p1.coeff.row(n_int) + p2.coeff.row(0);
  out.base.bottomRows(n_int) = p2.base.bottomRows(n_int);
  out.coeff.bottomRows(n_int) = 2.0 * p2.coeff.bottomRows(n_int);
  return out;
}

Eigen::MatrixXd BundleMap::fiber_at(const Eigen::VectorXd& x) const {
  Eigen::VectorXd v = fiber.values(x);
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(v.data(), rows, cols);
}

APath map_apath(const BundleMap& psi, const APath& path) {
  require(psi.cols == path.rank(), "map_apath: fiber matrix width vs path rank");
  require(psi.fiber.out_dim() == psi.rows * psi.cols, "map_apath: fiber map shape");
  require(psi.fiber.in_dim() == path.dim(), "map_apath: fiber map domain vs path base");
  if (psi.base) require(psi.base->in_dim() == path.dim(), "map_apath: base map domain");

  APath out;
  const int nodes = path.intervals() + 1;
  out.base.resize(nodes, psi.base ? psi.base->out_dim() : path.dim());
  out.coeff.resize(nodes, psi.rows);
  for (int i = 0; i < nodes; ++i) {
    Eigen::VectorXd x = path.base.row(i);
    out.base.row(i) = psi.base ? psi.base->values(x) : x;
    out.coeff.row(i) = psi.fiber_at(x) * path.coeff.row(i).transpose();
  }
  return out;
}

std::pair<APath, CheckReport> map_apath_checked(const BundleMap& psi, const APath& path,
                                                const AnchoredAlgebroid& target, double tol) {
  APath image = map_apath(psi, path);
  CheckReport rep = check_apath(image, target, tol);
  return {std::move(image), std::move(rep)};
}

}  // namespace dirac
