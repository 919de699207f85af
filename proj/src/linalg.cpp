#include <dirac/linalg.hpp>

namespace dirac {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXd> full_svd(const Eigen::MatrixXd& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

}  // namespace

int mat_rank(const Eigen::MatrixXd& a, double tol) {
  if (a.size() == 0) return 0;
  auto sv = full_svd(a).singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

double min_singular_value(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  auto sv = full_svd(a).singularValues();
  // singular values are sorted descending; the relevant minimum is the
  // min(rows, cols)-th one
  return sv(sv.size() - 1);
}

Eigen::MatrixXd col_space(const Eigen::MatrixXd& a, double tol) {
  if (a.size() == 0) return Eigen::MatrixXd(a.rows(), 0);
  auto svd = full_svd(a);
  int r = 0;
  auto sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return svd.matrixU().leftCols(r);
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double tol) {
  if (a.size() == 0) return Eigen::MatrixXd::Identity(a.cols(), a.cols());
  auto svd = full_svd(a);
  auto sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return svd.matrixV().rightCols(a.cols() - r);
}

double subspace_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  Eigen::Index n = a.rows() ? a.rows() : b.rows();
  Eigen::MatrixXd pa = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd pb = Eigen::MatrixXd::Zero(n, n);
  if (a.size()) {
    Eigen::MatrixXd qa = col_space(a, tol);
    pa = qa * qa.transpose();
  }
  if (b.size()) {
    Eigen::MatrixXd qb = col_space(b, tol);
    pb = qb * qb.transpose();
  }
  return (pa - pb).norm();
}

Eigen::VectorXd lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

double lstsq_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.cols() == 0) return b.norm();
  return (a * lstsq(a, b) - b).norm();
}

double span_distance(const Eigen::MatrixXd& a, const Eigen::VectorXd& v) {
  return lstsq_residual(a, v);
}

}  // namespace dirac
