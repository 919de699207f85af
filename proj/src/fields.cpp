#include <dirac/fields.hpp>

namespace dirac {

namespace {

std::vector<D1> seeded(const Eigen::VectorXd& x, int dir) {
  std::vector<D1> v(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) v[i] = D1(x(i), i == dir ? 1.0 : 0.0);
  return v;
}

}  // namespace

Eigen::VectorXd MapHandle::values(const Eigen::VectorXd& x) const {
  std::vector<D0> in(x.data(), x.data() + x.size());
  std::vector<D0> out(out_dim());
  eval<D0>(in, out);
  return Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
}

Eigen::MatrixXd MapHandle::jacobian(const Eigen::VectorXd& x) const {
  const int n = in_dim(), m = out_dim();
  Eigen::MatrixXd j(m, n);
  std::vector<D1> out(m);
  for (int dir = 0; dir < n; ++dir) {
    auto in = seeded(x, dir);
    eval<D1>(in, out);
    for (int i = 0; i < m; ++i) j(i, dir) = out[i].d;
  }
  return j;
}

Jet eval_jet(const MapCore& f, const Eigen::VectorXd& x) {
  const int n = f.in_dim(), m = f.out_dim();
  Jet jet{Eigen::VectorXd(m), Eigen::MatrixXd(m, n)};
  std::vector<D1> out(m);
  for (int dir = 0; dir < n; ++dir) {
    auto in = seeded(x, dir);
    eval_map<D1>(f, in, out);
    for (int i = 0; i < m; ++i) jet.jac(i, dir) = out[i].d;
    if (dir == 0)
      for (int i = 0; i < m; ++i) jet.value(i) = out[i].v;
  }
  if (n == 0) {
    std::vector<D0> in0, out0(m);
    eval_map<D0>(f, in0, out0);
    for (int i = 0; i < m; ++i) jet.value(i) = out0[i];
  }
  return jet;
}

double ScalarField::value(const Eigen::VectorXd& x) const { return values(x)(0); }

Eigen::VectorXd ScalarField::gradient(const Eigen::VectorXd& x) const {
  return jacobian(x).row(0);
}

Eigen::MatrixXd ScalarField::hessian(const Eigen::VectorXd& x) const {
  const int n = in_dim();
  Eigen::MatrixXd h(n, n);
  std::vector<D2> in(n), out(1);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      for (int i = 0; i < n; ++i)
        in[i] = D2(D1(x(i), i == a ? 1.0 : 0.0), D1(i == b ? 1.0 : 0.0, 0.0));
      eval<D2>(in, out);
      h(a, b) = out[0].d.d;
      h(b, a) = h(a, b);
    }
  return h;
}

int MatrixField::n() const { return in_dim(); }

Eigen::MatrixXd MatrixField::matrix(const Eigen::VectorXd& x) const {
  const int k = n();
  Eigen::VectorXd flat = values(x);
  Eigen::MatrixXd m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = flat(i * k + j);
  return m;
}

double antisymmetry_residual(const MatrixField& m, const std::vector<Eigen::VectorXd>& pts) {
  double worst = 0.0;
  for (const auto& x : pts) {
    Eigen::MatrixXd a = m.matrix(x);
    worst = std::max(worst, (a + a.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace dirac
