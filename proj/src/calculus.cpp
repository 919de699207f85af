#include <dirac/calculus.hpp>

#include <algorithm>

namespace dirac {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

int min_depth(const CorePtr& a, const CorePtr& b) {
  return std::min(a->depth(), b->depth());
}

class ComposeCore final : public TypedCore<ComposeCore, 3> {
 public:
  ComposeCore(CorePtr f, CorePtr g) : f_(std::move(f)), g_(std::move(g)) {
    require(f_->in_dim() == g_->out_dim(), "compose: dimension mismatch");
  }
  int in_dim() const override { return g_->in_dim(); }
  int out_dim() const override { return f_->out_dim(); }
  int depth() const override { return min_depth(f_, g_); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    std::vector<T> mid(g_->out_dim());
    eval_map<T>(*g_, x, mid);
    eval_map<T>(*f_, mid, y);
  }

 private:
  CorePtr f_, g_;
};

class SumCore final : public TypedCore<SumCore, 3> {
 public:
  SumCore(CorePtr a, CorePtr b, double c1, double c2)
      : a_(std::move(a)), b_(std::move(b)), c1_(c1), c2_(c2) {
    require(a_->in_dim() == b_->in_dim() && a_->out_dim() == b_->out_dim(),
            "sum: dimension mismatch");
  }
  int in_dim() const override { return a_->in_dim(); }
  int out_dim() const override { return a_->out_dim(); }
  int depth() const override { return min_depth(a_, b_); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    const int m = a_->out_dim();
    std::vector<T> va(m), vb(m);
    eval_map<T>(*a_, x, va);
    eval_map<T>(*b_, x, vb);
    for (int i = 0; i < m; ++i) y[i] = c1_ * va[i] + c2_ * vb[i];
  }

 private:
  CorePtr a_, b_;
  double c1_, c2_;
};

class ScalarMulCore final : public TypedCore<ScalarMulCore, 3> {
 public:
  ScalarMulCore(CorePtr f, CorePtr a) : f_(std::move(f)), a_(std::move(a)) {
    require(f_->out_dim() == 1, "scalar_mul: first operand must be scalar");
    require(f_->in_dim() == a_->in_dim(), "scalar_mul: chart dimension mismatch");
  }
  int in_dim() const override { return a_->in_dim(); }
  int out_dim() const override { return a_->out_dim(); }
  int depth() const override { return min_depth(f_, a_); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    std::vector<T> s(1);
    eval_map<T>(*f_, x, s);
    std::vector<T> v(a_->out_dim());
    eval_map<T>(*a_, x, v);
    for (size_t i = 0; i < v.size(); ++i) y[i] = s[0] * v[i];
  }

 private:
  CorePtr f_, a_;
};

class ConstantCore final : public TypedCore<ConstantCore, 3> {
 public:
  ConstantCore(int in, Eigen::VectorXd v) : in_(in), v_(std::move(v)) {}
  int in_dim() const override { return in_; }
  int out_dim() const override { return static_cast<int>(v_.size()); }
  int depth() const override { return 3; }
  template <class T>
  void evalT(std::span<const T>, std::span<T> y) const {
    for (Eigen::Index i = 0; i < v_.size(); ++i) y[i] = T(v_(i));
  }

 private:
  int in_;
  Eigen::VectorXd v_;
};

class LinearCore final : public TypedCore<LinearCore, 3> {
 public:
  explicit LinearCore(Eigen::MatrixXd a) : a_(std::move(a)) {}
  int in_dim() const override { return static_cast<int>(a_.cols()); }
  int out_dim() const override { return static_cast<int>(a_.rows()); }
  int depth() const override { return 3; }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      T s(0);
      for (Eigen::Index j = 0; j < a_.cols(); ++j) s += a_(i, j) * x[j];
      y[i] = s;
    }
  }

 private:
  Eigen::MatrixXd a_;
};

// One derivative level consumed: d of a scalar map.
class DifferentialCore final : public TypedCore<DifferentialCore, 2> {
 public:
  explicit DifferentialCore(CorePtr f) : f_(std::move(f)) {
    require(f_->out_dim() == 1, "differential: operand must be scalar");
    require(f_->depth() >= 1, "differential: operand not differentiable");
  }
  int in_dim() const override { return f_->in_dim(); }
  int out_dim() const override { return f_->in_dim(); }
  int depth() const override { return std::min(2, f_->depth() - 1); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    const int n = f_->in_dim();
    std::vector<Dual<T>> in(n), out(1);
    for (int dir = 0; dir < n; ++dir) {
      for (int i = 0; i < n; ++i) in[i] = Dual<T>(x[i], T(i == dir ? 1 : 0));
      eval_map<Dual<T>>(*f_, in, out);
      y[dir] = out[0].d;
    }
  }

 private:
  CorePtr f_;
};

class ExteriorDerivativeCore final : public TypedCore<ExteriorDerivativeCore, 2> {
 public:
  explicit ExteriorDerivativeCore(CorePtr a) : a_(std::move(a)) {
    require(a_->in_dim() == a_->out_dim(), "exterior_derivative: operand must be a 1-form");
    require(a_->depth() >= 1, "exterior_derivative: operand not differentiable");
  }
  int in_dim() const override { return a_->in_dim(); }
  int out_dim() const override {
    int n = a_->in_dim();
    return n * n;
  }
  int depth() const override { return std::min(2, a_->depth() - 1); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    const int n = a_->in_dim();
    std::vector<Dual<T>> in(n), out(n);
    std::vector<T> jac(static_cast<size_t>(n) * n);  // jac[j*n+i] = d_i alpha_j
    for (int dir = 0; dir < n; ++dir) {
      for (int i = 0; i < n; ++i) in[i] = Dual<T>(x[i], T(i == dir ? 1 : 0));
      eval_map<Dual<T>>(*a_, in, out);
      for (int j = 0; j < n; ++j) jac[static_cast<size_t>(j) * n + dir] = out[j].d;
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        y[static_cast<size_t>(i) * n + j] =
            jac[static_cast<size_t>(j) * n + i] - jac[static_cast<size_t>(i) * n + j];
  }

 private:
  CorePtr a_;
};

class BracketCore final : public TypedCore<BracketCore, 2> {
 public:
  BracketCore(CorePtr x, CorePtr y) : x_(std::move(x)), y_(std::move(y)) {
    require(x_->in_dim() == y_->in_dim() && x_->out_dim() == x_->in_dim() &&
                y_->out_dim() == y_->in_dim(),
            "lie_bracket: operands must be vector fields on one chart");
    require(x_->depth() >= 1 && y_->depth() >= 1, "lie_bracket: operand not differentiable");
  }
  int in_dim() const override { return x_->in_dim(); }
  int out_dim() const override { return x_->in_dim(); }
  int depth() const override { return std::min(2, min_depth(x_, y_) - 1); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    const int n = x_->in_dim();
    std::vector<T> xv(n), yv(n);
    eval_map<T>(*x_, x, xv);
    eval_map<T>(*y_, x, yv);
    std::vector<Dual<T>> in(n), out(n);
    for (int i = 0; i < n; ++i) in[i] = Dual<T>(x[i], xv[i]);
    eval_map<Dual<T>>(*y_, in, out);  // out[i].d = (DY X)_i
    for (int i = 0; i < n; ++i) y[i] = out[i].d;
    for (int i = 0; i < n; ++i) in[i] = Dual<T>(x[i], yv[i]);
    eval_map<Dual<T>>(*x_, in, out);  // out[i].d = (DX Y)_i
    for (int i = 0; i < n; ++i) y[i] -= out[i].d;
  }

 private:
  CorePtr x_, y_;
};

class ContractTwoFormCore final : public TypedCore<ContractTwoFormCore, 3> {
 public:
  ContractTwoFormCore(CorePtr x, CorePtr w) : x_(std::move(x)), w_(std::move(w)) {
    require(w_->out_dim() == x_->in_dim() * x_->in_dim() && x_->out_dim() == x_->in_dim(),
            "interior_product: dimension mismatch");
  }
  int in_dim() const override { return x_->in_dim(); }
  int out_dim() const override { return x_->in_dim(); }
  int depth() const override { return min_depth(x_, w_); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    const int n = x_->in_dim();
    std::vector<T> xv(n), wv(static_cast<size_t>(n) * n);
    eval_map<T>(*x_, x, xv);
    eval_map<T>(*w_, x, wv);
    for (int j = 0; j < n; ++j) {
      T s(0);
      for (int i = 0; i < n; ++i) s += xv[i] * wv[static_cast<size_t>(i) * n + j];
      y[j] = s;
    }
  }

 private:
  CorePtr x_, w_;
};

// (pi# a)_j = sum_i a_i pi_ij; same contraction pattern with the covector on
// the first slot.
class SharpCore final : public TypedCore<SharpCore, 3> {
 public:
  SharpCore(CorePtr pi, CorePtr a) : pi_(std::move(pi)), a_(std::move(a)) {
    require(pi_->out_dim() == a_->in_dim() * a_->in_dim() && a_->out_dim() == a_->in_dim(),
            "sharp: dimension mismatch");
  }
  int in_dim() const override { return a_->in_dim(); }
  int out_dim() const override { return a_->in_dim(); }
  int depth() const override { return min_depth(pi_, a_); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    const int n = a_->in_dim();
    std::vector<T> av(n), pv(static_cast<size_t>(n) * n);
    eval_map<T>(*a_, x, av);
    eval_map<T>(*pi_, x, pv);
    for (int j = 0; j < n; ++j) {
      T s(0);
      for (int i = 0; i < n; ++i) s += av[i] * pv[static_cast<size_t>(i) * n + j];
      y[j] = s;
    }
  }

 private:
  CorePtr pi_, a_;
};

class PairCore final : public TypedCore<PairCore, 3> {
 public:
  PairCore(CorePtr a, CorePtr x) : a_(std::move(a)), x_(std::move(x)) {
    require(a_->in_dim() == x_->in_dim() && a_->out_dim() == x_->out_dim(),
            "pairing: dimension mismatch");
  }
  int in_dim() const override { return a_->in_dim(); }
  int out_dim() const override { return 1; }
  int depth() const override { return min_depth(a_, x_); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    const int n = a_->out_dim();
    std::vector<T> av(n), xv(n);
    eval_map<T>(*a_, x, av);
    eval_map<T>(*x_, x, xv);
    T s(0);
    for (int i = 0; i < n; ++i) s += av[i] * xv[i];
    y[0] = s;
  }

 private:
  CorePtr a_, x_;
};

class PullbackOneFormCore final : public TypedCore<PullbackOneFormCore, 2> {
 public:
  PullbackOneFormCore(CorePtr phi, CorePtr b) : phi_(std::move(phi)), b_(std::move(b)) {
    require(b_->in_dim() == phi_->out_dim() && b_->out_dim() == phi_->out_dim(),
            "pullback_oneform: form must live on the codomain");
    require(phi_->depth() >= 1, "pullback_oneform: map not differentiable");
  }
  int in_dim() const override { return phi_->in_dim(); }
  int out_dim() const override { return phi_->in_dim(); }
  int depth() const override { return std::min({2, phi_->depth() - 1, b_->depth()}); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    const int n = phi_->in_dim(), m = phi_->out_dim();
    std::vector<Dual<T>> in(n), out(m);
    std::vector<T> px(m), dphi(static_cast<size_t>(m) * n);
    for (int dir = 0; dir < n; ++dir) {
      for (int i = 0; i < n; ++i) in[i] = Dual<T>(x[i], T(i == dir ? 1 : 0));
      eval_map<Dual<T>>(*phi_, in, out);
      for (int j = 0; j < m; ++j) dphi[static_cast<size_t>(j) * n + dir] = out[j].d;
      if (dir == 0)
        for (int j = 0; j < m; ++j) px[j] = out[j].v;
    }
    std::vector<T> bv(m);
    eval_map<T>(*b_, px, bv);
    for (int a = 0; a < n; ++a) {
      T s(0);
      for (int j = 0; j < m; ++j) s += dphi[static_cast<size_t>(j) * n + a] * bv[j];
      y[a] = s;
    }
  }

 private:
  CorePtr phi_, b_;
};

class PullbackTwoFormCore final : public TypedCore<PullbackTwoFormCore, 2> {
 public:
  PullbackTwoFormCore(CorePtr phi, CorePtr w) : phi_(std::move(phi)), w_(std::move(w)) {
    require(w_->out_dim() == phi_->out_dim() * phi_->out_dim(),
            "pullback_twoform: form must live on the codomain");
    require(phi_->depth() >= 1, "pullback_twoform: map not differentiable");
  }
  int in_dim() const override { return phi_->in_dim(); }
  int out_dim() const override { return phi_->in_dim() * phi_->in_dim(); }
  int depth() const override { return std::min({2, phi_->depth() - 1, w_->depth()}); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    const int n = phi_->in_dim(), m = phi_->out_dim();
    std::vector<Dual<T>> in(n), out(m);
    std::vector<T> px(m), dphi(static_cast<size_t>(m) * n);
    for (int dir = 0; dir < n; ++dir) {
      for (int i = 0; i < n; ++i) in[i] = Dual<T>(x[i], T(i == dir ? 1 : 0));
      eval_map<Dual<T>>(*phi_, in, out);
      for (int j = 0; j < m; ++j) dphi[static_cast<size_t>(j) * n + dir] = out[j].d;
      if (dir == 0)
        for (int j = 0; j < m; ++j) px[j] = out[j].v;
    }
    std::vector<T> wv(static_cast<size_t>(m) * m);
    eval_map<T>(*w_, px, wv);
    // y_ab = sum_ij dphi_ia wv_ij dphi_jb
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        T s(0);
        for (int i = 0; i < m; ++i) {
          T row(0);
          for (int j = 0; j < m; ++j)
            row += wv[static_cast<size_t>(i) * m + j] * dphi[static_cast<size_t>(j) * n + b];
          s += dphi[static_cast<size_t>(i) * n + a] * row;
        }
        y[static_cast<size_t>(a) * n + b] = s;
      }
  }

 private:
  CorePtr phi_, w_;
};

}  // namespace

SmoothMap compose(const SmoothMap& f, const SmoothMap& g) {
  return SmoothMap(std::make_shared<ComposeCore>(f.core_ptr(), g.core_ptr()));
}

SmoothMap identity_map(int n) { return linear_smooth_map(Eigen::MatrixXd::Identity(n, n)); }

SmoothMap linear_smooth_map(const Eigen::MatrixXd& a) {
  return SmoothMap(std::make_shared<LinearCore>(a));
}

CorePtr sum_core(const CorePtr& a, const CorePtr& b, double c1, double c2) {
  return std::make_shared<SumCore>(a, b, c1, c2);
}

CorePtr scalar_mul_core(const CorePtr& f, const CorePtr& a) {
  return std::make_shared<ScalarMulCore>(f, a);
}

ScalarField scalar_const(int n, double c) {
  return ScalarField(std::make_shared<ConstantCore>(n, Eigen::VectorXd::Constant(1, c)));
}

ScalarField coordinate_field(int n, int i) {
  return ScalarField::from_function(n, [i](auto x) { return x[i]; });
}

VectorField constant_vector_field(const Eigen::VectorXd& v) {
  return VectorField(std::make_shared<ConstantCore>(static_cast<int>(v.size()), v));
}

OneForm constant_one_form(const Eigen::VectorXd& a) {
  return OneForm(std::make_shared<ConstantCore>(static_cast<int>(a.size()), a));
}

VectorField zero_vector_field(int n) {
  return constant_vector_field(Eigen::VectorXd::Zero(n));
}

OneForm zero_one_form(int n) { return constant_one_form(Eigen::VectorXd::Zero(n)); }

VectorField basis_vector_field(int n, int i) {
  return constant_vector_field(Eigen::VectorXd::Unit(n, i));
}

OneForm coordinate_one_form(int n, int i) {
  return constant_one_form(Eigen::VectorXd::Unit(n, i));
}

namespace {

CorePtr constant_matrix_core(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("constant matrix field must be square");
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > 0)
    throw std::invalid_argument("constant matrix field must be antisymmetric");
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd flat(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) flat(i * n + j) = m(i, j);
  return std::make_shared<ConstantCore>(n, flat);
}

}  // namespace

TwoForm constant_twoform(const Eigen::MatrixXd& w) { return TwoForm(constant_matrix_core(w)); }

BivectorField constant_bivector(const Eigen::MatrixXd& p) {
  return BivectorField(constant_matrix_core(p));
}

TwoForm canonical_symplectic_form(int m) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    w(i, m + i) = 1.0;
    w(m + i, i) = -1.0;
  }
  return constant_twoform(w);
}

OneForm differential(const ScalarField& f) {
  return OneForm(std::make_shared<DifferentialCore>(f.core_ptr()));
}

TwoForm exterior_derivative(const OneForm& alpha) {
  return TwoForm(std::make_shared<ExteriorDerivativeCore>(alpha.core_ptr()));
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  return VectorField(std::make_shared<BracketCore>(x.core_ptr(), y.core_ptr()));
}

OneForm interior_product(const VectorField& x, const TwoForm& w) {
  return OneForm(std::make_shared<ContractTwoFormCore>(x.core_ptr(), w.core_ptr()));
}

VectorField sharp(const BivectorField& pi, const OneForm& a) {
  return VectorField(std::make_shared<SharpCore>(pi.core_ptr(), a.core_ptr()));
}

ScalarField pairing_field(const OneForm& alpha, const VectorField& x) {
  return ScalarField(std::make_shared<PairCore>(alpha.core_ptr(), x.core_ptr()));
}

OneForm lie_derivative_oneform(const VectorField& x, const OneForm& alpha) {
  OneForm term1 = interior_product(x, exterior_derivative(alpha));
  OneForm term2 = differential(pairing_field(alpha, x));
  return field_sum(term1, term2);
}

ScalarField lie_derivative_scalar(const VectorField& x, const ScalarField& f) {
  return pairing_field(differential(f), x);
}

ScalarField pullback_scalar(const SmoothMap& phi, const ScalarField& f) {
  return ScalarField(
      std::make_shared<ComposeCore>(f.core_ptr(), phi.core_ptr()));
}

OneForm pullback_oneform(const SmoothMap& phi, const OneForm& b) {
  return OneForm(std::make_shared<PullbackOneFormCore>(phi.core_ptr(), b.core_ptr()));
}

TwoForm pullback_twoform(const SmoothMap& phi, const TwoForm& w) {
  return TwoForm(std::make_shared<PullbackTwoFormCore>(phi.core_ptr(), w.core_ptr()));
}

Eigen::VectorXd pushforward_vector(const SmoothMap& phi, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v) {
  if (v.size() != phi.in_dim()) throw std::invalid_argument("pushforward_vector: bad vector");
  return phi.jacobian(x) * v;
}

ScalarField poisson_bracket(const BivectorField& pi, const ScalarField& f,
                            const ScalarField& g) {
  // {f, g} = sum_ij pi_ij d_i f d_j g = <df, pi#(dg)>... with our sharp
  // convention (pi# a)_j = sum_i a_i pi_ij this is pairing(dg, pi#(df)).
  return pairing_field(differential(g), sharp(pi, differential(f)));
}

}  // namespace dirac
