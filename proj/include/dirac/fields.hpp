#pragma once

// Type-erased smooth maps R^n -> R^m evaluable on plain doubles and on dual
// numbers nested up to three levels.  Every geometric object (scalar field,
// vector field, 1-form, 2-form, bivector, chart map) wraps a shared MapCore,
// so composition builds immutable evaluation DAGs that are safe to evaluate
// concurrently.
//
// depth() is the number of derivative levels an object supports through this
// interface.  Leaves built from raw templated functions support 3; operators
// that differentiate internally (exterior derivative, Lie bracket, pullback)
// hand out one level less than their operands.

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <dirac/dual.hpp>

namespace dirac {

struct EvalDepthError : std::logic_error {
  EvalDepthError(int wanted, int have)
      : std::logic_error("evaluation at derivative depth " + std::to_string(wanted) +
                         " requested, but the map supports depth " + std::to_string(have)) {}
};

class MapCore {
 public:
  virtual ~MapCore() = default;
  virtual int in_dim() const = 0;
  virtual int out_dim() const = 0;
  virtual int depth() const = 0;
  virtual void eval0(std::span<const D0> x, std::span<D0> y) const = 0;
  virtual void eval1(std::span<const D1> x, std::span<D1> y) const = 0;
  virtual void eval2(std::span<const D2> x, std::span<D2> y) const = 0;
  virtual void eval3(std::span<const D3> x, std::span<D3> y) const = 0;
};

template <class T>
inline constexpr int dual_depth = -1;
template <>
inline constexpr int dual_depth<D0> = 0;
template <>
inline constexpr int dual_depth<D1> = 1;
template <>
inline constexpr int dual_depth<D2> = 2;
template <>
inline constexpr int dual_depth<D3> = 3;

template <class T>
void eval_map(const MapCore& f, std::span<const T> x, std::span<T> y) {
  if constexpr (std::is_same_v<T, D0>)
    f.eval0(x, y);
  else if constexpr (std::is_same_v<T, D1>)
    f.eval1(x, y);
  else if constexpr (std::is_same_v<T, D2>)
    f.eval2(x, y);
  else
    f.eval3(x, y);
}

// CRTP adapter: Derived supplies a scalar-templated
//   template <class T> void evalT(std::span<const T>, std::span<T>) const
// and Cap bounds the depth it may be instantiated at (operators that use one
// derivative level internally set Cap = 2 so evalT<D3> is never compiled).
template <class Derived, int Cap>
class TypedCore : public MapCore {
 public:
  void eval0(std::span<const D0> x, std::span<D0> y) const final {
    self().template evalT<D0>(x, y);
  }
  void eval1(std::span<const D1> x, std::span<D1> y) const final {
    if constexpr (Cap >= 1)
      self().template evalT<D1>(x, y);
    else
      throw EvalDepthError(1, this->depth());
  }
  void eval2(std::span<const D2> x, std::span<D2> y) const final {
    if constexpr (Cap >= 2)
      self().template evalT<D2>(x, y);
    else
      throw EvalDepthError(2, this->depth());
  }
  void eval3(std::span<const D3> x, std::span<D3> y) const final {
    if constexpr (Cap >= 3)
      self().template evalT<D3>(x, y);
    else
      throw EvalDepthError(3, this->depth());
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// Leaf core wrapping a scalar-templated callable f(span<const T>, span<T>).
template <class F>
class LambdaCore final : public TypedCore<LambdaCore<F>, 3> {
 public:
  LambdaCore(int in, int out, F f) : in_(in), out_(out), f_(std::move(f)) {}
  int in_dim() const override { return in_; }
  int out_dim() const override { return out_; }
  int depth() const override { return 3; }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    f_(x, y);
  }

 private:
  int in_, out_;
  F f_;
};

using CorePtr = std::shared_ptr<const MapCore>;

template <class F>
CorePtr make_lambda_core(int in, int out, F f) {
  return std::make_shared<LambdaCore<F>>(in, out, std::move(f));
}

// Shared handle plumbing for all field wrappers.
class MapHandle {
 public:
  MapHandle() = default;
  explicit MapHandle(CorePtr core) : core_(std::move(core)) {}

  bool empty() const { return !core_; }
  const MapCore& core() const {
    if (!core_) throw std::logic_error("empty map handle");
    return *core_;
  }
  const CorePtr& core_ptr() const { return core_; }
  int in_dim() const { return core().in_dim(); }
  int out_dim() const { return core().out_dim(); }
  int depth() const { return core().depth(); }

  template <class T>
  void eval(std::span<const T> x, std::span<T> y) const {
    eval_map<T>(core(), x, y);
  }

  // Plain-double evaluation into an Eigen vector.
  Eigen::VectorXd values(const Eigen::VectorXd& x) const;

  // Jacobian J(i,j) = d out_i / d x_j by forward AD; needs depth >= 1.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

 protected:
  CorePtr core_;
};

// Value and Jacobian in one pass; the unit of work of all bulk check kernels.
struct Jet {
  Eigen::VectorXd value;
  Eigen::MatrixXd jac;
};
Jet eval_jet(const MapCore& f, const Eigen::VectorXd& x);

class SmoothMap : public MapHandle {
 public:
  using MapHandle::MapHandle;
  template <class F>
  static SmoothMap from_lambda(int in, int out, F f) {
    return SmoothMap(make_lambda_core(in, out, std::move(f)));
  }
};

class VectorField : public MapHandle {
 public:
  using MapHandle::MapHandle;
  template <class F>
  static VectorField from_lambda(int n, F f) {
    return VectorField(make_lambda_core(n, n, std::move(f)));
  }
};

class OneForm : public MapHandle {
 public:
  using MapHandle::MapHandle;
  template <class F>
  static OneForm from_lambda(int n, F f) {
    return OneForm(make_lambda_core(n, n, std::move(f)));
  }
};

class ScalarField : public MapHandle {
 public:
  using MapHandle::MapHandle;

  // Wraps a scalar-templated callable T(span<const T> x).
  template <class F>
  static ScalarField from_function(int n, F f) {
    auto body = [f = std::move(f)](auto x, auto y) { y[0] = f(x); };
    return ScalarField(make_lambda_core(n, 1, std::move(body)));
  }

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
};

// n x n matrix-valued field stored row-major in the flat output.
class MatrixField : public MapHandle {
 public:
  using MapHandle::MapHandle;
  template <class F>
  static MatrixField from_lambda(int n, F f) {
    return MatrixField(make_lambda_core(n, n * n, std::move(f)));
  }
  int n() const;
  Eigen::MatrixXd matrix(const Eigen::VectorXd& x) const;
};

class TwoForm : public MatrixField {
 public:
  TwoForm() = default;
  explicit TwoForm(CorePtr core) : MatrixField(std::move(core)) {}
  explicit TwoForm(MatrixField m) : MatrixField(std::move(m)) {}
};

class BivectorField : public MatrixField {
 public:
  BivectorField() = default;
  explicit BivectorField(CorePtr core) : MatrixField(std::move(core)) {}
  explicit BivectorField(MatrixField m) : MatrixField(std::move(m)) {}
};

// Largest |m + m^T| entry over the sampled points; the antisymmetry gate for
// user-supplied 2-forms and bivectors.
double antisymmetry_residual(const MatrixField& m, const std::vector<Eigen::VectorXd>& pts);

}  // namespace dirac
