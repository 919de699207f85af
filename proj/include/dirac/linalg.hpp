#pragma once

// Dense linear algebra helpers.  Double-precision decompositions go through
// Eigen; a small scalar-templated Gaussian solver covers systems whose
// entries are dual numbers (Eigen is not instantiated on custom scalars).

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include <dirac/dual.hpp>

namespace dirac {

// Singular values below this are treated as zero by rank-revealing helpers
// unless the caller overrides the threshold.
inline constexpr double kRankTol = 1e-8;

int mat_rank(const Eigen::MatrixXd& a, double tol = kRankTol);
double min_singular_value(const Eigen::MatrixXd& a);

// Orthonormal basis of the column space / kernel of a.
Eigen::MatrixXd col_space(const Eigen::MatrixXd& a, double tol = kRankTol);
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double tol = kRankTol);

// Frobenius norm of the difference of the orthogonal projectors onto the
// column spaces of a and b; zero exactly when the subspaces coincide.
double subspace_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         double tol = kRankTol);

// Minimum-norm least-squares solution of a x = b and the residual norm
// |a x - b|.
Eigen::VectorXd lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);
double lstsq_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// Euclidean distance from v to the column span of a.
double span_distance(const Eigen::MatrixXd& a, const Eigen::VectorXd& v);

// Row-major dense matrix over an arbitrary scalar type.
template <class T>
struct TMat {
  int rows = 0, cols = 0;
  std::vector<T> a;

  TMat() = default;
  TMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

  T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

template <class T>
std::vector<T> matvec(const TMat<T>& m, const std::vector<T>& x) {
  std::vector<T> y(m.rows, T(0));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) y[i] += m(i, j) * x[j];
  return y;
}

template <class T>
std::vector<T> matTvec(const TMat<T>& m, const std::vector<T>& x) {
  std::vector<T> y(m.cols, T(0));
  for (int j = 0; j < m.cols; ++j)
    for (int i = 0; i < m.rows; ++i) y[j] += m(i, j) * x[i];
  return y;
}

// Solves the square system m x = b by Gaussian elimination, pivoting on the
// magnitude of the primal part.  m must be nonsingular at the primal level.
template <class T>
std::vector<T> solve_linear(TMat<T> m, std::vector<T> b) {
  const int n = m.rows;
  if (m.cols != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_linear: shape mismatch");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(primal(m(k, k)));
    for (int i = k + 1; i < n; ++i) {
      double cand = std::abs(primal(m(i, k)));
      if (cand > best) {
        best = cand;
        piv = i;
      }
    }
    if (best == 0.0) throw std::runtime_error("solve_linear: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      T f = m(i, k) / m(k, k);
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<T> x(n, T(0));
  for (int i = n - 1; i >= 0; --i) {
    T s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

// Least squares through the normal equations; requires full column rank at
// the primal level.  Exact when the system is consistent.
template <class T>
std::vector<T> lstsq_normal(const TMat<T>& m, const std::vector<T>& b) {
  TMat<T> g(m.cols, m.cols);
  for (int i = 0; i < m.cols; ++i)
    for (int j = 0; j < m.cols; ++j) {
      T s(0);
      for (int k = 0; k < m.rows; ++k) s += m(k, i) * m(k, j);
      g(i, j) = s;
    }
  return solve_linear(std::move(g), matTvec(m, b));
}

}  // namespace dirac
