#pragma once

// Coordinate-free calculus operators built on the field layer.  Operators
// that differentiate (differential, exterior derivative, Lie bracket,
// pullback) consume one AD depth level from their operands; the purely
// algebraic ones (contractions, sums, products) consume none.

#include <Eigen/Dense>

#include <dirac/fields.hpp>

namespace dirac {

SmoothMap compose(const SmoothMap& f, const SmoothMap& g);  // x -> f(g(x))
SmoothMap identity_map(int n);
SmoothMap linear_smooth_map(const Eigen::MatrixXd& a);

// c1 * a + c2 * b, pointwise; any handle type.
CorePtr sum_core(const CorePtr& a, const CorePtr& b, double c1, double c2);
// pointwise product of a scalar field with any field
CorePtr scalar_mul_core(const CorePtr& f, const CorePtr& a);

template <class H>
H field_sum(const H& a, const H& b, double c1 = 1.0, double c2 = 1.0) {
  return H(sum_core(a.core_ptr(), b.core_ptr(), c1, c2));
}
template <class H>
H field_scale(const H& a, double c) {
  return H(sum_core(a.core_ptr(), a.core_ptr(), c, 0.0));
}
template <class H>
H field_mul(const ScalarField& f, const H& a) {
  return H(scalar_mul_core(f.core_ptr(), a.core_ptr()));
}

ScalarField scalar_const(int n, double c);
ScalarField coordinate_field(int n, int i);  // x -> x_i
VectorField constant_vector_field(const Eigen::VectorXd& v);
OneForm constant_one_form(const Eigen::VectorXd& a);
VectorField zero_vector_field(int n);
OneForm zero_one_form(int n);
VectorField basis_vector_field(int n, int i);
OneForm coordinate_one_form(int n, int i);  // dx_i

// constant coefficient matrices; both must be antisymmetric
TwoForm constant_twoform(const Eigen::MatrixXd& w);
BivectorField constant_bivector(const Eigen::MatrixXd& p);
// sum dx_i ^ dx_{m+i} on R^{2m}
TwoForm canonical_symplectic_form(int m);

// df, as a 1-form
OneForm differential(const ScalarField& f);
// (d alpha)_ij = d_i alpha_j - d_j alpha_i; output exactly antisymmetric
TwoForm exterior_derivative(const OneForm& alpha);
// (DY)X - (DX)Y
VectorField lie_bracket(const VectorField& x, const VectorField& y);
// (i_X w)_j = sum_i X_i w_ij
OneForm interior_product(const VectorField& x, const TwoForm& w);
// (pi# a)_j = sum_i a_i pi_ij
VectorField sharp(const BivectorField& pi, const OneForm& a);
// scalar field x -> alpha(x)(X(x))
ScalarField pairing_field(const OneForm& alpha, const VectorField& x);

// Cartan formula i_X d(alpha) + d(alpha(X))
OneForm lie_derivative_oneform(const VectorField& x, const OneForm& alpha);
// X . f
ScalarField lie_derivative_scalar(const VectorField& x, const ScalarField& f);

ScalarField pullback_scalar(const SmoothMap& phi, const ScalarField& f);
// (phi* b)(x) = Dphi(x)^T b(phi(x))
OneForm pullback_oneform(const SmoothMap& phi, const OneForm& b);
// (phi* w)(x) = Dphi(x)^T w(phi(x)) Dphi(x)
TwoForm pullback_twoform(const SmoothMap& phi, const TwoForm& w);

// pointwise Dphi(x) . v
Eigen::VectorXd pushforward_vector(const SmoothMap& phi, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v);

// Poisson bracket of two scalar fields under the bivector pi
ScalarField poisson_bracket(const BivectorField& pi, const ScalarField& f,
                            const ScalarField& g);

}  // namespace dirac
