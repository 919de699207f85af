#pragma once

// Unit-quaternion realization of SU(2) in a single exponential chart
// a -> g0 * exp(a . e) around a basepoint g0, where e_i = u_i / 2 are the
// half quaternion units, so [e_i, e_j] = eps_ijk e_k.  Group multiplication
// and the invariant vector fields come from quaternion algebra differentiated
// by forward AD, which keeps them exact to roundoff at every supported depth.
//
// The chart is valid while rotation angles stay below pi (quaternion scalar
// part positive); callers confine coordinates to boxes that guarantee this.

#include <array>
#include <dirac/fields.hpp>

namespace dirac {
namespace quat {

template <class T>
using Q = std::array<T, 4>;  // (w, x, y, z)

template <class T>
Q<T> mul(const Q<T>& a, const Q<T>& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

template <class T>
Q<T> conjugate(const Q<T>& q) {
  return {q[0], -q[1], -q[2], -q[3]};
}

// sin(sqrt(s)/2)/sqrt(s) and cos(sqrt(s)/2) as functions of s = |a|^2; the
// series branch keeps values and dual payloads finite through a = 0.
template <class T>
T half_sinc(const T& s) {
  if (primal(s) < 1e-4) return 0.5 - s / 48.0 + (s * s) / 3840.0;
  T r = sqrt(s);
  return sin(r * 0.5) / r;
}
template <class T>
T half_cos(const T& s) {
  if (primal(s) < 1e-4) return 1.0 - s / 8.0 + (s * s) / 384.0;
  return cos(sqrt(s) * 0.5);
}
// 2 atan(sqrt(s)/w)/sqrt(s), analytic in s on the w > 0 branch
template <class T>
T half_atan_factor(const T& s, const T& w) {
  if (primal(s) < 1e-4) {
    T q = s / (w * w);
    return (2.0 - q * (2.0 / 3.0 - q * (2.0 / 5.0 - q * (2.0 / 7.0)))) / w;
  }
  T r = sqrt(s);
  return 2.0 * atan(r / w) / r;
}

// exp(sum a_i e_i): the rotation by angle |a| about a-hat.
template <class T>
Q<T> exp_chart(const std::array<T, 3>& a) {
  T s2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
  T s = half_sinc(s2);
  return {half_cos(s2), a[0] * s, a[1] * s, a[2] * s};
}

// Inverse of exp_chart on the w > 0 half space (angle below pi).
template <class T>
std::array<T, 3> log_chart(const Q<T>& q) {
  T s2 = q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
  T k = half_atan_factor(s2, q[0]);
  return {q[1] * k, q[2] * k, q[3] * k};
}

// exp(t e_i); smooth through t = 0, unlike exp_chart.
template <class T>
Q<T> axis_turn(int i, const T& t) {
  Q<T> q{cos(t * 0.5), T(0), T(0), T(0)};
  q[1 + i] = sin(t * 0.5);
  return q;
}

template <class T>
Q<T> promote(const Q<double>& q) {
  return {T(q[0]), T(q[1]), T(q[2]), T(q[3])};
}

// d/dt at t = 0 of the chart coordinates of chart(a) exp(t e_i): the value of
// the left-invariant frame at a (independent of the chart basepoint).
template <class T>
std::array<T, 3> left_invariant_value(std::span<const T> a, int i) {
  using D = Dual<T>;
  Q<D> qa = exp_chart<D>({D(a[0]), D(a[1]), D(a[2])});
  auto out = log_chart(mul(qa, axis_turn(i, D(T(0), T(1)))));
  return {out[0].d, out[1].d, out[2].d};
}

// Same for exp(t e_i) chart(a): the right-invariant frame, which picks up a
// conjugation by the basepoint g0.
template <class T>
std::array<T, 3> right_invariant_value(const Q<double>& g0, std::span<const T> a, int i) {
  using D = Dual<T>;
  Q<D> qa = exp_chart<D>({D(a[0]), D(a[1]), D(a[2])});
  Q<D> g0q = promote<D>(g0);
  auto moved = mul(conjugate(g0q), mul(axis_turn(i, D(T(0), T(1))), mul(g0q, qa)));
  auto out = log_chart(moved);
  return {out[0].d, out[1].d, out[2].d};
}

}  // namespace quat

struct Su2Chart {
  quat::Q<double> g0{1.0, 0.0, 0.0, 0.0};

  static Su2Chart identity_chart() { return {}; }
  static Su2Chart basepoint(const std::array<double, 3>& c) {
    return {quat::exp_chart<double>(c)};
  }

  // chart coordinates of the group identity, log(g0^-1)
  Eigen::Vector3d identity_coords() const;

  // (x, y) -> chart coordinates of chart(x) chart(y); R^6 -> R^3
  SmoothMap multiplication() const;

  // d/dt chart^-1(chart(a) exp(t e_i)) at t = 0: generator of right
  // translation.  Independent of g0 (left translations commute with it).
  VectorField left_invariant_field(int i) const;
  // d/dt chart^-1(exp(t e_i) chart(a)) at t = 0: generator of left
  // translation; transforms by Ad(g0^-1) across basepoints.
  VectorField right_invariant_field(int i) const;
};

}  // namespace dirac
