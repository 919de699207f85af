#pragma once

// Forward-mode dual numbers, nestable for higher derivatives.
//
// Dual<double> carries one directional derivative; Dual<Dual<double>> carries
// second-order information, and so on.  All arithmetic is overloaded through
// hidden friends so that plain numeric literals mix freely at any nesting
// depth (the templated constructor converts a raw scalar level by level).

#include <cmath>
#include <type_traits>

namespace dirac {

template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  constexpr Dual() = default;
  constexpr Dual(const T& value) : v(value), d{} {}
  constexpr Dual(const T& value, const T& deriv) : v(value), d(deriv) {}

  template <class U>
    requires(std::is_arithmetic_v<U> && !std::is_same_v<U, T>)
  constexpr Dual(U value) : v(static_cast<T>(value)), d{} {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v = v * o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v = v / o.v;
    return *this;
  }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
  }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator+(const Dual& a) { return a; }
};

// Strips all derivative payload, yielding the underlying double.
inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

using std::cos;
using std::exp;
using std::sin;
using std::sqrt;
using std::atan;

template <class T>
Dual<T> sin(const Dual<T>& x) {
  return {sin(x.v), cos(x.v) * x.d};
}
template <class T>
Dual<T> cos(const Dual<T>& x) {
  return {cos(x.v), -sin(x.v) * x.d};
}
template <class T>
Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.v);
  return {e, e * x.d};
}
template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  T r = sqrt(x.v);
  return {r, x.d / (r + r)};
}
template <class T>
Dual<T> atan(const Dual<T>& x) {
  return {atan(x.v), x.d / (T(1) + x.v * x.v)};
}

// x^n for integer n (n < 0 handled through reciprocal); works for any scalar
// supporting * and /.
template <class T>
T ipow(const T& x, int n) {
  if (n < 0) return T(1) / ipow(x, -n);
  T r(1);
  T b = x;
  while (n > 0) {
    if (n & 1) r = r * b;
    b = b * b;
    n >>= 1;
  }
  return r;
}

using D0 = double;
using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

}  // namespace dirac
