#include <dirac/su2.hpp>

#include <type_traits>

namespace dirac {

using quat::Q;

namespace {

template <class T>
std::array<T, 3> coords(std::span<const T> x, int at) {
  return {x[at], x[at + 1], x[at + 2]};
}

}  // namespace

Eigen::Vector3d Su2Chart::identity_coords() const {
  if (g0[0] == 1.0) return Eigen::Vector3d::Zero();
  auto a = quat::log_chart(quat::conjugate(g0));
  return {a[0], a[1], a[2]};
}

SmoothMap Su2Chart::multiplication() const {
  auto g = g0;
  auto f = [g](auto x, auto y) {
    using T = std::remove_cvref_t<decltype(y[0])>;
    auto prod = quat::mul(quat::exp_chart(coords<T>(x, 0)),
                          quat::mul(quat::promote<T>(g), quat::exp_chart(coords<T>(x, 3))));
    auto out = quat::log_chart(prod);
    for (int i = 0; i < 3; ++i) y[i] = out[i];
  };
  return SmoothMap::from_lambda(6, 3, std::move(f));
}

VectorField Su2Chart::left_invariant_field(int i) const {
  auto f = [i](auto x, auto y) {
    using T = std::remove_cvref_t<decltype(y[0])>;
    auto out = quat::left_invariant_value<T>(x, i);
    for (int j = 0; j < 3; ++j) y[j] = out[j];
  };
  return VectorField::from_lambda(3, std::move(f));
}

VectorField Su2Chart::right_invariant_field(int i) const {
  auto g = g0;
  auto f = [g, i](auto x, auto y) {
    using T = std::remove_cvref_t<decltype(y[0])>;
    auto out = quat::right_invariant_value<T>(g, x, i);
    for (int j = 0; j < 3; ++j) y[j] = out[j];
  };
  return VectorField::from_lambda(3, std::move(f));
}

}  // namespace dirac
