#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <dirac/calculus.hpp>
#include <dirac/chart.hpp>
#include <dirac/sampling.hpp>
#include <dirac/su2.hpp>

using namespace dirac;

namespace {

Chart su2_box() {
  Eigen::Vector3d lo(0.2, 0.1, 0.15), hi(0.7, 0.6, 0.65);
  return Chart("a", lo, hi);
}

std::vector<Su2Chart> both_variants() {
  return {Su2Chart::identity_chart(), Su2Chart::basepoint({0.25, 0.35, 0.15})};
}

double eps(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  return j == (i + 1) % 3 ? 1.0 : -1.0;
}

}  // namespace

TEST_CASE("quaternion algebra") {
  quat::Q<double> a{0.5, 0.5, 0.5, 0.5};
  quat::Q<double> b{std::cos(0.3), std::sin(0.3), 0.0, 0.0};

  SUBCASE("units multiply like i j = k") {
    quat::Q<double> qi{0, 1, 0, 0}, qj{0, 0, 1, 0}, qk{0, 0, 0, 1};
    auto ij = quat::mul(qi, qj);
    CHECK(ij[3] == 1.0);
    auto jk = quat::mul(qj, qk);
    CHECK(jk[1] == 1.0);
    auto ii = quat::mul(qi, qi);
    CHECK(ii[0] == -1.0);
  }
  SUBCASE("conjugate inverts unit quaternions") {
    auto e = quat::mul(a, quat::conjugate(a));
    CHECK(e[0] == doctest::Approx(1.0));
    for (int i = 1; i < 4; ++i) CHECK(std::abs(e[i]) < 1e-15);
  }
  SUBCASE("multiplication is associative") {
    quat::Q<double> c{std::cos(0.8), 0.0, std::sin(0.8), 0.0};
    auto left = quat::mul(quat::mul(a, b), c);
    auto right = quat::mul(a, quat::mul(b, c));
    for (int i = 0; i < 4; ++i) CHECK(left[i] == doctest::Approx(right[i]).epsilon(1e-15));
  }
  SUBCASE("log inverts exp on the chart box") {
    for (const auto& p : sample_points(su2_box(), 25, 7)) {
      std::array<double, 3> v{p.x(0), p.x(1), p.x(2)};
      auto back = quat::log_chart(quat::exp_chart(v));
      for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-13));
    }
  }
  SUBCASE("axis turn matches exp on the axis") {
    auto turned = quat::axis_turn(1, 0.6);
    auto direct = quat::exp_chart<double>({0.0, 0.6, 0.0});
    for (int i = 0; i < 4; ++i) CHECK(turned[i] == doctest::Approx(direct[i]).epsilon(1e-15));
  }
}

TEST_CASE("chart multiplication") {
  for (const auto& chart : both_variants()) {
    SmoothMap m = chart.multiplication();
    Eigen::Vector3d id = chart.identity_coords();
    auto pts = sample_points(su2_box(), 10, 11);

    for (const auto& p : pts) {
      Eigen::VectorXd xe(6), ex(6);
      xe << p.x, id;
      ex << id, p.x;
      CHECK((m.values(xe) - p.x).norm() < 1e-12);
      CHECK((m.values(ex) - p.x).norm() < 1e-12);
    }

    // small elements so triple products stay inside the log branch
    SplitMix64 r(3);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd x(3), y(3), z(3);
      for (int i = 0; i < 3; ++i) {
        x(i) = r.uniform(-0.3, 0.3);
        y(i) = r.uniform(-0.3, 0.3);
        z(i) = r.uniform(-0.3, 0.3);
      }
      Eigen::VectorXd yz(6), xy(6);
      yz << y, z;
      xy << x, y;
      Eigen::VectorXd a(6), b(6);
      a << x, m.values(yz);
      b << m.values(xy), z;
      CHECK((m.values(a) - m.values(b)).norm() < 1e-12);
    }
  }
}

TEST_CASE("invariant field brackets") {
  auto pts = sample_points(su2_box(), 15, 21);
  for (const auto& chart : both_variants()) {
    std::array<VectorField, 3> ul, ur;
    for (int i = 0; i < 3; ++i) {
      ul[i] = chart.left_invariant_field(i);
      ur[i] = chart.right_invariant_field(i);
    }

    for (const auto& p : pts) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          Eigen::Vector3d want_l = Eigen::Vector3d::Zero(), want_r = Eigen::Vector3d::Zero();
          for (int k = 0; k < 3; ++k) {
            want_l += eps(i, j, k) * ul[k].values(p.x);
            want_r -= eps(i, j, k) * ur[k].values(p.x);
          }
          // left-invariant fields realize the algebra, right-invariant ones
          // its opposite, and the two families commute
          CHECK((lie_bracket(ul[i], ul[j]).values(p.x) - want_l).norm() < 1e-11);
          CHECK((lie_bracket(ur[i], ur[j]).values(p.x) - want_r).norm() < 1e-11);
          CHECK(lie_bracket(ul[i], ur[j]).values(p.x).norm() < 1e-11);
        }
    }
  }
}

TEST_CASE("invariant frames stay nonsingular") {
  for (const auto& chart : both_variants()) {
    for (const auto& p : sample_points(su2_box(), 20, 31)) {
      Eigen::Matrix3d l, r;
      for (int i = 0; i < 3; ++i) {
        l.col(i) = chart.left_invariant_field(i).values(p.x);
        r.col(i) = chart.right_invariant_field(i).values(p.x);
      }
      CHECK(std::abs(l.determinant()) > 0.1);
      CHECK(std::abs(r.determinant()) > 0.1);
    }
  }
}

TEST_CASE("basepoint shifts conjugate the right-invariant frame") {
  // u^R transforms by Ad(g0^-1), so values at matching group elements agree
  // after the chart transition
  Su2Chart c0 = Su2Chart::identity_chart();
  Su2Chart c1 = Su2Chart::basepoint({0.25, 0.35, 0.15});
  for (const auto& p : sample_points(su2_box(), 8, 41)) {
    // same group element in both charts: g = g0 exp(a1) = exp(a0)
    std::array<double, 3> a1{p.x(0), p.x(1), p.x(2)};
    auto g = quat::mul(c1.g0, quat::exp_chart(a1));
    auto a0arr = quat::log_chart(g);
    Eigen::Vector3d a0(a0arr[0], a0arr[1], a0arr[2]);

    for (int i = 0; i < 3; ++i) {
      // push c1's field through the transition log(g0 exp(.)) by AD
      SmoothMap transition = SmoothMap::from_lambda(3, 3, [g0 = c1.g0](auto x, auto y) {
        using T = std::remove_cvref_t<decltype(y[0])>;
        auto out = quat::log_chart(
            quat::mul(quat::Q<T>{T(g0[0]), T(g0[1]), T(g0[2]), T(g0[3])},
                      quat::exp_chart<T>({x[0], x[1], x[2]})));
        for (int j = 0; j < 3; ++j) y[j] = out[j];
      });
      Eigen::VectorXd pushed =
          transition.jacobian(p.x) * c1.right_invariant_field(i).values(p.x);
      CHECK((pushed - c0.right_invariant_field(i).values(a0)).norm() < 1e-11);
    }
  }
}
