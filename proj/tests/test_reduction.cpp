#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <dirac/reduction.hpp>
#include <dirac/sampling.hpp>
#include <vector>

#include "geo_fixtures.hpp"

using namespace dirac;
using testgeo::abelian_algebra;
using testgeo::canonical_twoform;
using testgeo::rotation_action;
using testgeo::rotational_bivector;
using testgeo::translation_action;

namespace {

// R^3 with the last coordinate quotiented out.
QuotientModel drop_last_coordinate() {
  Eigen::MatrixXd pm(2, 3);
  pm << 1, 0, 0, 0, 1, 0;
  Eigen::MatrixXd sm(3, 2);
  sm << 1, 0, 0, 1, 0, 0;
  return QuotientModel{linear_smooth_map(pm), linear_smooth_map(sm)};
}

// Rotational Poisson chart away from the symmetry axis and its quotient in
// the coordinates (x1^2 + x2^2, x3).
Chart rotation_chart() {
  Eigen::VectorXd lo(3), hi(3);
  lo << 0.6, -0.5, -0.5;
  hi << 1.6, 0.5, 0.5;
  return Chart("xi", lo, hi);
}

Chart rotation_quotient_chart() {
  Eigen::VectorXd lo(2), hi(2);
  lo << 0.5, -0.45;
  hi << 2.3, 0.45;
  return Chart("y", lo, hi);
}

QuotientModel rotation_quotient() {
  auto p = SmoothMap::from_lambda(3, 2, [](auto x, auto y) {
    y[0] = x[0] * x[0] + x[1] * x[1];
    y[1] = x[2];
  });
  auto sigma = SmoothMap::from_lambda(2, 3, [](auto y, auto x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    x[0] = sqrt(y[0]);
    x[1] = T(0);
    x[2] = y[1];
  });
  return QuotientModel{std::move(p), std::move(sigma)};
}

// T*R^2 = (q1, q2, p1, p2) with both q1 and p1 quotiented out, leaving the
// canonical phase plane (q2, p2).
QuotientModel phase_plane_quotient() {
  Eigen::MatrixXd pm(2, 4);
  pm << 0, 1, 0, 0, 0, 0, 0, 1;
  Eigen::MatrixXd sm(4, 2);
  sm << 0, 0, 1, 0, 0, 0, 0, 1;
  return QuotientModel{linear_smooth_map(pm), linear_smooth_map(sm)};
}

GroupActionData phase_plane_action() {
  return GroupActionData{abelian_algebra(2),
                         {basis_vector_field(4, 0), basis_vector_field(4, 2)}};
}

Eigen::MatrixXd tangent_span(int n) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n, n);
  b.topRows(n) = Eigen::MatrixXd::Identity(n, n);
  return b;
}

Eigen::MatrixXd cotangent_span(int n) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n, n);
  b.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  return b;
}

int kernel_dim(const ReducedAlgebroidFiber& fiber, double tol = kRankTol) {
  Eigen::MatrixXd r(fiber.rho_red.rows() + fiber.mu_red.rows(), fiber.rank());
  r.topRows(fiber.rho_red.rows()) = fiber.rho_red;
  r.bottomRows(fiber.mu_red.rows()) = fiber.mu_red;
  return fiber.rank() - mat_rank(r, tol);
}

}  // namespace

TEST_CASE("quotient model validation") {
  QuotientModel q = drop_last_coordinate();
  GroupActionData act = translation_action(3, 2);
  auto pts = sample_points(Chart::box("n", 2, -0.9, 0.9), 40, 301);

  CheckReport rep = check_quotient_model(q, act, pts);
  CHECK(rep.pass);
  CHECK(rep.max_residual < 1e-10);
  CHECK_NOTHROW(validate_quotient_model(q, act, pts));

  SUBCASE("sigma that misses the fibers") {
    QuotientModel bad = q;
    bad.sigma = SmoothMap::from_lambda(2, 3, [](auto y, auto x) {
      using T = std::remove_cvref_t<decltype(x[0])>;
      x[0] = y[0];
      x[1] = y[1] + 0.1;
      x[2] = T(0);
    });
    CHECK_THROWS_WITH_AS(validate_quotient_model(bad, act, pts),
                         doctest::Contains("not a section"), std::runtime_error);
  }
  SUBCASE("generators that do not span ker Dp") {
    GroupActionData wrong = translation_action(3, 0);
    CHECK_THROWS_WITH_AS(validate_quotient_model(q, wrong, pts),
                         doctest::Contains("orbit span"), std::runtime_error);
  }
  SUBCASE("p that is not a submersion") {
    QuotientModel bad = q;
    bad.p = SmoothMap::from_lambda(3, 2, [](auto x, auto y) {
      y[0] = x[0];
      y[1] = x[0];
    });
    CHECK_THROWS_WITH_AS(validate_quotient_model(bad, act, pts),
                         doctest::Contains("not a submersion"), std::runtime_error);
  }
}

TEST_CASE("orbit distribution requires pointwise freeness") {
  GroupActionData act = rotation_action();
  auto good = sample_points(rotation_chart(), 60, 302);
  CHECK(orbit_distribution(act, good).size() == 1);

  std::vector<ChartPoint> axis = good;
  Eigen::VectorXd on_axis(3);
  on_axis << 0.0, 0.0, 0.3;
  axis.push_back(ChartPoint{"xi", on_axis});
  CHECK_THROWS_WITH_AS(orbit_distribution(act, axis), doctest::Contains("not free"),
                       std::runtime_error);
}

TEST_CASE("orbit-complement fibers of the model structures") {
  SUBCASE("tangent structure meets every covector condition trivially") {
    DiracStructure l = tangent_dirac(3);
    GroupActionData act = translation_action(3, 2);
    Eigen::VectorXd x(3);
    x << 0.2, -0.4, 0.7;
    FiberBasis fb = intersect_l_kperp(l, act, x);
    CHECK(fb.rank() == 3);
  }
  SUBCASE("symplectic plane with a translation leaves one direction") {
    DiracStructure l = graph_of_twoform(canonical_twoform(1));
    GroupActionData act = translation_action(2, 0);
    Eigen::VectorXd x(2);
    x << 0.3, 0.5;
    FiberBasis fb = intersect_l_kperp(l, act, x);
    REQUIRE(fb.rank() == 1);
    Eigen::VectorXd expected(4);
    expected << 1, 0, 0, 1;  // the section (d_q, dp)
    CHECK(subspace_distance(fb.stacked, expected) < 1e-12);
  }
  SUBCASE("cotangent structure loses the orbit covector") {
    DiracStructure l = cotangent_dirac(3);
    GroupActionData act = translation_action(3, 2);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    CHECK(intersect_l_kperp(l, act, x).rank() == 2);
  }
  SUBCASE("constant rank over a chart") {
    DiracStructure l = graph_of_poisson(rotational_bivector());
    auto pts = sample_points(rotation_chart(), 80, 303);
    CHECK(l_kperp_constant_rank(l, rotation_action(), pts) == 2);
  }
  SUBCASE("rank variation is a hard error") {
    DiracStructure l = cotangent_dirac(2);
    GroupActionData scaling{abelian_algebra(1),
                            {field_mul(coordinate_field(2, 0), basis_vector_field(2, 0))}};
    Eigen::VectorXd a(2), b(2);
    a << 0.5, 0.1;
    b << 0.0, 0.2;
    std::vector<ChartPoint> pts{{"m", a}, {"m", b}};
    CHECK_THROWS_WITH_AS(l_kperp_constant_rank(l, scaling, pts),
                         doctest::Contains("rank varies"), std::runtime_error);
  }
}

TEST_CASE("pointwise pushforward fibers") {
  QuotientModel q = drop_last_coordinate();
  Eigen::VectorXd y(2);
  y << 0.3, -0.2;

  SUBCASE("tangent pushes to the tangent structure") {
    Eigen::MatrixXd b = pushforward_dirac(tangent_dirac(3), q, y);
    REQUIRE(b.cols() == 2);
    CHECK(subspace_distance(b, tangent_span(2)) < 1e-12);
  }
  SUBCASE("cotangent pushes to the cotangent structure") {
    Eigen::MatrixXd b = pushforward_dirac(cotangent_dirac(3), q, y);
    CHECK(subspace_distance(b, cotangent_span(2)) < 1e-12);
  }
  SUBCASE("canonical T*R^2 pushes to the canonical phase plane") {
    DiracStructure l = graph_of_twoform(canonical_twoform(2));
    Eigen::MatrixXd b = pushforward_dirac(l, phase_plane_quotient(), y);
    Eigen::MatrixXd expected(4, 2);  // graph of dy1 ^ dy2: (d_1, dy2), (d_2, -dy1)
    expected << 1, 0, 0, 1, 0, -1, 1, 0;
    CHECK(subspace_distance(b, expected) < 1e-12);
  }
  SUBCASE("a degenerate frame cannot fill the quotient rank") {
    SectionFrame f;
    f.sections.push_back(CourantSection{basis_vector_field(2, 1), zero_one_form(2)});
    f.declared_rank = 1;
    Eigen::MatrixXd pm(1, 2);
    pm << 1, 0;
    Eigen::MatrixXd sm(2, 1);
    sm << 1, 0;
    QuotientModel line{linear_smooth_map(pm), linear_smooth_map(sm)};
    Eigen::VectorXd y1(1);
    y1 << 0.4;
    CHECK_THROWS_WITH_AS(pushforward_dirac(DiracStructure{f}, line, y1),
                         doctest::Contains("pushforward rank"), std::runtime_error);
  }
}

TEST_CASE("reduced fiber of the tangent structure") {
  DiracStructure l = tangent_dirac(3);
  GroupActionData act = translation_action(3, 2);
  QuotientModel q = drop_last_coordinate();
  Eigen::VectorXd y(2);
  y << 0.1, 0.4;

  ReducedAlgebroidFiber fiber = reduced_fiber(l, act, q, y);
  REQUIRE(fiber.rank() == 3);
  CHECK(fiber.mu_red.norm() < 1e-12);
  CHECK(mat_rank(fiber.rho_red) == 2);
  CHECK(kernel_dim(fiber) == 1);
  CHECK(dim_k_cap_l(l, act, fiber.x) == 1);

  Eigen::VectorXd c = Eigen::VectorXd::Unit(3, 0);
  Eigen::VectorXd img = r_map(fiber, c);
  CHECK((img.head(2) - fiber.rho_red.col(0)).norm() == 0.0);
  CHECK(img.tail(2).norm() < 1e-12);

  // rank bookkeeping: rank(A_red) - dim ker r = rank(L_quot) = dim N
  CHECK(fiber.rank() - kernel_dim(fiber) == q.n_dim());

  auto m_pts = sample_points(Chart::box("m", 3, -1, 1), 50, 304);
  PredicateResult pred = thm_red_predicate(l, act, m_pts);
  CHECK_FALSE(pred.holds);
  CHECK(*std::max_element(pred.dims.begin(), pred.dims.end()) == 1);
  CHECK(pred.report.note == "dim 1 at 50 samples");
}

TEST_CASE("reduced fiber of the rotational Poisson graph") {
  DiracStructure l = graph_of_poisson(rotational_bivector());
  GroupActionData act = rotation_action();
  QuotientModel q = rotation_quotient();
  auto n_pts = sample_points(rotation_quotient_chart(), 40, 305);
  CHECK_NOTHROW(validate_quotient_model(q, act, n_pts));

  ReducedAlgebroidFiber fiber = reduced_fiber(l, act, q, n_pts[0].x);
  REQUIRE(fiber.rank() == 2);
  CHECK(kernel_dim(fiber) == 0);
  CHECK(fiber.rank() - kernel_dim(fiber) == q.n_dim());

  // the reduced bivector vanishes: {x1^2 + x2^2, x3} = 0, so L_quot = T*N
  Eigen::MatrixXd b = pushforward_dirac(l, q, n_pts[0].x);
  CHECK(subspace_distance(b, cotangent_span(2)) < 1e-9);

  auto m_pts = sample_points(rotation_chart(), 50, 306);
  PredicateResult pred = thm_red_predicate(l, act, m_pts);
  CHECK(pred.holds);
  CHECK(pred.report.note == "dim 0 at 50 samples");
}

TEST_CASE("fiber comparison map against the pushforward") {
  auto n_pts3 = sample_points(Chart::box("n", 2, -0.9, 0.9), 30, 307);

  SUBCASE("tangent structure with matched frames") {
    DiracStructure l = tangent_dirac(3);
    GroupActionData act = translation_action(3, 2);
    QuotientModel q = drop_last_coordinate();
    MatchedFrames mf;
    for (int i = 0; i < 3; ++i)
      mf.upstairs.push_back(CourantSection{basis_vector_field(3, i), zero_one_form(3)});
    mf.downstairs.push_back(CourantSection{basis_vector_field(2, 0), zero_one_form(2)});
    mf.downstairs.push_back(CourantSection{basis_vector_field(2, 1), zero_one_form(2)});
    mf.downstairs.push_back(CourantSection{zero_vector_field(2), zero_one_form(2)});
    CheckReport rep = check_lemma_2red(l, act, q, n_pts3, 1e-9, &mf);
    CHECK(rep.pass);
  }
  SUBCASE("canonical phase plane with matched frames") {
    DiracStructure l = graph_of_twoform(canonical_twoform(2));
    MatchedFrames mf;
    mf.upstairs.push_back(CourantSection{basis_vector_field(4, 1), coordinate_one_form(4, 3)});
    mf.upstairs.push_back(CourantSection{
        basis_vector_field(4, 3), field_scale(coordinate_one_form(4, 1), -1.0)});
    mf.downstairs.push_back(CourantSection{basis_vector_field(2, 0), coordinate_one_form(2, 1)});
    mf.downstairs.push_back(CourantSection{
        basis_vector_field(2, 1), field_scale(coordinate_one_form(2, 0), -1.0)});
    CheckReport rep =
        check_lemma_2red(l, phase_plane_action(), phase_plane_quotient(), n_pts3, 1e-9, &mf);
    CHECK(rep.pass);
  }
  SUBCASE("rotational Poisson graph with pulled-back matched frames") {
    DiracStructure l = graph_of_poisson(rotational_bivector());
    GroupActionData act = rotation_action();
    QuotientModel q = rotation_quotient();
    BivectorField pi = rotational_bivector();
    MatchedFrames mf;
    for (int i = 0; i < 2; ++i) {
      OneForm eta = pullback_oneform(q.p, coordinate_one_form(2, i));
      mf.upstairs.push_back(CourantSection{sharp(pi, eta), eta});
      mf.downstairs.push_back(CourantSection{zero_vector_field(2), coordinate_one_form(2, i)});
    }
    auto n_pts = sample_points(rotation_quotient_chart(), 30, 308);
    CheckReport rep = check_lemma_2red(l, act, q, n_pts, 1e-7, &mf);
    CHECK(rep.pass);
    CHECK(rep.note.find("bracket morphism") != std::string::npos);

    // a bogus downstairs partner breaks the morphism residual
    MatchedFrames bad = mf;
    bad.downstairs[0] =
        CourantSection{basis_vector_field(2, 0), coordinate_one_form(2, 0)};
    CHECK_FALSE(check_lemma_2red(l, act, q, n_pts, 1e-7, &bad).pass);
  }
}

TEST_CASE("smooth pushforward frame matches the pointwise fiber") {
  DiracStructure l = graph_of_poisson(rotational_bivector());
  QuotientModel q = rotation_quotient();
  Chart nchart = rotation_quotient_chart();
  SectionFrame frame = pushforward_frame(l, q, nchart.center());
  REQUIRE(frame.size() == 2);
  CHECK(frame.declared_rank == 2);

  auto n_pts = sample_points(nchart, 25, 309);
  for (const auto& pt : n_pts) {
    Eigen::MatrixXd fm = frame_matrix(frame_jets(frame, pt.x));
    CHECK(subspace_distance(fm, pushforward_dirac(l, q, pt.x)) < 1e-8);
  }

  // the reduced structure is a Dirac structure in its own right
  CHECK(check_lagrangian(frame, n_pts, 1e-6).pass);
  CHECK(check_involutive(frame, n_pts, 1e-6).pass);
}

TEST_CASE("redundant smooth frame over the tangent quotient") {
  DiracStructure l = tangent_dirac(3);
  QuotientModel q = drop_last_coordinate();
  Chart nchart = Chart::box("n", 2, -0.9, 0.9);
  SectionFrame frame = pushforward_frame(l, q, nchart.center());
  CHECK(frame.size() == 3);  // one redundant generator from K cap L
  CHECK(frame.declared_rank == 2);

  auto n_pts = sample_points(nchart, 25, 310);
  CHECK(check_lagrangian(frame, n_pts, 1e-9).pass);
  CHECK(check_involutive(frame, n_pts, 1e-9).pass);
  for (const auto& pt : n_pts) {
    Eigen::MatrixXd fm = frame_matrix(frame_jets(frame, pt.x));
    CHECK(subspace_distance(fm, tangent_span(2)) < 1e-9);
  }
}

TEST_CASE("pushforward fiber is stable along the orbit flow") {
  SUBCASE("rotational Poisson graph") {
    DiracStructure l = graph_of_poisson(rotational_bivector());
    auto n_pts = sample_points(rotation_quotient_chart(), 20, 311);
    CheckReport rep = check_pushforward_flow_invariance(l, rotation_quotient(),
                                                        rotation_action(), n_pts, 0.05, 1e-5);
    CHECK(rep.pass);
    CHECK(rep.note.find("fiber drift") != std::string::npos);
  }
  SUBCASE("canonical phase plane (constant flow, exact)") {
    DiracStructure l = graph_of_twoform(canonical_twoform(2));
    auto n_pts = sample_points(Chart::box("n", 2, -0.9, 0.9), 20, 312);
    CheckReport rep = check_pushforward_flow_invariance(
        l, phase_plane_quotient(), phase_plane_action(), n_pts, 0.1, 1e-12);
    CHECK(rep.pass);
  }
}

TEST_CASE("covectors outside the quotient image are rejected") {
  // the generator disagrees with ker Dp, so the orbit-complement covectors
  // are not pullbacks through p
  DiracStructure l = cotangent_dirac(2);
  GroupActionData act = translation_action(2, 1);
  Eigen::MatrixXd pm(1, 2);
  pm << 0, 1;
  Eigen::MatrixXd sm(2, 1);
  sm << 0, 1;
  QuotientModel q{linear_smooth_map(pm), linear_smooth_map(sm)};
  Eigen::VectorXd y(1);
  y << 0.2;
  CHECK_THROWS_WITH_AS(reduced_fiber(l, act, q, y), doctest::Contains("not a pullback"),
                       std::runtime_error);
}

TEST_CASE("four-step integrator order check") {
  // x' = x integrated over one step against the closed form
  VectorField f = VectorField::from_lambda(1, [](auto x, auto y) { y[0] = x[0]; });
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  double big = std::abs(rk4_step(f, x0, 0.2)(0) - std::exp(0.2));
  double small = std::abs(rk4_step(f, x0, 0.1)(0) - std::exp(0.1));
  CHECK(big / small > 20.0);  // 5th-order local error: ratio ~ 32
  CHECK(small < 1e-7);
}
