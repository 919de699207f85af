#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <dirac/algebroid.hpp>
#include <dirac/sampling.hpp>

#include "geo_fixtures.hpp"

using namespace dirac;
using namespace testgeo;

namespace {

std::vector<ChartPoint> box_samples(const std::string& name, int dim, double lo, double hi,
                                    int n, uint64_t seed) {
  return sample_points(Chart::box(name, dim, lo, hi), n, seed);
}

}  // namespace

TEST_CASE("lie algebra data validation") {
  LieAlgebraData su2 = epsilon_algebra();
  CHECK(su2.dim == 3);
  CHECK(su2.fc(2, 0, 1) == 1.0);
  CHECK(su2.labels.size() == 3);

  // epsilon constants are ad-invariant for the identity form
  std::vector<double> f = su2.f;
  CHECK_NOTHROW(make_lie_algebra(3, f, Eigen::MatrixXd::Identity(3, 3)));

  Eigen::MatrixXd bad_b = Eigen::Vector3d(1, 2, 3).asDiagonal();
  CHECK_THROWS_WITH_AS(make_lie_algebra(3, f, bad_b), doctest::Contains("ad-invariant"),
                       std::invalid_argument);

  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_WITH_AS(make_lie_algebra(3, f, singular), doctest::Contains("degenerate"),
                       std::invalid_argument);

  std::vector<double> asym = f;
  asym[(2 * 3 + 1) * 3 + 0] = 1.0;  // f^3_21 = f^3_12 breaks antisymmetry
  CHECK_THROWS_WITH_AS(make_lie_algebra(3, asym), doctest::Contains("antisymmetric"),
                       std::invalid_argument);

  // [e1,e2] = e3 and [e1,e3] = e1 violate Jacobi
  std::vector<double> nonjac(27, 0.0);
  auto set = [&](int k, int i, int j, double v) {
    nonjac[(k * 3 + i) * 3 + j] = v;
    nonjac[(k * 3 + j) * 3 + i] = -v;
  };
  set(2, 0, 1, 1);
  set(0, 0, 2, 1);
  CHECK_THROWS_WITH_AS(make_lie_algebra(3, nonjac), doctest::Contains("Jacobi"),
                       std::invalid_argument);
}

TEST_CASE("action structure: homomorphism, freeness, sign diagnostic") {
  auto pts = box_samples("xi", 3, 0.6, 1.4, 40, 101);

  CHECK(check_action_structure(rotation_action(), pts, 1e-8).pass);
  CHECK_NOTHROW(validate_group_action(rotation_action(), pts));

  // dependent generators: abelian pair along the same axis
  GroupActionData dep{abelian_algebra(2),
                      {basis_vector_field(3, 0), field_scale(basis_vector_field(3, 0), 2.0)}};
  CheckReport dep_rep = check_action_structure(dep, pts, 1e-8);
  CHECK_FALSE(dep_rep.pass);
  CHECK(dep_rep.max_residual >= 1.0);
  CHECK_THROWS_WITH_AS(validate_group_action(dep, pts), doctest::Contains("not free"),
                       std::runtime_error);

  // Hamiltonian generators of the rotational bivector, declared with the
  // wrong bracket sign: diagnostic should suggest negation
  BivectorField pi = rotational_bivector();
  std::vector<double> neg(27, 0.0);
  for (int i = 0; i < 27; ++i) neg[i] = -epsilon_algebra().f[i];
  GroupActionData wrong{make_lie_algebra(3, neg),
                        {sharp(pi, coordinate_one_form(3, 0)), sharp(pi, coordinate_one_form(3, 1)),
                         sharp(pi, coordinate_one_form(3, 2))}};
  CheckReport rep = check_action_structure(wrong, pts, 1e-7);
  CHECK_FALSE(rep.pass);
  CHECK(rep.note.find("negate") != std::string::npos);
  CHECK_THROWS_WITH_AS(validate_group_action(wrong, pts), doctest::Contains("negate"),
                       std::runtime_error);
}

TEST_CASE("algebroids induced by tangent, cotangent, and Poisson structures") {
  AnchoredAlgebroid at = algebroid_from_dirac(tangent_dirac(3));
  Eigen::VectorXd x(3);
  x << 0.3, -0.2, 0.5;
  for (int i = 0; i < 3; ++i)
    CHECK((at.anchor[i].values(x) - Eigen::VectorXd::Unit(3, i)).norm() == 0.0);

  AnchoredAlgebroid ac = algebroid_from_dirac(cotangent_dirac(3));
  for (int i = 0; i < 3; ++i) CHECK(ac.anchor[i].values(x).norm() == 0.0);
  CourantSection b = courant_bracket(ac.frame.sections[0], ac.frame.sections[1]);
  CHECK(stacked_values(b, x).norm() < 1e-14);

  // anchor matrix of a Poisson graph is the bivector itself
  BivectorField pi = rotational_bivector();
  AnchoredAlgebroid ap = algebroid_from_dirac(graph_of_poisson(pi));
  Eigen::MatrixXd p = pi.matrix(x);
  for (int i = 0; i < 3; ++i)
    CHECK((ap.anchor[i].values(x) - p.row(i).transpose()).norm() < 1e-14);

  auto pts = box_samples("xi", 3, 0.2, 0.9, 40, 102);
  CHECK(check_anchor_intertwines(ap, pts, 1e-10).pass);
}

TEST_CASE("structure-function algebroids validate and intertwine") {
  BivectorField pi = rotational_bivector();
  std::vector<VectorField> anchors;
  for (int i = 0; i < 3; ++i) anchors.push_back(sharp(pi, coordinate_one_form(3, i)));

  LieAlgebraData eps = epsilon_algebra();
  std::vector<ScalarField> structure;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) structure.push_back(scalar_const(3, eps.fc(k, i, j)));

  auto pts = box_samples("xi", 3, 0.2, 0.9, 30, 103);
  AnchoredAlgebroid a = algebroid_from_structure(anchors, structure, pts);
  CHECK_FALSE(a.dirac_mode);
  CHECK(a.rank == 3);
  CHECK(check_anchor_intertwines(a, pts, 1e-8).pass);

  // negated constants break the intertwining
  std::vector<ScalarField> neg;
  for (int q = 0; q < 27; ++q) neg.push_back(scalar_const(3, -eps.f[q]));
  CHECK_THROWS_WITH_AS(algebroid_from_structure(anchors, neg, pts),
                       doctest::Contains("intertwine"), std::runtime_error);

  // symmetric entry breaks antisymmetry
  std::vector<ScalarField> asym = structure;
  asym[(2 * 3 + 1) * 3 + 0] = scalar_const(3, 1.0);
  CHECK_THROWS_WITH_AS(algebroid_from_structure(anchors, asym, pts),
                       doctest::Contains("antisymmetric"), std::runtime_error);
}

TEST_CASE("compatibility axioms hold for induced forms and fail when corrupted") {
  auto pts3 = box_samples("xi", 3, 0.2, 0.9, 60, 104);

  // mu = 0 on the tangent structure: trivially compatible
  AnchoredAlgebroid at = algebroid_from_dirac(tangent_dirac(3));
  IMForm zero{{zero_one_form(3), zero_one_form(3), zero_one_form(3)}};
  CheckReport triv = check_im_conditions(at, zero, pts3, 1e-12);
  CHECK(triv.pass);
  CHECK(triv.max_residual == 0.0);

  // induced form of a Poisson graph
  DiracStructure lp = graph_of_poisson(rotational_bivector());
  CheckReport pois = check_im_conditions(algebroid_from_dirac(lp), im_form_from_dirac(lp),
                                         pts3, 1e-8);
  CHECK(pois.pass);

  // induced form of a constant symplectic graph
  DiracStructure lw = graph_of_twoform(canonical_twoform(2));
  auto pts4 = box_samples("m", 4, -1.0, 1.0, 40, 105);
  CHECK(check_im_conditions(algebroid_from_dirac(lw), im_form_from_dirac(lw), pts4, 1e-10)
            .pass);

  // non-closed 2-form: second axiom fails
  DiracStructure lnc = graph_of_twoform(nonclosed_twoform());
  CheckReport nc = check_im_conditions(algebroid_from_dirac(lnc), im_form_from_dirac(lnc),
                                       pts3, 1e-3);
  CHECK_FALSE(nc.pass);
  CHECK(nc.max_residual > 1e-3);

  // corrupted mu on TM: diagonal first-axiom residual is exactly 2
  AnchoredAlgebroid at2 = algebroid_from_dirac(tangent_dirac(2));
  IMForm bad{{coordinate_one_form(2, 0), zero_one_form(2)}};
  auto pts2 = box_samples("m", 2, -1.0, 1.0, 20, 106);
  CheckReport corrupted = check_im_conditions(at2, bad, pts2, 1e-6);
  CHECK_FALSE(corrupted.pass);
  CHECK(corrupted.max_residual == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("lifted derivation values and the Leibniz rule") {
  GroupActionData tr = translation_action(2, 0);

  // s = (x1 d2, 0) under u = d1: D s = (d2, 0)
  auto vf = [](auto x, auto y) {
    using T = std::remove_cvref_t<decltype(y[0])>;
    y[0] = T(0);
    y[1] = x[0];
  };
  CourantSection s{VectorField(make_lambda_core(2, 2, vf)), zero_one_form(2)};
  CourantSection ds = lifted_derivation(tr, 0, s);
  Eigen::VectorXd x(2);
  x << 0.7, -0.3;
  CHECK((ds.x_part.values(x) - Eigen::VectorXd::Unit(2, 1)).norm() < 1e-14);
  CHECK(ds.a_part.values(x).norm() < 1e-14);

  // constant-coefficient section is invariant under translation
  CourantSection inv{basis_vector_field(2, 1), coordinate_one_form(2, 1)};
  CourantSection dinv = lifted_derivation(tr, 0, inv);
  CHECK(stacked_values(dinv, x).norm() < 1e-14);

  // D(f s) = (L_u f) s + f D(s) on random data under the rotation action
  SplitMix64 r(107);
  GroupActionData rot = rotation_action();
  CourantSection rs = rand_section(r, 3);
  ScalarField f = ScalarField::from_function(3, [](auto q) { return q[0] * q[1] + 2.0 * q[2]; });
  CourantSection fs{field_mul(f, rs.x_part), field_mul(f, rs.a_part)};
  CourantSection dfs = lifted_derivation(rot, 0, fs);
  CourantSection drs = lifted_derivation(rot, 0, rs);
  ScalarField uf = lie_derivative_scalar(rot.generators[0], f);
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    Eigen::VectorXd q(3);
    q << r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-1, 1);
    Eigen::VectorXd lhs = stacked_values(dfs, q);
    Eigen::VectorXd rhs = uf.value(q) * stacked_values(rs, q) + f.value(q) * stacked_values(drs, q);
    worst = std::max(worst, (lhs - rhs).norm());
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("action-preservation of structures") {
  auto pts3 = box_samples("xi", 3, 0.6, 1.4, 50, 108);

  CheckReport tm = check_action_preserves_dirac(tangent_dirac(3), rotation_action(), pts3, 1e-10);
  CHECK(tm.pass);

  DiracStructure lp = graph_of_poisson(rotational_bivector());
  CHECK(check_action_preserves_dirac(lp, rotation_action(), pts3, 1e-7).pass);

  // scaling flow does not preserve the constant symplectic structure
  DiracStructure lw = graph_of_twoform(canonical_twoform(1));
  auto scaling = [](auto x, auto y) {
    using T = std::remove_cvref_t<decltype(y[0])>;
    y[0] = x[0];
    y[1] = T(0);
  };
  GroupActionData bad{abelian_algebra(1), {VectorField::from_lambda(2, scaling)}};
  auto pts2 = box_samples("m", 2, 0.3, 1.0, 30, 109);
  CheckReport rep = check_action_preserves_dirac(lw, bad, pts2, 1e-3);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual > 0.5);
}

TEST_CASE("infinitesimal symmetry residuals") {
  // abelian translation on the cotangent structure: everything vanishes
  DiracStructure lc = graph_of_poisson(zero_bivector(2));
  AnchoredAlgebroid ac = algebroid_from_dirac(lc);
  IMForm mc = im_form_from_dirac(lc);
  auto pts2 = box_samples("m", 2, -1.0, 1.0, 30, 110);
  CheckReport ab = check_infinitesimal_symmetry(ac, mc, translation_action(2, 0), pts2, 1e-12);
  CHECK(ab.pass);
  CHECK(ab.max_residual < 1e-13);

  // rotation on the rotational Poisson graph
  DiracStructure lp = graph_of_poisson(rotational_bivector());
  AnchoredAlgebroid ap = algebroid_from_dirac(lp);
  IMForm mp = im_form_from_dirac(lp);
  auto pts3 = box_samples("xi", 3, 0.6, 1.4, 40, 111);
  CheckReport rot = check_infinitesimal_symmetry(ap, mp, rotation_action(), pts3, 1e-6);
  CHECK(rot.pass);
  CHECK(rot.note.find("equivariance") != std::string::npos);

  // corrupted derivation (cotangent component dropped) breaks equivariance
  DerivationTable bad;
  bad.entries.resize(1);
  for (int i = 0; i < 3; ++i)
    bad.entries[0].push_back(CourantSection{
        lie_bracket(rotation_action().generators[0], ap.frame.sections[i].x_part),
        zero_one_form(3)});
  CheckReport corr = check_infinitesimal_symmetry(ap, mp, rotation_action(), pts3, 1e-6, &bad);
  CHECK_FALSE(corr.pass);
  CHECK(corr.max_residual > 0.9);
  CHECK(corr.note.find("skipped") != std::string::npos);

  // structure-function mode without a table is a usage error
  BivectorField pi = rotational_bivector();
  std::vector<VectorField> anchors;
  std::vector<ScalarField> structure;
  for (int i = 0; i < 3; ++i) anchors.push_back(sharp(pi, coordinate_one_form(3, i)));
  LieAlgebraData eps = epsilon_algebra();
  for (int q = 0; q < 27; ++q)
    structure.push_back(scalar_const(3, eps.f[q]));
  AnchoredAlgebroid amode = algebroid_from_structure(anchors, structure, pts3);
  CHECK_THROWS_AS(
      check_infinitesimal_symmetry(amode, mp, rotation_action(), pts3, 1e-6),
      std::invalid_argument);
}

TEST_CASE("canonical momentum components") {
  GroupActionData tr = translation_action(2, 0);
  Eigen::VectorXd x(2);
  x << 0.2, 0.8;
  Eigen::VectorXd a(2);
  a << 1, 0;  // dx1
  CHECK(j_can(tr, x, a)(0) == doctest::Approx(1.0));
  CHECK(j_can(tr, x, Eigen::VectorXd::Zero(2)).norm() == 0.0);

  auto rotgen = [](auto x_, auto y) {
    y[0] = -x_[1];
    y[1] = x_[0];
  };
  GroupActionData rot2{abelian_algebra(1), {VectorField::from_lambda(2, rotgen)}};
  Eigen::VectorXd p(2), dx2(2);
  p << 1, 0;
  dx2 << 0, 1;
  CHECK(j_can(rot2, p, dx2)(0) == doctest::Approx(1.0));
}

TEST_CASE("momentum through the bundle form") {
  DiracStructure lp = graph_of_poisson(rotational_bivector());
  AnchoredAlgebroid ap = algebroid_from_dirac(lp);
  IMForm mp = im_form_from_dirac(lp);
  GroupActionData rot = rotation_action();
  Eigen::VectorXd x(3);
  x << 0.7, 0.5, 0.9;
  Eigen::VectorXd u = rot.generators[0].values(x);
  for (int i = 0; i < 3; ++i)
    CHECK(j_a(ap, mp, rot, x, Eigen::VectorXd::Unit(3, i))(0) == doctest::Approx(u(i)));

  // a in the kernel of mu maps to zero
  AnchoredAlgebroid at = algebroid_from_dirac(tangent_dirac(2));
  IMForm partial{{zero_one_form(2), coordinate_one_form(2, 1)}};
  GroupActionData tr = translation_action(2, 0);
  Eigen::VectorXd y(2);
  y << 0.3, 0.4;
  CHECK(j_a(at, partial, tr, y, Eigen::VectorXd::Unit(2, 0)).norm() == 0.0);
  IMForm zero{{zero_one_form(2), zero_one_form(2)}};
  CHECK(j_a(at, zero, tr, y, Eigen::Vector2d(1.0, -2.0)).norm() == 0.0);
}

TEST_CASE("momentum morphism identity and its finite-difference oracle") {
  // abelian, zero-anchor case is exact
  DiracStructure lc = graph_of_poisson(zero_bivector(2));
  auto pts2 = box_samples("m", 2, -1.0, 1.0, 20, 112);
  CheckReport ab = check_ja_morphism(algebroid_from_dirac(lc), im_form_from_dirac(lc),
                                     translation_action(2, 0), pts2, 1e-12);
  CHECK(ab.pass);

  DiracStructure lp = graph_of_poisson(rotational_bivector());
  AnchoredAlgebroid ap = algebroid_from_dirac(lp);
  IMForm mp = im_form_from_dirac(lp);
  GroupActionData rot = rotation_action();
  auto pts3 = box_samples("xi", 3, 0.6, 1.4, 40, 113);
  CheckReport rep = check_ja_morphism(ap, mp, rot, pts3, 1e-6);
  CHECK(rep.pass);

  // finite-difference reconstruction at one point, pair (e0, e2):
  // [s0, s2] = -s1, so J([a,b]) = -J(e1)
  Eigen::VectorXd x(3);
  x << 0.4, 0.5, 0.6;
  auto jcomp = [&](const Eigen::VectorXd& y, int i) {
    return j_a(ap, mp, rot, y, Eigen::VectorXd::Unit(3, i))(0);
  };
  double jab = -jcomp(x, 1);
  const double h = 1e-5;
  auto lie_fd = [&](int along, int of) {
    Eigen::VectorXd rho = ap.anchor[along].values(x);
    return (jcomp(x + h * rho, of) - jcomp(x - h * rho, of)) / (2 * h);
  };
  double lb = lie_fd(0, 2);  // L_rho(e0) J(e2)
  double la = lie_fd(2, 0);  // L_rho(e2) J(e0)
  CHECK(std::abs(la) > 0.3);  // the flipped term is visibly nonzero
  CHECK(std::abs(jab - lb + la) < 1e-6);
  CHECK(std::abs(jab - lb - la) > 0.5);  // wrong sign on one term is caught
}

TEST_CASE("exact momentum criterion on the canonical phase plane") {
  // chart (q, p); translation in q has momentum p
  DiracStructure lw = graph_of_twoform(canonical_twoform(1));
  AnchoredAlgebroid aw = algebroid_from_dirac(lw);
  IMForm mw = im_form_from_dirac(lw);
  GroupActionData tr = translation_action(2, 0);
  auto pts = box_samples("qp", 2, -1.0, 1.0, 30, 114);

  CheckReport good = check_exact_momentum(aw, mw, tr, {coordinate_field(2, 1)}, pts, 1e-12);
  CHECK(good.pass);

  CheckReport badj = check_exact_momentum(aw, mw, tr, {scalar_const(2, 0.0)}, pts, 1e-6);
  CHECK_FALSE(badj.pass);
  CHECK(badj.max_residual == doctest::Approx(1.0));

  // rotational Poisson graph: the rotation generator (-x2, x1, 0) is the
  // sharp of -dx3, so its exact momentum is -x3
  DiracStructure lp = graph_of_poisson(rotational_bivector());
  auto pts3 = box_samples("xi", 3, 0.6, 1.4, 30, 115);
  CheckReport lie = check_exact_momentum(algebroid_from_dirac(lp), im_form_from_dirac(lp),
                                         rotation_action(),
                                         {field_scale(coordinate_field(3, 2), -1.0)}, pts3,
                                         1e-10);
  CHECK(lie.pass);
  CheckReport liebad = check_exact_momentum(algebroid_from_dirac(lp), im_form_from_dirac(lp),
                                            rotation_action(), {scalar_const(3, 0.0)}, pts3,
                                            1e-6);
  CHECK_FALSE(liebad.pass);
  CHECK(liebad.max_residual > 0.5);
}
