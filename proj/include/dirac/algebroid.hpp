#pragma once

// Anchored Lie algebroids presented by frames, bundle-map 1-form families and
// their compatibility axioms, infinitesimal symmetries (lifted derivations),
// and the induced momentum maps.
//
// Two presentations are supported.  Structure-function mode carries anchors
// rho(e_i) and scalar fields c^k_ij with [e_i,e_j] = sum_k c^k_ij e_k.
// Dirac mode realizes the generators as Courant sections of a Dirac frame;
// the bracket is the Courant bracket and anchors are the vector parts.

#include <optional>
#include <string>
#include <vector>

#include <dirac/courant.hpp>

namespace dirac {

struct AnchoredAlgebroid {
  int n = 0;     // chart dimension
  int rank = 0;  // number of frame generators
  std::vector<VectorField> anchor;

  bool dirac_mode = false;
  SectionFrame frame;  // dirac mode only

  // structure-function mode only: c^k_ij flattened as ((k*rank)+i)*rank+j
  std::vector<ScalarField> structure;

  const ScalarField& c(int k, int i, int j) const {
    return structure[(static_cast<size_t>(k) * rank + i) * rank + j];
  }
};

struct IMForm {
  std::vector<OneForm> values;  // one form per frame generator

  int size() const { return static_cast<int>(values.size()); }
};

struct LieAlgebraData {
  int dim = 0;
  std::vector<double> f;  // f^k_ij flattened as ((k*dim)+i)*dim+j
  std::optional<Eigen::MatrixXd> bilinear;
  std::vector<std::string> labels;

  double fc(int k, int i, int j) const {
    return f[(static_cast<size_t>(k) * dim + i) * dim + j];
  }
};

// Validates antisymmetry, the Jacobi identity (brute force over all basis
// triples), and, when a bilinear form is given, symmetry, invertibility and
// ad-invariance.  Throws std::invalid_argument on violation.
LieAlgebraData make_lie_algebra(int d, std::vector<double> f,
                                std::optional<Eigen::MatrixXd> bilinear = std::nullopt,
                                std::vector<std::string> labels = {});

struct GroupActionData {
  LieAlgebraData algebra;
  std::vector<VectorField> generators;  // one field per basis element

  int dim() const { return algebra.dim; }
};

// Linear bivector on the dual space: P_ij(xi) = sum_k f^k_ij xi_k, so the
// coordinate brackets are {xi_i, xi_j} = sum_k f^k_ij xi_k.
BivectorField lie_poisson_bivector(const LieAlgebraData& g);

// Generator brackets realize the algebra ([u_i,u_j] = sum f^k_ij u_k) and the
// generators are pointwise independent; rank deficits count 1 per missing
// rank.  The note flags data that matches the opposite sign convention.
CheckReport check_action_structure(const GroupActionData& act,
                                   const std::vector<ChartPoint>& samples, double tol,
                                   double rank_tol = kRankTol);
// Same content as a constructor gate: throws std::runtime_error naming the
// sample point (and suggesting negated generators when that fixes the sign).
void validate_group_action(const GroupActionData& act, const std::vector<ChartPoint>& samples,
                           double tol = 1e-7, double rank_tol = kRankTol);

AnchoredAlgebroid algebroid_from_dirac(const DiracStructure& l);

// Structure-function mode; verifies c^k_ij = -c^k_ji and that the anchor
// maps generator brackets to field brackets at the samples.  Throws
// std::runtime_error naming the sample point on violation.
AnchoredAlgebroid algebroid_from_structure(std::vector<VectorField> anchors,
                                           std::vector<ScalarField> structure,
                                           const std::vector<ChartPoint>& samples,
                                           double tol = 1e-7);

IMForm im_form_from_dirac(const DiracStructure& l);

// ||rho([a,b]) - [rho(a),rho(b)]|| over frame pairs.
CheckReport check_anchor_intertwines(const AnchoredAlgebroid& a,
                                     const std::vector<ChartPoint>& samples, double tol);

// Residuals of the two compatibility axioms over all frame pairs:
//   <mu(b), rho(a)> + <mu(a), rho(b)>
//   mu([a,b]) - L_{rho(a)} mu(b) + i_{rho(b)} d mu(a)
CheckReport check_im_conditions(const AnchoredAlgebroid& a, const IMForm& mu,
                                const std::vector<ChartPoint>& samples, double tol);

// D_u (X, alpha) = ([u_M, X], L_{u_M} alpha)
CourantSection lifted_derivation(const GroupActionData& act, int u_index,
                                 const CourantSection& s);

// Distance of D_u s_i to the frame span, over generators and frame sections.
CheckReport check_action_preserves_dirac(const DiracStructure& l, const GroupActionData& act,
                                         const std::vector<ChartPoint>& samples, double tol);

// Explicit derivation values D_u e_i for algebroids that are not
// Dirac-induced (or to override the lift in mutation studies).
struct DerivationTable {
  std::vector<std::vector<CourantSection>> entries;  // [generator][frame index]
};

// Residuals of the three derivation compatibilities over generators and
// frame pairs:
//   D[a,b] - [Da,b] - [a,Db]
//   rho(D a) - [u_M, rho(a)]
//   L_{u_M} mu(a) - mu(D a)
// Needs a Dirac-induced algebroid or an explicit table; throws
// std::invalid_argument otherwise.
CheckReport check_infinitesimal_symmetry(const AnchoredAlgebroid& a, const IMForm& mu,
                                         const GroupActionData& act,
                                         const std::vector<ChartPoint>& samples, double tol,
                                         const DerivationTable* table = nullptr);

// component u of the canonical cotangent momentum: alpha(u_M(x))
Eigen::VectorXd j_can(const GroupActionData& act, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& alpha);

// momentum through mu: component u of sum_i a_i <mu(e_i)(x), u_M(x)>
Eigen::VectorXd j_a(const AnchoredAlgebroid& a, const IMForm& mu, const GroupActionData& act,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& coeffs);

// Residual of J([a,b]) - L_{rho(a)} J(b) + L_{rho(b)} J(a) per generator
// component over frame pairs.
CheckReport check_ja_morphism(const AnchoredAlgebroid& a, const IMForm& mu,
                              const GroupActionData& act,
                              const std::vector<ChartPoint>& samples, double tol);

// Residual of <mu(a), u_M> + d j_u (rho(a)); j supplies one scalar field per
// generator.
CheckReport check_exact_momentum(const AnchoredAlgebroid& a, const IMForm& mu,
                                 const GroupActionData& act,
                                 const std::vector<ScalarField>& j,
                                 const std::vector<ChartPoint>& samples, double tol);

}  // namespace dirac
