#pragma once

// Quotient models, orbit distributions, the pushforward of a Dirac structure
// along a submersion, the reduced algebroid fiber data, and the comparison
// map between them.
//
// The quotient is an explicit submersion p: M -> N with a local section
// sigma: N -> M; every downstairs object is computed at sigma(y).  Orbit
// invariance is certified infinitesimally plus a one-step flow spot check.

#include <optional>
#include <vector>

#include <dirac/algebroid.hpp>
#include <dirac/courant.hpp>

namespace dirac {

struct QuotientModel {
  SmoothMap p;      // M -> N, submersion
  SmoothMap sigma;  // N -> M, local section of p

  int m_dim() const { return p.in_dim(); }
  int n_dim() const { return p.out_dim(); }
};

// Normalized aggregate (tol = 1) of:  |p(sigma(y)) - y| / section_tol,
// rank deficit of Dp, and subspace distance of ker Dp(sigma(y)) to the span
// of the action generators / kernel_tol.
CheckReport check_quotient_model(const QuotientModel& q, const GroupActionData& act,
                                 const std::vector<ChartPoint>& n_samples,
                                 double section_tol = 1e-9, double kernel_tol = 1e-8,
                                 double rank_tol = kRankTol);
// Throwing variant used as a construction gate.
void validate_quotient_model(const QuotientModel& q, const GroupActionData& act,
                             const std::vector<ChartPoint>& n_samples,
                             double section_tol = 1e-9, double kernel_tol = 1e-8,
                             double rank_tol = kRankTol);

// The generators as a frame of the orbit distribution, after verifying
// pointwise independence at the samples (throws naming the first point where
// the rank drops).
std::vector<VectorField> orbit_distribution(const GroupActionData& act,
                                            const std::vector<ChartPoint>& samples,
                                            double rank_tol = kRankTol);

// Fiber of L cap Kperp at x: frame coefficients c with
// sum_i c_i <a_part_i(x), u_M(x)> = 0 for every generator.
struct FiberBasis {
  Eigen::MatrixXd coeffs;   // k x r, orthonormal columns
  Eigen::MatrixXd stacked;  // 2n x r stacked section values
  int rank() const { return static_cast<int>(coeffs.cols()); }
};
FiberBasis intersect_l_kperp(const DiracStructure& l, const GroupActionData& act,
                             const Eigen::VectorXd& x, double rank_tol = kRankTol);

// Common rank across samples; throws on any variation (constant-rank
// hypothesis is a hard error).
int l_kperp_constant_rank(const DiracStructure& l, const GroupActionData& act,
                          const std::vector<ChartPoint>& samples, double rank_tol = kRankTol);

// dim of K cap L at x: elements of L with vanishing covector part whose
// vector part lies in the generator span.
int dim_k_cap_l(const DiracStructure& l, const GroupActionData& act, const Eigen::VectorXd& x,
                double rank_tol = kRankTol);

// Pointwise pushforward basis {(Dp X, beta) : (X, Dp^T beta) in L_x} at an
// arbitrary upstairs point; orthonormal 2 dimN x dimN columns.  Throws when
// the downstairs rank is not dim N.
Eigen::MatrixXd pushforward_basis_at(const DiracStructure& l, const QuotientModel& q,
                                     const Eigen::VectorXd& x, double rank_tol = kRankTol);
// The same fiber over y in N, computed at sigma(y).
Eigen::MatrixXd pushforward_dirac(const DiracStructure& l, const QuotientModel& q,
                                  const Eigen::VectorXd& y, double rank_tol = kRankTol);

// Smooth frame of the pushforward structure over N.  Solutions w = (c, beta)
// of  a_part(c) = Dp^T beta  are selected by freezing a null-space gauge at
// base_y (rows N0^T w = e_j); each j yields one smooth section.  The frame
// may be a redundant generating list (size > declared_rank) exactly when
// K cap L is nonzero.
SectionFrame pushforward_frame(const DiracStructure& l, const QuotientModel& q,
                               const Eigen::VectorXd& base_y, double rank_tol = kRankTol);

struct ReducedAlgebroidFiber {
  Eigen::VectorXd y;        // base point on N
  Eigen::VectorXd x;        // sigma(y)
  Eigen::MatrixXd coeffs;   // k x r upstairs frame coefficients
  Eigen::MatrixXd basis;    // 2n x r stacked fiber basis of L cap Kperp
  Eigen::MatrixXd rho_red;  // dimN x r, Dp . vector parts
  Eigen::MatrixXd mu_red;   // dimN x r, solutions of Dp^T beta = covector part

  int rank() const { return static_cast<int>(coeffs.cols()); }
};

// Fiber data at one y; mu_red systems must be solvable within solve_tol
// (anything else is an internal consistency error since the covector parts
// annihilate ker Dp).
ReducedAlgebroidFiber reduced_fiber(const DiracStructure& l, const GroupActionData& act,
                                    const QuotientModel& q, const Eigen::VectorXd& y,
                                    double rank_tol = kRankTol, double solve_tol = 1e-9);

// (rho_red(a), mu_red(a)) for fiber coefficients a.
Eigen::VectorXd r_map(const ReducedAlgebroidFiber& fiber, const Eigen::VectorXd& coeffs);

// Invariant sections of L cap Kperp upstairs matched with a downstairs frame
// along sigma; enables bracket-level checks.
struct MatchedFrames {
  std::vector<CourantSection> upstairs;    // on M
  std::vector<CourantSection> downstairs;  // on N
};

// Per sampled y, the max of:
//   (i)   subspace distance between image(r) and the pushforward fiber
//   (ii)  |dim ker r - dim(K cap L)| (integer, so any mismatch fails)
//   (iii) covector part of the projection of r(a) onto the pushforward fiber
//         vs mu_red(a)
//   (iv)  with matched frames: the matching defect along sigma and the
//         bracket morphism residual r([a_i,a_j]) vs [abar_i,abar_j]
CheckReport check_lemma_2red(const DiracStructure& l, const GroupActionData& act,
                             const QuotientModel& q, const std::vector<ChartPoint>& n_samples,
                             double tol, const MatchedFrames* matched = nullptr,
                             double rank_tol = kRankTol);

// True iff dim(K cap L) = 0 at every upstairs sample; the report carries the
// worst dimension and a histogram note.
struct PredicateResult {
  bool holds = false;
  std::vector<int> dims;
  CheckReport report;
};
PredicateResult thm_red_predicate(const DiracStructure& l, const GroupActionData& act,
                                  const std::vector<ChartPoint>& m_samples,
                                  double rank_tol = kRankTol);

// One classical 4th-order integration step of x' = f(x).
Eigen::VectorXd rk4_step(const VectorField& f, const Eigen::VectorXd& x, double h);

// Pushforward well-definedness spot check: move sigma(y) a short step along
// a fixed generator combination (staying on the p-fiber up to integration
// error) and compare the pointwise pushforward bases at both representatives.
CheckReport check_pushforward_flow_invariance(const DiracStructure& l, const QuotientModel& q,
                                              const GroupActionData& act,
                                              const std::vector<ChartPoint>& n_samples,
                                              double h, double tol,
                                              double rank_tol = kRankTol);

}  // namespace dirac
