#pragma once

// Sections of TM + T*M, the symmetric pairing and Courant bracket, frames of
// subbundles, and the Dirac-structure constructors and verifiers.
//
// Checks run over sample points.  At each point the kernel evaluates one jet
// (value + Jacobian) per section and computes every pairwise quantity from
// the jets; frames that come from a bivector or 2-form graph carry their
// source so all section jets fall out of a single matrix-field jet.

#include <optional>
#include <variant>
#include <vector>

#include <dirac/calculus.hpp>
#include <dirac/chart.hpp>
#include <dirac/fields.hpp>
#include <dirac/linalg.hpp>
#include <dirac/runner.hpp>

namespace dirac {

struct CourantSection {
  VectorField x_part;
  OneForm a_part;

  int dim() const { return x_part.in_dim(); }
};

// <(X,a),(Y,b)> = b(X) + a(Y)
double pairing(const CourantSection& s1, const CourantSection& s2, const Eigen::VectorXd& x);
ScalarField section_pairing_field(const CourantSection& s1, const CourantSection& s2);

// [[ (X,a), (Y,b) ]] = ([X,Y], L_X b - i_Y da), built from field combinators
CourantSection courant_bracket(const CourantSection& s1, const CourantSection& s2);

// Value + Jacobian of both parts of a section at one point.
struct SectionJet {
  Eigen::VectorXd x, a;
  Eigen::MatrixXd jx, ja;  // jx(i,j) = d_j X_i, ja(i,j) = d_j a_i
};

struct SectionValue {
  Eigen::VectorXd x, a;
  Eigen::VectorXd stacked() const;
};

// Courant bracket value at a point, computed algebraically from two jets.
SectionValue courant_bracket_at(const SectionJet& s1, const SectionJet& s2);
double pairing_at(const SectionJet& s1, const SectionJet& s2);

struct SectionFrame {
  std::vector<CourantSection> sections;
  int declared_rank = 0;  // expected pointwise rank; defaults to size()
  // when the frame is the graph of a bivector/2-form, the source lets check
  // kernels derive every section jet from one matrix jet
  std::variant<std::monostate, BivectorField, TwoForm> source;

  int size() const { return static_cast<int>(sections.size()); }
  int dim() const { return sections.empty() ? 0 : sections[0].dim(); }
};

std::vector<SectionJet> frame_jets(const SectionFrame& f, const Eigen::VectorXd& x);
// 2n x k matrix of stacked section values
Eigen::MatrixXd frame_matrix(const std::vector<SectionJet>& jets);

struct DiracStructure {
  SectionFrame frame;

  int dim() const { return frame.dim(); }
};

// frame {(pi# dx_i, dx_i)}
DiracStructure graph_of_poisson(const BivectorField& pi);
// frame {(d_i, i_{d_i} w)}
DiracStructure graph_of_twoform(const TwoForm& w);
DiracStructure tangent_dirac(int n);    // L = TM: frame {(d_i, 0)}
DiracStructure cotangent_dirac(int n);  // L = T*M: frame {(0, dx_i)}

struct FrameCheckOptions {
  double rank_tol = kRankTol;
  // expected pointwise rank; unset means "must equal the chart dimension"
  // (the Lagrangian maximality requirement)
  std::optional<int> expect_rank;
};

// Isotropy (max |<s_i, s_j>|) plus the rank requirement; integer rank
// mismatches enter the residual with weight 1 per missing rank so they fail
// any tolerance below 1.
CheckReport check_lagrangian(const SectionFrame& f, const std::vector<ChartPoint>& samples,
                             double tol, const FrameCheckOptions& opts = {});

// Distance of every pairwise Courant bracket to the pointwise frame span.
CheckReport check_involutive(const SectionFrame& f, const std::vector<ChartPoint>& samples,
                             double tol, const FrameCheckOptions& opts = {});

// Builds the Dirac structure with frame {(rho_i, mu_i)} after verifying that
// the stacked frame has full rank n at every sample (no kernel overlap).
DiracStructure dirac_from_im(const std::vector<VectorField>& anchors,
                             const std::vector<OneForm>& mu,
                             const std::vector<ChartPoint>& samples,
                             double rank_tol = kRankTol);

// max over coordinate triples of the cyclic Jacobi sum
// sum_b (P_ib d_b P_jk + P_jb d_b P_ki + P_kb d_b P_ij) at x
double jacobi_residual(const BivectorField& pi, const Eigen::VectorXd& x);

}  // namespace dirac
