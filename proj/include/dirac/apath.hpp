#pragma once

// Discretized algebroid paths on uniform time grids: the defining anchor
// condition, the path-integrated momentum, concatenation, and pushforward
// through fiberwise-linear bundle maps.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <dirac/algebroid.hpp>

namespace dirac {

// N+1 samples over t in [0, 1].  Base-path velocities are derived from the
// grid: centered differences inside, 3-point one-sided stencils at the ends.
struct APath {
  Eigen::MatrixXd base;   // (N+1) x n base points, one row per node
  Eigen::MatrixXd coeff;  // (N+1) x k fiber coefficients

  int intervals() const { return static_cast<int>(base.rows()) - 1; }
  int dim() const { return static_cast<int>(base.cols()); }
  int rank() const { return static_cast<int>(coeff.cols()); }
  double time(int i) const { return static_cast<double>(i) / intervals(); }

  // needs at least 2 intervals (3 nodes)
  Eigen::VectorXd velocity(int i) const;
};

// Samples smooth closures over the uniform grid; both maps take the single
// input t.
APath sample_apath(const SmoothMap& base, const SmoothMap& coeff, int n_intervals);

// Integrates each column of uniformly spaced samples over [0, 1]: composite
// Simpson for an even interval count, trapezoid fallback otherwise.  Throws
// below 2 intervals.
Eigen::VectorXd integrate_columns(const Eigen::MatrixXd& samples);

// max_i |rho(a(t_i)) - xdot(t_i)|, the defining condition of an algebroid
// path.
CheckReport check_apath(const APath& path, const AnchoredAlgebroid& a, double tol);

// Path momentum: per algebra generator u, the quadrature of
// t -> <mu(a(t)), u_M(x(t))>.  For an exact momentum j this telescopes to
// j(start) - j(end).
Eigen::VectorXd integrate_J(const APath& path, const AnchoredAlgebroid& a, const IMForm& mu,
                            const GroupActionData& act);

// Componentwise quadrature of the coefficients; the momentum of a path in a
// trivial coefficient bundle over a point.
Eigen::VectorXd integrate_vector_path(const APath& path);

// Time-rescaled concatenation onto [0, 1].  Both halves must share the
// interval count (the output grid stays uniform) and the base endpoints must
// match within 1e-9.  Coefficients are doubled by the rescaling; the junction
// node stores the average of the two halves, so composable paths (matching
// coefficients at the joint) concatenate with exactly additive momenta.
APath concat(const APath& p1, const APath& p2);

// Fiberwise-linear bundle map: x -> rows x cols matrix (row-major flat
// output) over an optional base map; absent base means the identity.
struct BundleMap {
  int rows = 0, cols = 0;
  SmoothMap fiber;
  std::optional<SmoothMap> base;

  Eigen::MatrixXd fiber_at(const Eigen::VectorXd& x) const;
};

// Pushes the base path through the base map and every coefficient vector
// through the fiber matrix at its own base point.
APath map_apath(const BundleMap& psi, const APath& path);

// Same, plus the image path's anchor-condition report against the target
// (how a morphism candidate is vetted: morphisms map paths to paths).
std::pair<APath, CheckReport> map_apath_checked(const BundleMap& psi, const APath& path,
                                                const AnchoredAlgebroid& target, double tol);

}  // namespace dirac
