#pragma once

// Internal scenario plumbing shared by the scenario translation units: the
// expected reduction fingerprint, the aggregate check that verifies it, and
// the check spine common to every built-in scenario.

#include <dirac/scenario.hpp>

namespace dirac {

// What the reduction pipeline must produce for one scenario.  The aggregate
// check normalizes each component so that "residual < 1" is the pass
// condition: integer mismatches enter as |got - want| / 0.5, subspace and
// value distances as distance / tolerance, and boolean or gate failures as 2.
struct ReductionExpectations {
  int rank_l_kperp = 0;  // constant pointwise rank of L cap Kperp
  int dim_k_cap_l = 0;   // dim(K cap L) at every structure-chart sample
  int rank_l_quot = 0;   // pushforward fiber dimension (the quotient dim)
  int dim_ker_r = 0;     // kernel dimension of the fiber comparison map
  bool predicate = false;  // K cap L = 0 everywhere
  // when set, max |mu_red| over quotient samples must stay below this
  std::optional<double> mu_red_max;
  // when set, the pushforward fiber must coincide with this structure
  std::optional<DiracStructure> target;
  double target_tol = 1e-7;
  double lemma_tol = 1e-7;  // tolerance fed to the reduced-comparison check
  // injectivity gate: smallest singular value of the comparison map when the
  // expected kernel is trivial
  double min_sv_r = 1e-6;
};

// Single-check factories shared by the built-in spine and config-assembled
// scenarios; each samples the named chart.
ScenarioCheck lagrangian_check(DiracStructure l, std::string chart);
ScenarioCheck involutive_check(DiracStructure l, std::string chart);
ScenarioCheck im_axioms_check(DiracStructure l, std::string chart);
ScenarioCheck action_preserves_check(DiracStructure l, GroupActionData act, std::string chart);
ScenarioCheck infinitesimal_symmetry_check(DiracStructure l, GroupActionData act,
                                           std::string chart);

ScenarioCheck make_reduction_check(DiracStructure l, GroupActionData act, QuotientModel q,
                                   std::optional<MatchedFrames> frames,
                                   ReductionExpectations want, std::string m_chart,
                                   std::string n_chart);

// Appends the six structural checks plus the reduction aggregate, in the
// fixed order: action-structure, dirac-lagrangian, dirac-involutive,
// im-axioms, action-preserves-dirac, infinitesimal-symmetry, reduction.
void add_spine_checks(Scenario& s, const std::string& m_chart, const std::string& n_chart,
                      ReductionExpectations want);

// Defined in scenario_su2.cpp; variant selects the group chart basepoint.
Scenario make_nonintegrable_scenario(int basepoint_variant);

}  // namespace dirac
