#pragma once

#include <map>

#include "conebeta/classify.hpp"
#include "conebeta/nets_cubes.hpp"
#include "conebeta/synth.hpp"
#include "conebeta/types.hpp"

namespace conebeta::suites {

struct CheckResult {
  std::string name;
  bool pass = false;
  double stat = 0.0;
  std::string note;
};

struct SuiteReport {
  std::string suite;
  long checked = 0;
  long violations = 0;
  std::vector<CheckResult> checks;
  std::map<std::string, double> constants;  // fitted constants, by name

  bool pass() const {
    if (violations > 0) return false;
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct SuiteOptions {
  int size = 120;     // points per generated cloud
  int clouds = 12;    // instances per family
  uint64_t seed = 1;
};

/// Deterministic test-cloud generator shared by the suites.
PointCloud make_cloud(const std::string& kind, int size, uint64_t seed);

std::vector<std::string> suite_names();

/// Nesting inequality with the outer ball's optimal plane reused inside.
SuiteReport monotonicity_suite(const SuiteOptions& opts);
/// beta^{d,1} against beta^{d,p} ratio bounds.
SuiteReport p_compare_suite(const SuiteOptions& opts);
/// sup-coefficient interpolation through the content coefficient, alpha in {0, 0.3, 0.7}.
SuiteReport interpolation_suite(const SuiteOptions& opts);
/// Choquet mean inequality with fitted constant.
SuiteReport jensen_suite(const SuiteOptions& opts);
/// Hausdorff- vs modified-content coefficients on lower-regular sets.
SuiteReport comparable_suite(const SuiteOptions& opts);
/// Cross-set transfer inequalities (subset and two-cloud forms).
SuiteReport transfer_suite(const SuiteOptions& opts);
/// Content estimator properties: monotone, subadditive, lower-regular.
SuiteReport content_suite(const SuiteOptions& opts);
/// Breakpoint Choquet evaluation against a 10^6-cell quadrature.
SuiteReport choquet_oracle_suite(const SuiteOptions& opts);
/// Rigid-motion invariance and scaling covariance of every beta kind.
SuiteReport invariance_suite(const SuiteOptions& opts);
/// Plane-angle control from separated points.
SuiteReport angle_suite(const SuiteOptions& opts);

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts);

/// Exhaustive partition/nesting/sandwich verification of a built cube tree.
SuiteReport christ_structural(const cubes::CubeTree& tree);

/// Region coherence, witnesses, and the delta^2 partial-sum bound for every
/// produced stopping region.
SuiteReport stopping_invariants(const cubes::StoppingForest& forest);

/// Dyadic sum vs integral quadrature of one profile at one alpha.
bool discretization_within_constant(const classify::BetaProfile& profile, double alpha,
                                    double* ratio_out = nullptr);

}  // namespace conebeta::suites
