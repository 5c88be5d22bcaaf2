#pragma once

#include <limits>
#include <memory>

#include "conebeta/content.hpp"
#include "conebeta/geom.hpp"
#include "conebeta/types.hpp"

namespace conebeta::beta {

enum class BetaKind {
  beta_content,  // content-weighted (modified content M^d_inf)
  beta_bar,      // Hausdorff-content weighted
  beta_inf       // sup-normalised Jones coefficient
};

const char* kind_name(BetaKind k);

struct BetaValue {
  BetaKind kind = BetaKind::beta_inf;
  double value = 0.0;
  geom::AffinePlane plane;
  double p = std::numeric_limits<double>::infinity();
  int d = 0;
  Ball ball;
};

struct BetaOptions {
  content::ModifiedParams content_params{};
  /// Optional shared cache for modified-content hosts.
  content::ContentCache* cache = nullptr;
  /// Skip the centered-on-E precondition check (for internal callers that
  /// already guarantee it).
  bool skip_center_check = false;
};

/// Flatness of E ∩ ball against a fixed plane:
///   content kinds: ((1/r^d) ∫ (dist(y,L)/r)^p dmu)^(1/p)
///   beta_inf:      sup dist(y,L)/r
double beta_with_plane(const PointCloud& E, const Ball& ball, int d, double p,
                       const geom::AffinePlane& L, BetaKind kind, const BetaOptions& opts = {});

struct OptimizerKnobs {
  uint64_t seed = 1;
  int random_restarts = -1;  // negative -> d+1
  int max_iterations = 500;
  double rel_tolerance = 1e-6;
  int stall_window = 25;
};

/// Heuristic minimisation over affine d-planes: weighted-PCA seed, random
/// point-tuple seeds, Nelder-Mead refinement on the (rotation, offset) chart.
/// Returns an upper bound on the infimum; deterministic for a fixed seed.
BetaValue best_plane(const PointCloud& E, const Ball& ball, int d, double p, BetaKind kind,
                     const BetaOptions& opts = {}, const OptimizerKnobs& knobs = {});

/// Admissible exponent limit: infinity for d in {1,2}, else 2d/(d-2).
double p_limit(int d);

}  // namespace conebeta::beta
