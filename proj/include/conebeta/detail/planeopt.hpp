#pragma once

#include <functional>

#include "conebeta/geom.hpp"
#include "conebeta/rng.hpp"
#include "conebeta/types.hpp"

namespace conebeta::geom::detail {

struct PlaneOptResult {
  AffinePlane plane;
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd params;
};

struct PlaneOptKnobs {
  int max_iterations = 500;
  double rel_tolerance = 1e-6;
  int stall_window = 25;
  int random_restarts = -1;  // negative -> d+1
};

/// Occupancy-balanced PCA: each point weighted by 1/|cell| on the h-grid so
/// dense sample regions do not dominate the fit.
AffinePlane weighted_pca_plane(const PointCloud& E, const Indices& subset, int d);

/// Derivative-free minimisation of `objective` over affine d-planes near the
/// ball: weighted-PCA and random point-tuple seeds, Nelder-Mead refinement on
/// a (rotation, offset) chart anchored at each seed. Deterministic per seed;
/// exact value ties resolve to the lexicographically smaller parameter vector.
PlaneOptResult optimize_plane(const PointCloud& E, const Ball& ball, int d,
                              const std::function<double(const AffinePlane&)>& objective,
                              uint64_t seed, const PlaneOptKnobs& knobs = {});

}  // namespace conebeta::geom::detail
