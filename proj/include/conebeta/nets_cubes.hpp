#pragma once

#include <optional>

#include "conebeta/beta.hpp"
#include "conebeta/types.hpp"

namespace conebeta::cubes {

/// Maximal separated nets, one per level: scale(k) = rho^k * (diam * (1+eps)),
/// nested across levels, greedy in index order.
struct NetLevels {
  double rho = 0.5;
  double base_scale = 0.0;  // scale at k = 0, slightly above diam
  std::vector<Indices> levels;

  double scale(int k) const { return base_scale * std::pow(rho, k); }
};

/// k_max < 0 picks the deepest level whose scale stays above r_min = 4h.
NetLevels build_nets(const PointCloud& E, double rho, int k_max = -1);

struct Cube {
  int id = -1;
  int level = 0;
  int32_t center = -1;  // cloud index of the net point x_Q
  double side = 0.0;    // l(Q) = 5 rho^k base_scale
  Indices members;      // sorted cloud indices
  int parent = -1;
  std::vector<int> children;
};

/// Christ-David hierarchy over the sample: per-level exact partition, nested
/// cubes, and the two-sided ball sandwich with a recorded effective inner
/// constant (the paper constants are unusable at desk scale, so the inner
/// radius is verified and shrunk adaptively).
struct CubeTree {
  const PointCloud* cloud = nullptr;
  double rho = 0.5;
  double c0_requested = 0.25;
  /// Effective inner constant relative to l(Q): B(x_Q, c0_eff*l(Q)) ∩ cloud ⊆ Q.
  double c0_effective = 0.0;
  /// Same constant relative to the net scale rho^k (inner_ratio = 5*c0_eff).
  double inner_ratio = 0.0;
  NetLevels nets;
  std::vector<Cube> all;             // flat storage, ids index into it
  std::vector<std::vector<int>> by_level;

  const Cube& cube(int id) const { return all[id]; }
  int root() const { return by_level.front().front(); }
  Ball outer_ball(int id) const { return Ball(cloud->point(all[id].center), all[id].side); }
  int depth() const { return static_cast<int>(by_level.size()); }
  bool is_ancestor(int anc, int id) const;
};

CubeTree build_cubes(const PointCloud& E, const NetLevels& nets, double c0);

struct SeparationWitness {
  Indices points;               // x_0..x_d, cloud indices
  double kappa = 0.0;
  double ball_radius = 0.0;
  std::vector<double> margins;  // dist(x_{i+1}, affine span{x_0..x_i}), i = 0..d-1
};

/// Greedy farthest-point search for d+1 points of E within C1*B_Q whose
/// successive affine-span distances reach kappa * r_ball; exhaustive
/// confirmation over ordered tuples when at most 50 candidates and d <= 3.
/// Absence of a witness is a heuristic certificate only.
std::optional<SeparationWitness> separated_points(const PointCloud& E, const CubeTree& tree,
                                                  int cube_id, double kappa, int d, double C1);

/// Same search on an explicit ball.
std::optional<SeparationWitness> separated_points_in_ball(const PointCloud& E, const Ball& ball,
                                                          double kappa, int d);

struct AngleDiagnostic {
  double lhs;  // d_{B'}(L, L')
  double rhs;  // kappa^-(2d+2) [ (r_B/r_B')^{d+1} beta(2B, L) + beta(2B', L') ]
};

AngleDiagnostic angle_diagnostic(const PointCloud& E, const Ball& Bprime, const Ball& B,
                                 const geom::AffinePlane& L, const geom::AffinePlane& Lprime,
                                 const SeparationWitness& witness, int d,
                                 const beta::BetaOptions& opts = {});

struct StoppingParams {
  double delta = 0.1;
  double kappa = 5e-4;
  double alpha = 0.0;
  double C1 = 8.0;
  double C2 = 4.0;
  double p = 1.0;
  content::ModifiedParams content_params{};
  uint64_t seed = 1;

  double big_M() const { return 2.0 + 4.0 * C2 + 4.0 * C1 * C2; }
};

struct TreeRegion {
  int root = -1;
  bool singleton = false;      // root lacked a witness
  std::vector<int> tree;       // cube ids, coherent region
  std::vector<int> stop;       // maximal cubes with a triggering child
  std::vector<int> stop_b;     // stop cubes triggered by a witness failure
  std::vector<int> next;       // k*-generation descendants of stop_b
};

struct StoppingForest {
  const CubeTree* tree = nullptr;
  StoppingParams params;
  int k_star = 0;
  std::vector<TreeRegion> regions;      // one per Top cube, in layer order
  std::vector<std::vector<int>> top_layers;
  std::vector<double> cube_beta;        // beta^{d,1}(M^2 B_Q), clamped; -1 = not evaluated
  std::vector<char> cube_witness;       // 0/1/2 = no/yes/not checked
  geom::AffinePlane shared_plane;       // optimal plane of the clamped global ball
  bool used_shared_plane = false;
  int clamped_balls = 0;
  int d = 0;

  std::vector<int> top_cubes() const;
};

/// Corona decomposition of the cube tree: regions stop below a cube once a
/// child either lacks (d+1,kappa)-separated points or pushes the accumulated
/// beta^2 / l^2alpha sum past delta^2. Witness failures seed the next layer of
/// top cubes k* generations down.
StoppingForest build_stopping_forest(const CubeTree& tree, const PointCloud& E,
                                     const Indices& e0, int d, const StoppingParams& params);

/// sum over Top of l(Q)^d, normalised by l(Q_0)^d.
double packing_ratio(const StoppingForest& forest);

std::string tree_to_json(const CubeTree& tree);
std::string forest_to_json(const StoppingForest& forest);

}  // namespace conebeta::cubes
