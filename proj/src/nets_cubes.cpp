#include "conebeta/nets_cubes.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace conebeta::cubes {

namespace {

double ipow(double x, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= x;
  return r;
}

/// Uniform grid over the cloud for radius queries during net construction.
class GridIndex {
 public:
  GridIndex(const PointCloud& E, const std::vector<int32_t>& pts, double cell)
      : cloud_(E), cell_(cell) {
    for (int32_t i : pts) cells_[key(E.col(i))].push_back(i);
  }

  bool any_within(const Eigen::VectorXd& p, double r) const {
    const int n = cloud_.dim();
    int reach = static_cast<int>(std::ceil(r / cell_)) + 1;
    std::vector<int64_t> base(n);
    for (int a = 0; a < n; ++a) base[a] = static_cast<int64_t>(std::floor(p[a] / cell_));
    std::vector<int> off(n, -reach);
    for (;;) {
      int64_t h = 1469598103934665603LL;
      for (int a = 0; a < n; ++a) h = (h ^ (base[a] + off[a])) * 1099511628211LL;
      auto it = cells_.find(h);
      if (it != cells_.end()) {
        for (int32_t i : it->second)
          if ((cloud_.col(i) - p).norm() < r) return true;
      }
      int a = 0;
      while (a < n && ++off[a] > reach) off[a++] = -reach;
      if (a == n) break;
    }
    return false;
  }

  void insert(int32_t i) { cells_[key(cloud_.col(i))].push_back(i); }

 private:
  int64_t key(const Eigen::VectorXd& p) const {
    int64_t h = 1469598103934665603LL;
    for (int a = 0; a < p.size(); ++a)
      h = (h ^ static_cast<int64_t>(std::floor(p[a] / cell_))) * 1099511628211LL;
    return h;
  }

  const PointCloud& cloud_;
  double cell_;
  std::unordered_map<int64_t, std::vector<int32_t>> cells_;
};

}  // namespace

NetLevels build_nets(const PointCloud& E, double rho, int k_max) {
  if (!(rho > 0.0 && rho <= 0.5)) throw std::invalid_argument("build_nets: need 0 < rho <= 1/2");
  if (E.empty()) throw std::invalid_argument("build_nets: empty cloud");
  NetLevels nets;
  nets.rho = rho;
  double diam = E.diameter();
  nets.base_scale = diam > 0 ? diam * (1.0 + 1e-9) : E.resolution();
  if (k_max < 0) {
    k_max = 0;
    while (nets.scale(k_max + 1) >= E.r_min() && k_max < 60) ++k_max;
  }
  Indices previous;
  for (int k = 0; k <= k_max; ++k) {
    const double s = nets.scale(k);
    Indices level;
    GridIndex grid(E, {}, std::max(s, 1e-300));
    for (int32_t i : previous) {  // nested nets: earlier levels persist
      level.push_back(i);
      grid.insert(i);
    }
    for (int32_t i = 0; i < E.size(); ++i) {
      if (!grid.any_within(E.col(i), s)) {
        level.push_back(i);
        grid.insert(i);
      }
    }
    std::sort(level.begin(), level.end());
    nets.levels.push_back(std::move(level));
    previous = nets.levels.back();
  }
  return nets;
}

bool CubeTree::is_ancestor(int anc, int id) const {
  while (id != -1) {
    if (id == anc) return true;
    id = all[id].parent;
  }
  return false;
}

CubeTree build_cubes(const PointCloud& E, const NetLevels& nets, double c0) {
  if (!(c0 > 0.0 && c0 <= nets.rho / 2.0))
    throw std::invalid_argument("build_cubes: need 0 < c0 <= rho/2");
  CubeTree tree;
  tree.cloud = &E;
  tree.rho = nets.rho;
  tree.c0_requested = c0;
  tree.nets = nets;
  const int K = static_cast<int>(nets.levels.size()) - 1;

  // nearest finest-level net point per sample, ties to the smaller index
  const Indices& finest = nets.levels[K];
  std::vector<int32_t> assign(E.size());
  for (int32_t i = 0; i < E.size(); ++i) {
    int32_t best = finest[0];
    double bd = (E.col(finest[0]) - E.col(i)).squaredNorm();
    for (int32_t c : finest) {
      double d2 = (E.col(c) - E.col(i)).squaredNorm();
      if (d2 < bd || (d2 == bd && c < best)) {
        bd = d2;
        best = c;
      }
    }
    assign[i] = best;
  }

  // per level: parent net point of each net point (nearest at the level above)
  std::vector<std::unordered_map<int32_t, int32_t>> up(K + 1);
  for (int k = 1; k <= K; ++k) {
    const Indices& coarser = nets.levels[k - 1];
    for (int32_t c : nets.levels[k]) {
      int32_t best = coarser[0];
      double bd = (E.col(coarser[0]) - E.col(c)).squaredNorm();
      for (int32_t q : coarser) {
        double d2 = (E.col(q) - E.col(c)).squaredNorm();
        if (d2 < bd || (d2 == bd && q < best)) {
          bd = d2;
          best = q;
        }
      }
      up[k][c] = best;
    }
  }

  // chain each sample to its net ancestor at every level
  std::vector<std::vector<int32_t>> chain(E.size(), std::vector<int32_t>(K + 1));
  for (int32_t i = 0; i < E.size(); ++i) {
    int32_t c = assign[i];
    chain[i][K] = c;
    for (int k = K; k >= 1; --k) {
      c = up[k][c];
      chain[i][k - 1] = c;
    }
  }

  tree.by_level.resize(K + 1);
  std::vector<std::unordered_map<int32_t, int>> cube_of(K + 1);  // net point -> cube id
  for (int k = 0; k <= K; ++k) {
    for (int32_t c : nets.levels[k]) {
      Cube q;
      q.id = static_cast<int>(tree.all.size());
      q.level = k;
      q.center = c;
      q.side = 5.0 * nets.scale(k);
      tree.all.push_back(q);
      tree.by_level[k].push_back(q.id);
      cube_of[k][c] = q.id;
    }
  }
  for (int32_t i = 0; i < E.size(); ++i)
    for (int k = 0; k <= K; ++k) tree.all[cube_of[k][chain[i][k]]].members.push_back(i);
  // empty cubes cannot occur: every net point chains to itself
  for (auto& q : tree.all) std::sort(q.members.begin(), q.members.end());

  for (int k = 1; k <= K; ++k) {
    for (int32_t c : nets.levels[k]) {
      int id = cube_of[k][c];
      int pid = cube_of[k - 1][up[k][c]];
      tree.all[id].parent = pid;
      tree.all[pid].children.push_back(id);
    }
  }

  // effective inner constant: largest ratio such that B(x_Q, ratio * scale_k)
  // meets the cloud only inside Q, verified exhaustively
  double inner = std::numeric_limits<double>::infinity();
  for (const auto& q : tree.all) {
    const Eigen::VectorXd x = E.col(q.center);
    double nearest_out = std::numeric_limits<double>::infinity();
    size_t mi = 0;
    for (int32_t i = 0; i < E.size(); ++i) {
      if (mi < q.members.size() && q.members[mi] == i) {
        ++mi;
        continue;
      }
      nearest_out = std::min(nearest_out, (E.col(i) - x).norm());
    }
    if (std::isfinite(nearest_out))
      inner = std::min(inner, nearest_out / nets.scale(q.level));
  }
  if (!std::isfinite(inner)) inner = 5.0 * c0;  // single-cube-per-level degenerate case
  tree.inner_ratio = inner * (1.0 - 1e-12);
  tree.c0_effective = std::min(c0, tree.inner_ratio / 5.0);
  return tree;
}

// ---------------------------------------------------------------------------
// separated points

namespace {

struct SpanBuilder {
  Eigen::MatrixXd dirs;  // orthonormal columns
  Eigen::VectorXd anchor;
  int count = 0;

  explicit SpanBuilder(const Eigen::VectorXd& x0) : anchor(x0) {
    dirs.resize(x0.size(), 0);
  }

  double distance(const Eigen::VectorXd& y) const {
    Eigen::VectorXd u = y - anchor;
    if (count > 0) u -= dirs.leftCols(count) * (dirs.leftCols(count).transpose() * u);
    return u.norm();
  }

  bool add(const Eigen::VectorXd& y) {
    Eigen::VectorXd u = y - anchor;
    if (count > 0) u -= dirs.leftCols(count) * (dirs.leftCols(count).transpose() * u);
    double norm = u.norm();
    if (norm < 1e-14) return false;
    dirs.conservativeResize(Eigen::NoChange, count + 1);
    dirs.col(count) = u / norm;
    ++count;
    return true;
  }
};

std::optional<SeparationWitness> greedy_witness(const PointCloud& E, const Indices& cand,
                                                const Eigen::VectorXd& center, double threshold,
                                                double kappa, double r, int d) {
  // start from the candidate closest to the ball center
  int32_t x0 = cand[0];
  double bd = (E.col(cand[0]) - center).squaredNorm();
  for (int32_t i : cand) {
    double d2 = (E.col(i) - center).squaredNorm();
    if (d2 < bd || (d2 == bd && i < x0)) {
      bd = d2;
      x0 = i;
    }
  }
  SeparationWitness w;
  w.kappa = kappa;
  w.ball_radius = r;
  w.points.push_back(x0);
  SpanBuilder span(E.col(x0));
  for (int step = 0; step < d; ++step) {
    int32_t best = -1;
    double bestd = -1.0;
    for (int32_t i : cand) {
      double dist = span.distance(E.col(i));
      if (dist > bestd || (dist == bestd && best >= 0 && i < best)) {
        bestd = dist;
        best = i;
      }
    }
    if (best < 0 || bestd < threshold) return std::nullopt;
    w.points.push_back(best);
    w.margins.push_back(bestd);
    span.add(E.col(best));
  }
  return w;
}

std::optional<SeparationWitness> exhaustive_witness(const PointCloud& E, const Indices& cand,
                                                    double threshold, double kappa, double r,
                                                    int d) {
  SeparationWitness w;
  w.kappa = kappa;
  w.ball_radius = r;
  std::vector<int32_t> chosen;
  std::vector<double> margins;
  std::function<bool(SpanBuilder&)> rec = [&](SpanBuilder& span) -> bool {
    if (static_cast<int>(chosen.size()) == d + 1) return true;
    for (int32_t i : cand) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      if (chosen.empty()) {
        chosen.push_back(i);
        SpanBuilder next(E.col(i));
        if (rec(next)) return true;
        chosen.pop_back();
        continue;
      }
      double dist = span.distance(E.col(i));
      if (dist < threshold) continue;
      SpanBuilder next = span;
      if (!next.add(E.col(i))) continue;
      chosen.push_back(i);
      margins.push_back(dist);
      if (rec(next)) return true;
      chosen.pop_back();
      margins.pop_back();
    }
    return false;
  };
  SpanBuilder dummy(Eigen::VectorXd::Zero(E.dim()));
  if (!rec(dummy)) return std::nullopt;
  w.points.assign(chosen.begin(), chosen.end());
  w.margins = margins;
  return w;
}

}  // namespace

std::optional<SeparationWitness> separated_points_in_ball(const PointCloud& E, const Ball& ball,
                                                          double kappa, int d) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("separated_points: need kappa in (0,1)");
  Indices cand = E.indices_in_ball(ball);
  if (static_cast<int>(cand.size()) < d + 1) return std::nullopt;
  const double threshold = kappa * ball.radius;
  auto w = greedy_witness(E, cand, ball.center, threshold, kappa, ball.radius, d);
  if (w) return w;
  if (cand.size() <= 50 && d <= 3)
    return exhaustive_witness(E, cand, threshold, kappa, ball.radius, d);
  return std::nullopt;
}

std::optional<SeparationWitness> separated_points(const PointCloud& E, const CubeTree& tree,
                                                  int cube_id, double kappa, int d, double C1) {
  const Cube& q = tree.cube(cube_id);
  Ball ball(E.point(q.center), C1 * q.side);
  return separated_points_in_ball(E, ball, kappa, d);
}

AngleDiagnostic angle_diagnostic(const PointCloud& E, const Ball& Bprime, const Ball& B,
                                 const geom::AffinePlane& L, const geom::AffinePlane& Lprime,
                                 const SeparationWitness& witness, int d,
                                 const beta::BetaOptions& opts) {
  AngleDiagnostic out;
  out.lhs = geom::plane_hausdorff_distance(L, Lprime, Bprime);
  double b_big = beta::beta_with_plane(E, B.scaled(2.0), d, 1.0, L,
                                       beta::BetaKind::beta_content, opts);
  double b_small = beta::beta_with_plane(E, Bprime.scaled(2.0), d, 1.0, Lprime,
                                         beta::BetaKind::beta_content, opts);
  double ratio = B.radius / Bprime.radius;
  out.rhs = std::pow(witness.kappa, -(2.0 * d + 2.0)) *
            (std::pow(ratio, d + 1.0) * b_big + b_small);
  return out;
}

// ---------------------------------------------------------------------------
// stopping forest

namespace {

struct ForestBuilder {
  const CubeTree& tree;
  const PointCloud& E;
  const Indices& e0;
  int d;
  const StoppingParams& params;
  StoppingForest& forest;
  content::ContentCache cache;
  double shared_beta = -1.0;
  Ball bounding_ball;

  ForestBuilder(const CubeTree& t, const PointCloud& e, const Indices& e0_, int dd,
                const StoppingParams& p, StoppingForest& f)
      : tree(t), E(e), e0(e0_), d(dd), params(p), forest(f), cache(e),
        bounding_ball(e.point(t.cube(t.root()).center), 1.0) {
    const Eigen::VectorXd root_center = E.point(tree.cube(tree.root()).center);
    bounding_ball.radius =
        std::max(E.max_distance_from(root_center) * (1.0 + 1e-9), E.resolution());
  }

  bool meets_e0(int id) const {
    if (e0.empty()) return true;  // empty selector means the whole cloud
    const auto& members = tree.cube(id).members;
    for (int32_t i : e0)
      if (std::binary_search(members.begin(), members.end(), i)) return true;
    return false;
  }

  bool witness(int id) {
    if (forest.cube_witness[id] == 2) {
      auto w = separated_points(E, tree, id, params.kappa, d, params.C1);
      forest.cube_witness[id] = w.has_value() ? 1 : 0;
    }
    return forest.cube_witness[id] == 1;
  }

  double beta_of(int id) {
    if (forest.cube_beta[id] >= 0.0) return forest.cube_beta[id];
    const Cube& q = tree.cube(id);
    const double want = params.big_M() * params.big_M() * q.side;
    const Eigen::VectorXd x = E.point(q.center);
    double enclose = E.max_distance_from(x);
    beta::BetaOptions opts;
    opts.cache = &cache;
    opts.content_params = params.content_params;
    beta::OptimizerKnobs knobs;
    knobs.seed = params.seed;
    knobs.max_iterations = 150;
    double value;
    if (want >= enclose) {
      ++forest.clamped_balls;
      if (shared_beta < 0.0) {
        auto bv = beta::best_plane(E, bounding_ball, d, params.p,
                                   beta::BetaKind::beta_content, opts, knobs);
        shared_beta = bv.value;
        forest.shared_plane = bv.plane;
        forest.used_shared_plane = true;
      }
      value = shared_beta;
    } else {
      auto bv = beta::best_plane(E, Ball(x, want), d, params.p, beta::BetaKind::beta_content,
                                 opts, knobs);
      value = bv.value;
    }
    forest.cube_beta[id] = value;
    return value;
  }

  double term(int id) {
    const Cube& q = tree.cube(id);
    double b = beta_of(id);
    return b * b / std::pow(q.side, 2.0 * params.alpha);
  }

  TreeRegion build_region(int root) {
    TreeRegion region;
    region.root = root;
    if (!meets_e0(root)) {  // outside the selector: region ends here
      region.singleton = true;
      region.tree = {root};
      return region;
    }
    if (!witness(root)) {
      region.singleton = true;
      region.tree = {root};
      region.stop = {root};
      region.stop_b = {root};
      return region;
    }
    region.tree.push_back(root);
    const double delta2 = params.delta * params.delta;
    std::function<void(int, double)> descend = [&](int id, double sum) {
      const Cube& q = tree.cube(id);
      if (q.children.empty()) return;
      bool any_trigger = false, witness_trigger = false;
      std::vector<double> child_sums(q.children.size());
      for (size_t ci = 0; ci < q.children.size(); ++ci) {
        int c = q.children[ci];
        if (!witness(c)) {
          any_trigger = true;
          witness_trigger = true;
          continue;
        }
        child_sums[ci] = sum + term(c);
        if (child_sums[ci] >= delta2) any_trigger = true;
      }
      if (any_trigger) {
        region.stop.push_back(id);
        if (witness_trigger) region.stop_b.push_back(id);
        return;
      }
      for (size_t ci = 0; ci < q.children.size(); ++ci) {
        region.tree.push_back(q.children[ci]);
        descend(q.children[ci], child_sums[ci]);
      }
    };
    descend(root, term(root));
    std::sort(region.tree.begin(), region.tree.end());
    return region;
  }
};

void collect_descendants_at(const CubeTree& tree, int id, int depth, std::vector<int>& out) {
  if (depth == 0) {
    out.push_back(id);
    return;
  }
  for (int c : tree.cube(id).children) collect_descendants_at(tree, c, depth - 1, out);
}

}  // namespace

StoppingForest build_stopping_forest(const CubeTree& tree, const PointCloud& E,
                                     const Indices& e0, int d, const StoppingParams& params) {
  if (!(params.delta > 0.0 && params.delta < 1.0) || !(params.kappa > 0.0 && params.kappa < 1.0))
    throw std::invalid_argument("stopping forest: need delta, kappa in (0,1)");
  StoppingForest forest;
  forest.tree = &tree;
  forest.params = params;
  forest.d = d;
  forest.cube_beta.assign(tree.all.size(), -1.0);
  forest.cube_witness.assign(tree.all.size(), 2);

  // smallest k >= 1 with rho^-k <= c0 / (2 C1 kappa rho); none is a
  // parameter incompatibility
  const double bound = tree.c0_effective / (2.0 * params.C1 * params.kappa * tree.rho);
  double rki = 1.0 / tree.rho;
  if (rki > bound)
    throw std::invalid_argument(
        "stopping forest: no valid descent generation k* (rho^-k <= c0/(2 C1 kappa rho) "
        "fails at k = 1; decrease kappa or increase c0)");
  forest.k_star = 1;

  ForestBuilder builder(tree, E, e0, d, params, forest);
  std::vector<int> layer{tree.root()};
  std::unordered_set<int> seen;
  while (!layer.empty()) {
    forest.top_layers.push_back(layer);
    std::vector<int> next_layer;
    for (int q : layer) {
      if (!seen.insert(q).second) continue;
      TreeRegion region = builder.build_region(q);
      for (int rb : region.stop_b) {
        collect_descendants_at(tree, rb, forest.k_star, next_layer);
      }
      forest.regions.push_back(std::move(region));
    }
    std::sort(next_layer.begin(), next_layer.end());
    next_layer.erase(std::unique(next_layer.begin(), next_layer.end()), next_layer.end());
    layer = std::move(next_layer);
  }
  return forest;
}

std::vector<int> StoppingForest::top_cubes() const {
  std::vector<int> out;
  for (const auto& layer : top_layers) out.insert(out.end(), layer.begin(), layer.end());
  return out;
}

double packing_ratio(const StoppingForest& forest) {
  const CubeTree& tree = *forest.tree;
  double root_mass = ipow(tree.cube(tree.root()).side, forest.d);
  double total = 0.0;
  for (int q : forest.top_cubes()) total += ipow(tree.cube(q).side, forest.d);
  return total / root_mass;
}

// ---------------------------------------------------------------------------

std::string tree_to_json(const CubeTree& tree) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["rho"] = tree.rho;
  j["c0_requested"] = tree.c0_requested;
  j["c0_effective"] = tree.c0_effective;
  j["inner_ratio"] = tree.inner_ratio;
  j["levels"] = tree.by_level.size();
  j["base_scale"] = tree.nets.base_scale;
  nlohmann::json cubes = nlohmann::json::array();
  for (const auto& q : tree.all) {
    nlohmann::json c;
    c["id"] = q.id;
    c["level"] = q.level;
    c["center"] = q.center;
    c["side"] = q.side;
    c["parent"] = q.parent;
    c["children"] = q.children;
    c["member_count"] = q.members.size();
    cubes.push_back(std::move(c));
  }
  j["cubes"] = std::move(cubes);
  return j.dump();
}

std::string forest_to_json(const StoppingForest& forest) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["delta"] = forest.params.delta;
  j["kappa"] = forest.params.kappa;
  j["alpha"] = forest.params.alpha;
  j["C1"] = forest.params.C1;
  j["C2"] = forest.params.C2;
  j["M"] = forest.params.big_M();
  j["k_star"] = forest.k_star;
  j["clamped_beta_balls"] = forest.clamped_balls;
  j["packing_ratio"] = packing_ratio(forest);
  j["top_layers"] = forest.top_layers;
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : forest.regions) {
    nlohmann::json rr;
    rr["root"] = r.root;
    rr["singleton"] = r.singleton;
    rr["tree"] = r.tree;
    rr["stop"] = r.stop;
    rr["stop_b"] = r.stop_b;
    regions.push_back(std::move(rr));
  }
  j["regions"] = std::move(regions);
  nlohmann::json betas = nlohmann::json::array();
  for (size_t i = 0; i < forest.cube_beta.size(); ++i) {
    if (forest.cube_beta[i] >= 0.0) {
      betas.push_back({{"cube", i}, {"beta", forest.cube_beta[i]}});
    }
  }
  j["cube_betas"] = std::move(betas);
  return j.dump();
}

}  // namespace conebeta::cubes
