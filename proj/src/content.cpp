#include "conebeta/content.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

namespace conebeta::content {

namespace {

constexpr double kRelTol = 1e-12;

int64_t fnv_combine(int64_t h, int64_t v) { return (h ^ v) * 1099511628211LL; }

double ipow(double x, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= x;
  return r;
}

}  // namespace

Lattice::Lattice(const PointCloud& cloud) {
  const int n = cloud.dim();
  const double h = cloud.resolution();
  origin_ = cloud.bbox_min() - Eigen::VectorXd::Constant(n, h);
  root_side_ = cloud.max_extent() + 2.0 * h;
  int floor_level = 0;
  while (floor_level < 50 && side(floor_level) > h) ++floor_level;
  floor_level_ = floor_level;
  levels_ = floor_level_ + 1;
}

void Lattice::cell_of(const Eigen::VectorXd& p, int level, std::vector<int64_t>& out) const {
  const double s = side(level);
  out.resize(p.size());
  for (int a = 0; a < p.size(); ++a)
    out[a] = static_cast<int64_t>(std::floor((p[a] - origin_[a]) / s));
}

Eigen::VectorXd Lattice::cell_center(const Eigen::VectorXd& p, int level) const {
  const double s = side(level);
  Eigen::VectorXd c(p.size());
  for (int a = 0; a < p.size(); ++a)
    c[a] = origin_[a] + (std::floor((p[a] - origin_[a]) / s) + 0.5) * s;
  return c;
}

namespace {

int64_t cell_key(const Lattice& lat, const Eigen::VectorXd& p, int level) {
  const double s = lat.side(level);
  int64_t h = 1469598103934665603LL;
  h = fnv_combine(h, level);
  for (int a = 0; a < p.size(); ++a)
    h = fnv_combine(h, static_cast<int64_t>(std::floor((p[a] - lat.origin()[a]) / s)));
  return h;
}

double exact_diameter(const PointCloud& E, const Indices& A) {
  double best = 0.0;
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = i + 1; j < A.size(); ++j)
      best = std::max(best, (E.col(A[i]) - E.col(A[j])).squaredNorm());
  return std::sqrt(best);
}

double greedy_dyadic(const PointCloud& E, const Lattice& lat, int d, int level,
                     std::vector<int32_t>& idx) {
  const double s = lat.side(level);
  if (level >= lat.floor_level() || idx.size() == 1) {
    // below the resolution floor the cell itself is the cover
    if (level >= lat.floor_level()) return ipow(s, d);
  }
  std::unordered_map<int64_t, std::vector<int32_t>> groups;
  for (int32_t i : idx) groups[cell_key(lat, E.col(i), level + 1)].push_back(i);
  double sum = 0.0;
  for (auto& [key, grp] : groups) sum += greedy_dyadic(E, lat, d, level + 1, grp);
  return std::min(ipow(s, d), sum);
}

}  // namespace

ContentEstimate hausdorff_content(const PointCloud& E, const Indices& A, int d) {
  if (d < 1 || d >= E.dim()) throw std::invalid_argument("hausdorff_content: need 1 <= d < n");
  ContentEstimate est;
  est.method = ContentMethod::dyadic_greedy;
  if (A.empty()) return est;
  Lattice lat(E);
  Indices idx = A;
  double greedy = greedy_dyadic(E, lat, d, 0, idx);
  double hull = ipow(exact_diameter(E, A) + 2.0 * E.resolution(), d);
  est.value = std::min(greedy, hull);
  return est;
}

// ---------------------------------------------------------------------------
// good-collection validation on explicit ball lists

ValidationReport validate_good_collection(const PointCloud& E, const Ball& B,
                                          const std::vector<Ball>& balls, int d, double c1,
                                          double c2) {
  ValidationReport rep;
  if (balls.empty()) throw std::invalid_argument("validate_good_collection: empty collection");
  for (const auto& b : balls) {
    if (!std::isfinite(b.radius)) {
      rep.ok = false;
      rep.first_violation = CollectionViolation{-1, 0.0, "size", b.radius, 0.0};
      return rep;
    }
  }
  Indices host = E.indices_in_ball(B);
  // per ball: which host points it contains
  std::vector<std::vector<int>> members(balls.size());
  for (size_t bi = 0; bi < balls.size(); ++bi) {
    for (size_t k = 0; k < host.size(); ++k)
      if (balls[bi].contains(E.col(host[k]))) members[bi].push_back(static_cast<int>(k));
  }
  std::vector<double> radii;  // descending grid {2^-j r_B >= h} with r_B first
  for (double r = B.radius; r >= E.resolution() * (1.0 - kRelTol); r *= 0.5) radii.push_back(r);

  std::vector<char> mark(host.size());
  for (size_t k = 0; k < host.size(); ++k) {
    const Eigen::VectorXd x = E.col(host[k]);
    for (double r : radii) {
      for (size_t j = 0; j < host.size(); ++j)
        mark[j] = (E.col(host[j]) - x).norm() <= r ? 1 : 0;
      double lower = 0.0, upper = 0.0;
      for (size_t bi = 0; bi < balls.size(); ++bi) {
        bool touches = false;
        for (int j : members[bi])
          if (mark[j]) {
            touches = true;
            break;
          }
        if (!touches) continue;
        double mass = ipow(balls[bi].radius, d);
        lower += mass;
        if (balls[bi].radius <= r) upper += mass;
      }
      if (lower < c1 * ipow(r, d) * (1.0 - kRelTol)) {
        rep.ok = false;
        rep.first_violation =
            CollectionViolation{host[k], r, "lower", lower, c1 * ipow(r, d)};
        return rep;
      }
      if (upper > c2 * ipow(r, d) * (1.0 + kRelTol)) {
        rep.ok = false;
        rep.first_violation =
            CollectionViolation{host[k], r, "upper", upper, c2 * ipow(r, d)};
        return rep;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// content functionals

std::vector<double> ContentFunctional::nested_prefixes(const Indices& ordered,
                                                       const std::vector<int>& cuts) const {
  std::vector<double> out;
  out.reserve(cuts.size());
  for (int c : cuts) out.push_back(measure(Indices(ordered.begin(), ordered.begin() + c)));
  return out;
}

double default_c1(int d) { return ipow(0.25, d); }

double default_c2(int n, int d) { return ipow(4.0 * std::pow(3.0, n), d); }

HausdorffFunctional::HausdorffFunctional(const PointCloud& E, int d)
    : cloud_(E), lattice_(std::make_shared<Lattice>(E)), d_(d) {}

double HausdorffFunctional::measure(const Indices& subset) const {
  if (subset.empty()) return 0.0;
  Indices idx = subset;
  double greedy = greedy_dyadic(cloud_, *lattice_, d_, 0, idx);
  double hull = ipow(exact_diameter(cloud_, subset) + 2.0 * cloud_.resolution(), d_);
  return std::min(greedy, hull);
}

namespace {

/// Incremental dyadic tree: value(node) = min(side^d, sum of child values),
/// leaves at the resolution floor contribute side^d once occupied.
struct DyadicAccumulator {
  const PointCloud& cloud;
  const Lattice& lat;
  int d;
  struct Node {
    double value = 0.0;
    double child_sum = 0.0;
    bool occupied = false;
  };
  std::unordered_map<int64_t, Node> nodes;
  double root_value = 0.0;

  explicit DyadicAccumulator(const PointCloud& c, const Lattice& l, int dd)
      : cloud(c), lat(l), d(dd) {}

  void insert(int32_t pi) {
    const Eigen::VectorXd p = cloud.col(pi);
    const int floor = lat.floor_level();
    std::vector<int64_t> keys(floor + 1);
    for (int j = 0; j <= floor; ++j) keys[j] = cell_key(lat, p, j);
    double delta;
    {
      Node& leaf = nodes[keys[floor]];
      if (leaf.occupied) {
        delta = 0.0;
      } else {
        leaf.occupied = true;
        leaf.value = ipow(lat.side(floor), d);
        delta = leaf.value;
      }
    }
    for (int j = floor - 1; j >= 0; --j) {
      if (delta == 0.0) return;
      Node& node = nodes[keys[j]];
      node.occupied = true;
      node.child_sum += delta;
      double next = std::min(ipow(lat.side(j), d), node.child_sum);
      delta = next - node.value;
      node.value = next;
      if (j == 0) root_value = node.value;
    }
    if (floor == 0) root_value = nodes[keys[0]].value;
  }
};

}  // namespace

std::vector<double> HausdorffFunctional::nested_prefixes(const Indices& ordered,
                                                         const std::vector<int>& cuts) const {
  DyadicAccumulator acc(cloud_, *lattice_, d_);
  const double h2 = 2.0 * cloud_.resolution();
  std::vector<double> out;
  out.reserve(cuts.size());
  // lazy exact prefix diameter: extent-based lower bound decides when needed
  Eigen::VectorXd lo, hi;
  double exact_diam = 0.0;
  int exact_upto = 0;
  int inserted = 0;
  size_t ci = 0;
  auto flush_cuts = [&]() {
    while (ci < cuts.size() && cuts[ci] == inserted) {
      double value = acc.root_value;
      if (inserted > 0) {
        double extent = (hi - lo).maxCoeff();
        if (value > ipow(extent + h2, d_) * (1.0 + 1e-15)) {
          for (; exact_upto < inserted; ++exact_upto) {
            for (int j = 0; j < exact_upto; ++j)
              exact_diam = std::max(
                  exact_diam, (cloud_.col(ordered[exact_upto]) - cloud_.col(ordered[j])).norm());
          }
          value = std::min(value, ipow(exact_diam + h2, d_));
        }
      }
      out.push_back(value);
      ++ci;
    }
  };
  flush_cuts();
  for (int32_t pi : ordered) {
    Eigen::VectorXd p = cloud_.col(pi);
    if (inserted == 0) {
      lo = p;
      hi = p;
    } else {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    acc.insert(pi);
    ++inserted;
    flush_cuts();
  }
  while (ci < cuts.size()) {  // trailing cuts equal to full size
    flush_cuts();
    if (ci < cuts.size() && cuts[ci] != inserted)
      throw std::logic_error("nested_prefixes: cuts must be ascending and <= size");
  }
  return out;
}

// ---------------------------------------------------------------------------
// modified content

ModifiedFunctional::ModifiedFunctional(const PointCloud& E, const Ball& host, int d,
                                       ModifiedParams params)
    : cloud_(E), host_(host), d_(d) {
  if (E.dim() > 8) throw std::invalid_argument("modified content: ambient dimension > 8");
  c1_ = params.c1 >= 0 ? params.c1 : default_c1(d);
  c2_ = params.c2 >= 0 ? params.c2 : default_c2(E.dim(), d);
  if (c1_ > c2_) throw std::invalid_argument("modified content: need c1 <= c2");
  lattice_ = std::make_shared<Lattice>(E);
  build();
}

double ModifiedFunctional::ball_radius(int level) const {
  if (level < 0) return host_.radius;
  return lattice_->side(level) * std::max(1.0, std::sqrt(double(cloud_.dim())) / 2.0);
}

double ModifiedFunctional::smallest_admissible_scale() const {
  double best = host_.radius;
  for (int lvl : admissible_)
    if (lvl >= 0) best = std::min(best, ball_radius(lvl));
  return best;
}

void ModifiedFunctional::build() {
  host_points_ = cloud_.indices_in_ball(host_);
  for (size_t k = 0; k < host_points_.size(); ++k)
    host_local_[host_points_[k]] = static_cast<int>(k);
  const int n = cloud_.dim();
  const int m = static_cast<int>(host_points_.size());
  if (m == 0) {
    admissible_.clear();
    return;
  }

  // one-ball sentinel: good iff c1 <= 1 <= c2
  if (c1_ <= 1.0 && c2_ >= 1.0) admissible_.push_back(-1);

  // candidate lattice levels: sides from ~4 r_B down to the resolution floor
  std::vector<int> candidates;
  for (int j = 0; j <= lattice_->floor_level(); ++j) {
    double s = lattice_->side(j);
    if (s > 4.0 * host_.radius) continue;
    if (s < cloud_.resolution() * (1.0 - kRelTol)) break;
    candidates.push_back(j);
  }

  // pre-resolve per level: occupied cells and, per host point, the touching
  // cell ids (center within the cover-ball radius; offsets beyond +-1 cannot
  // reach since the ball radius is at most 1.5 cell sides for n <= 8)
  std::vector<LevelData> data;
  for (int lvl : candidates) {
    LevelData ld;
    ld.level = lvl;
    ld.radius = ball_radius(lvl);
    const double s = lattice_->side(lvl);
    std::vector<Eigen::VectorXd> centers;
    std::vector<int64_t> coord(n);
    for (int k = 0; k < m; ++k) {
      int64_t key = cell_key(*lattice_, cloud_.col(host_points_[k]), lvl);
      if (ld.cell_ids.emplace(key, static_cast<int>(centers.size())).second)
        centers.push_back(lattice_->cell_center(cloud_.col(host_points_[k]), lvl));
    }
    ld.touching.resize(m);
    for (int k = 0; k < m; ++k) {
      const Eigen::VectorXd p = cloud_.col(host_points_[k]);
      std::vector<int64_t> base(n);
      for (int a = 0; a < n; ++a)
        base[a] = static_cast<int64_t>(std::floor((p[a] - lattice_->origin()[a]) / s));
      std::vector<int> offs(n, -1);
      for (;;) {
        int64_t h = 1469598103934665603LL;
        h = fnv_combine(h, lvl);
        Eigen::VectorXd center(n);
        for (int a = 0; a < n; ++a) {
          h = fnv_combine(h, base[a] + offs[a]);
          center[a] = lattice_->origin()[a] + (double(base[a] + offs[a]) + 0.5) * s;
        }
        auto it = ld.cell_ids.find(h);
        // second comparison guards against hash collisions across cells
        if (it != ld.cell_ids.end() && (center - p).norm() <= ld.radius * (1.0 + kRelTol) &&
            (centers[it->second] - center).norm() < 0.25 * s)
          ld.touching[k].push_back(it->second);
        int a = 0;
        while (a < n && ++offs[a] == 2) offs[a++] = -1;
        if (a == n) break;
      }
    }
    data.push_back(std::move(ld));
  }

  // validation sweep: per host point, one distance sort shared by all levels
  std::vector<double> radii;  // ascending {2^-j r_B >= h} ∪ {r_B}
  for (double r = host_.radius; r >= cloud_.resolution() * (1.0 - kRelTol); r *= 0.5)
    radii.push_back(r);
  std::sort(radii.begin(), radii.end());

  std::vector<char> alive(data.size(), 1);
  std::vector<std::pair<double, int>> byd(m);
  std::vector<std::vector<int>> stamps(data.size());
  std::vector<int> stamp_version(data.size(), 0);
  for (size_t li = 0; li < data.size(); ++li)
    stamps[li].assign(data[li].cell_ids.size(), 0);

  for (int k = 0; k < m && std::any_of(alive.begin(), alive.end(), [](char c) { return c; });
       ++k) {
    const Eigen::VectorXd x = cloud_.col(host_points_[k]);
    for (int j = 0; j < m; ++j) byd[j] = {(cloud_.col(host_points_[j]) - x).norm(), j};
    std::sort(byd.begin(), byd.end());
    for (size_t li = 0; li < data.size(); ++li) {
      if (!alive[li]) continue;
      LevelData& ld = data[li];
      int version = ++stamp_version[li];
      int distinct = 0, ptr = 0;
      const double mass = ipow(ld.radius, d_);
      for (double r : radii) {
        while (ptr < m && byd[ptr].first <= r) {
          for (int cid : ld.touching[byd[ptr].second]) {
            if (stamps[li][cid] != version) {
              stamps[li][cid] = version;
              ++distinct;
            }
          }
          ++ptr;
        }
        double sum = distinct * mass;
        double rd = ipow(r, d_);
        if (sum < c1_ * rd * (1.0 - kRelTol)) {
          alive[li] = 0;
          break;
        }
        if (ld.radius <= r && sum > c2_ * rd * (1.0 + kRelTol)) {
          alive[li] = 0;
          break;
        }
      }
    }
  }

  for (size_t li = 0; li < data.size(); ++li) {
    if (alive[li]) {
      admissible_.push_back(data[li].level);
      level_data_.push_back(std::move(data[li]));
    }
  }
  if (admissible_.empty())
    throw std::invalid_argument(
        "modified content: no good uniform cover exists for these c1/c2 on this sample "
        "(need c1 <= 1 <= c2 or a denser sample)");
}

double ModifiedFunctional::measure(const Indices& subset) const {
  if (subset.empty() || host_points_.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  bool nonempty = false;
  std::vector<int> locals;
  locals.reserve(subset.size());
  for (int32_t i : subset) {
    auto it = host_local_.find(i);
    if (it != host_local_.end()) locals.push_back(it->second);
  }
  if (locals.empty()) return 0.0;
  nonempty = true;
  for (const auto& ld : level_data_) {
    std::vector<char> seen(ld.cell_ids.size(), 0);
    int distinct = 0;
    for (int lk : locals)
      for (int cid : ld.touching[lk])
        if (!seen[cid]) {
          seen[cid] = 1;
          ++distinct;
        }
    best = std::min(best, distinct * ipow(ld.radius, d_));
  }
  if (std::find(admissible_.begin(), admissible_.end(), -1) != admissible_.end())
    best = std::min(best, ipow(host_.radius, d_));
  return nonempty ? best : 0.0;
}

std::vector<double> ModifiedFunctional::nested_prefixes(const Indices& ordered,
                                                        const std::vector<int>& cuts) const {
  std::vector<double> out(cuts.size(), std::numeric_limits<double>::infinity());
  if (host_points_.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  std::vector<int> locals(ordered.size(), -1);
  for (size_t i = 0; i < ordered.size(); ++i) {
    auto it = host_local_.find(ordered[i]);
    if (it != host_local_.end()) locals[i] = it->second;
  }
  const bool sentinel =
      std::find(admissible_.begin(), admissible_.end(), -1) != admissible_.end();
  for (const auto& ld : level_data_) {
    std::vector<char> seen(ld.cell_ids.size(), 0);
    int distinct = 0;
    size_t ci = 0;
    int count = 0;
    const double mass = ipow(ld.radius, d_);
    auto flush = [&]() {
      while (ci < cuts.size() && cuts[ci] == count) {
        out[ci] = std::min(out[ci], distinct * mass);
        ++ci;
      }
    };
    flush();
    for (size_t i = 0; i < ordered.size(); ++i) {
      if (locals[i] >= 0)
        for (int cid : ld.touching[locals[i]])
          if (!seen[cid]) {
            seen[cid] = 1;
            ++distinct;
          }
      ++count;
      flush();
    }
  }
  for (size_t ci = 0; ci < cuts.size(); ++ci) {
    if (cuts[ci] == 0) {
      out[ci] = 0.0;
      continue;
    }
    bool any = false;
    for (int i = 0; i < cuts[ci]; ++i)
      if (locals[i] >= 0) {
        any = true;
        break;
      }
    if (!any)
      out[ci] = 0.0;
    else if (sentinel)
      out[ci] = std::min(out[ci], ipow(host_.radius, d_));
  }
  return out;
}

ContentEstimate modified_content(const PointCloud& E, const Ball& B, const Indices& A, int d,
                                 ModifiedParams params) {
  ModifiedFunctional mf(E, B, d, params);
  ContentEstimate est;
  est.method = ContentMethod::net_uniform_scale;
  est.value = mf.measure(A);
  if (!A.empty()) est.scale_used = mf.smallest_admissible_scale();
  return est;
}

// ---------------------------------------------------------------------------

namespace {

std::string ball_key(const Ball& b, int d, const ModifiedParams& p) {
  char buf[64];
  std::string key;
  for (int i = 0; i < b.center.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%a,", b.center[i]);
    key += buf;
  }
  std::snprintf(buf, sizeof(buf), "r%a|d%d|%a|%a", b.radius, d, p.c1, p.c2);
  key += buf;
  return key;
}

}  // namespace

std::shared_ptr<const ModifiedFunctional> ContentCache::modified(const Ball& host, int d,
                                                                 ModifiedParams params) {
  std::string key = ball_key(host, d, params);
  {
    std::shared_lock lock(mu_);
    auto it = modified_.find(key);
    if (it != modified_.end()) return it->second;
  }
  auto built = std::make_shared<const ModifiedFunctional>(cloud_, host, d, params);
  std::unique_lock lock(mu_);
  auto [it, inserted] = modified_.emplace(key, built);
  return it->second;
}

std::shared_ptr<const HausdorffFunctional> ContentCache::hausdorff(int d) {
  {
    std::shared_lock lock(mu_);
    auto it = hausdorff_.find(d);
    if (it != hausdorff_.end()) return it->second;
  }
  auto built = std::make_shared<const HausdorffFunctional>(cloud_, d);
  std::unique_lock lock(mu_);
  auto [it, inserted] = hausdorff_.emplace(d, built);
  return it->second;
}

}  // namespace conebeta::content
