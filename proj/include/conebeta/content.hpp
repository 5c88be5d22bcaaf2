#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <shared_mutex>

#include "conebeta/types.hpp"

namespace conebeta::content {

enum class ContentMethod { dyadic_greedy, net_uniform_scale };

struct ContentEstimate {
  double value = 0.0;
  ContentMethod method = ContentMethod::dyadic_greedy;
  std::optional<double> scale_used;
};

/// Cloud-anchored cell hierarchy. The root box is the bounding box padded by
/// h and cells are power-of-two subdivisions of it, so every estimate built
/// on top is exactly translation- and scaling-covariant.
class Lattice {
 public:
  explicit Lattice(const PointCloud& cloud);

  int levels() const { return levels_; }
  double side(int level) const { return root_side_ / static_cast<double>(1ull << level); }
  int floor_level() const { return floor_level_; }  // first level with side <= h

  /// Integer cell coordinates of a point at a level.
  void cell_of(const Eigen::VectorXd& p, int level, std::vector<int64_t>& out) const;
  /// Center of the cell containing p at a level.
  Eigen::VectorXd cell_center(const Eigen::VectorXd& p, int level) const;

  const Eigen::VectorXd& origin() const { return origin_; }
  double root_side() const { return root_side_; }
  int dim() const { return static_cast<int>(origin_.size()); }

 private:
  Eigen::VectorXd origin_;
  double root_side_ = 0.0;
  int levels_ = 0;
  int floor_level_ = 0;
};

/// Greedy dyadic-cover estimate of the Hausdorff content H^d_inf of the
/// h-thickened subset A of the cloud: a cell is split whenever the children
/// beat side^d, and the one-piece cover (diam(A)+2h)^d competes as well.
ContentEstimate hausdorff_content(const PointCloud& E, const Indices& A, int d);

struct GoodCollection {
  std::vector<Ball> balls;
  double c1 = 0.0;
  double c2 = 0.0;
  Ball host_ball;
};

struct CollectionViolation {
  int point_index;     // x in E ∩ B
  double radius;       // r at which a condition failed
  std::string condition;  // "lower" or "upper"
  double lhs, rhs;
};

struct ValidationReport {
  bool ok = true;
  std::optional<CollectionViolation> first_violation;
};

/// Checks finiteness of radii plus the lower/upper ball-sum conditions for
/// every x in E ∩ B over the geometric radius grid {2^-j r_B >= h} ∪ {r_B}.
ValidationReport validate_good_collection(const PointCloud& E, const Ball& B,
                                          const std::vector<Ball>& balls, int d, double c1,
                                          double c2);

struct ModifiedParams {
  double c1 = -1.0;  // negative -> default 4^-d
  double c2 = -1.0;  // negative -> default (4 * 3^n)^d
};

double default_c1(int d);
double default_c2(int n, int d);

/// Monotone set functional used by the Choquet integral. Implementations are
/// pure with internal caches safe for concurrent use.
class ContentFunctional {
 public:
  virtual ~ContentFunctional() = default;
  virtual double measure(const Indices& subset) const = 0;

  /// Measures of the nested prefixes ordered[0..cut) for each cut (cuts
  /// ascending). Default implementation calls measure() per cut.
  virtual std::vector<double> nested_prefixes(const Indices& ordered,
                                              const std::vector<int>& cuts) const;
};

/// Counting measure |A|; test stub referenced by the Choquet oracle suite.
class CountingFunctional final : public ContentFunctional {
 public:
  double measure(const Indices& subset) const override {
    return static_cast<double>(subset.size());
  }
};

/// Greedy dyadic H^d_inf estimator bound to one cloud.
class HausdorffFunctional final : public ContentFunctional {
 public:
  HausdorffFunctional(const PointCloud& E, int d);
  double measure(const Indices& subset) const override;
  std::vector<double> nested_prefixes(const Indices& ordered,
                                      const std::vector<int>& cuts) const override;

 private:
  const PointCloud& cloud_;
  std::shared_ptr<Lattice> lattice_;
  int d_;
};

/// Uniform-scale cover estimator of the modified content M^d_inf relative to
/// a host ball: minimises the touched-ball sum over validated lattice scales,
/// with the single host-sized ball always competing. Upper bound on the true
/// infimum over good collections.
class ModifiedFunctional final : public ContentFunctional {
 public:
  ModifiedFunctional(const PointCloud& E, const Ball& host, int d, ModifiedParams params = {});

  double measure(const Indices& subset) const override;
  std::vector<double> nested_prefixes(const Indices& ordered,
                                      const std::vector<int>& cuts) const override;

  double c1() const { return c1_; }
  double c2() const { return c2_; }
  const Ball& host() const { return host_; }
  const Indices& host_points() const { return host_points_; }
  /// Levels that validated as good collections (includes the one-ball cover
  /// sentinel as level -1).
  const std::vector<int>& admissible_levels() const { return admissible_; }
  double ball_radius(int level) const;
  double smallest_admissible_scale() const;

 private:
  double prefix_min(const std::vector<std::vector<int64_t>>& cells, int count) const;
  void build();

  const PointCloud& cloud_;
  Ball host_;
  int d_;
  double c1_, c2_;
  std::shared_ptr<Lattice> lattice_;
  Indices host_points_;
  std::vector<int> admissible_;  // -1 sentinel = single host ball
  // per admissible lattice level: cell key -> cell center, and per host point
  // the list of touching cell keys (stencil pre-resolved).
  struct LevelData {
    int level;
    double radius;
    std::unordered_map<int64_t, int> cell_ids;
    std::vector<std::vector<int>> touching;  // host-point-local index -> cell ids
  };
  std::vector<LevelData> level_data_;
  std::unordered_map<int32_t, int> host_local_;  // cloud index -> local index
};

ContentEstimate modified_content(const PointCloud& E, const Ball& B, const Indices& A, int d,
                                 ModifiedParams params = {});

/// Shared cache of modified-content functionals keyed by host ball and
/// parameters; concurrent readers, single writer per slot.
class ContentCache {
 public:
  explicit ContentCache(const PointCloud& E) : cloud_(E) {}

  std::shared_ptr<const ModifiedFunctional> modified(const Ball& host, int d,
                                                     ModifiedParams params = {});
  std::shared_ptr<const HausdorffFunctional> hausdorff(int d);

 private:
  const PointCloud& cloud_;
  std::shared_mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<const ModifiedFunctional>> modified_;
  std::unordered_map<int, std::shared_ptr<const HausdorffFunctional>> hausdorff_;
};

}  // namespace conebeta::content
