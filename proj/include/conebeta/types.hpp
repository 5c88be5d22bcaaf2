#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace conebeta {

inline constexpr int kSchemaVersion = 1;

using Point = Eigen::VectorXd;
using Indices = std::vector<int32_t>;

struct Ball {
  Point center;
  double radius = 0.0;

  Ball() = default;
  Ball(Point c, double r) : center(std::move(c)), radius(r) {
    if (radius <= 0.0) throw std::invalid_argument("Ball: radius must be positive");
  }

  /// Closed-ball membership; ties on the sphere count as inside so that
  /// samples placed exactly at radius r participate.
  bool contains(const Point& y) const { return (y - center).norm() <= radius; }

  Ball scaled(double factor) const { return Ball(center, radius * factor); }
};

/// Finite sample of a set E in R^n together with the covering radius h of the
/// sample with respect to the ideal set. Geometry below the resolution floor
/// r_min = 4h is not meaningful and every multiscale loop stops there.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(int dim, Eigen::MatrixXd pts, double resolution)
      : dim_(dim), pts_(std::move(pts)), h_(resolution) {
    if (dim_ < 1) throw std::invalid_argument("PointCloud: dim must be >= 1");
    if (pts_.rows() != dim_) throw std::invalid_argument("PointCloud: row/dim mismatch");
    if (!(h_ > 0.0)) throw std::invalid_argument("PointCloud: resolution must be positive");
    recompute_bounds();
  }

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(pts_.cols()); }
  bool empty() const { return pts_.cols() == 0; }
  double resolution() const { return h_; }
  double r_min() const { return 4.0 * h_; }

  const Eigen::MatrixXd& matrix() const { return pts_; }
  Eigen::VectorXd point(int i) const { return pts_.col(i); }
  Eigen::MatrixXd::ConstColXpr col(int i) const { return pts_.col(i); }

  const Eigen::VectorXd& bbox_min() const { return bbox_min_; }
  const Eigen::VectorXd& bbox_max() const { return bbox_max_; }
  double bbox_diag() const { return (bbox_max_ - bbox_min_).norm(); }
  double max_extent() const { return max_extent_; }

  /// Exact diameter of the sample (cached after first call).
  double diameter() const;

  /// Sorted indices of sample points inside the closed ball.
  Indices indices_in_ball(const Ball& b) const;

  /// Index of the sample point nearest to y (smallest index on ties).
  int nearest_index(const Point& y) const;

  /// Largest distance from y to a sample point.
  double max_distance_from(const Point& y) const;

  /// True when y lies within tol of some sample point.
  bool is_on_cloud(const Point& y, double tol) const {
    return (pts_.col(nearest_index(y)) - y).norm() <= tol;
  }

  PointCloud transformed(const Eigen::MatrixXd& rot, const Eigen::VectorXd& shift,
                         double scale = 1.0) const;

 private:
  void recompute_bounds();

  int dim_ = 0;
  Eigen::MatrixXd pts_;
  double h_ = 0.0;
  Eigen::VectorXd bbox_min_, bbox_max_;
  double max_extent_ = 0.0;
  mutable double diam_ = -1.0;
};

}  // namespace conebeta
