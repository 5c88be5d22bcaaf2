#include "conebeta/types.hpp"

#include <algorithm>

namespace conebeta {

void PointCloud::recompute_bounds() {
  if (pts_.cols() == 0) {
    bbox_min_ = Eigen::VectorXd::Zero(dim_);
    bbox_max_ = Eigen::VectorXd::Zero(dim_);
    max_extent_ = 0.0;
    return;
  }
  bbox_min_ = pts_.rowwise().minCoeff();
  bbox_max_ = pts_.rowwise().maxCoeff();
  max_extent_ = (bbox_max_ - bbox_min_).maxCoeff();
}

double PointCloud::diameter() const {
  if (diam_ >= 0.0) return diam_;
  double best = 0.0;
  const int m = size();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      best = std::max(best, (pts_.col(i) - pts_.col(j)).squaredNorm());
  diam_ = std::sqrt(best);
  return diam_;
}

Indices PointCloud::indices_in_ball(const Ball& b) const {
  Indices out;
  const double r2 = b.radius * b.radius;
  for (int i = 0; i < size(); ++i) {
    if ((pts_.col(i) - b.center).squaredNorm() <= r2) out.push_back(i);
  }
  return out;
}

int PointCloud::nearest_index(const Point& y) const {
  if (empty()) throw std::logic_error("PointCloud: empty cloud has no nearest point");
  int best = 0;
  double bd = (pts_.col(0) - y).squaredNorm();
  for (int i = 1; i < size(); ++i) {
    double d2 = (pts_.col(i) - y).squaredNorm();
    if (d2 < bd) {
      bd = d2;
      best = i;
    }
  }
  return best;
}

double PointCloud::max_distance_from(const Point& y) const {
  double best = 0.0;
  for (int i = 0; i < size(); ++i) best = std::max(best, (pts_.col(i) - y).squaredNorm());
  return std::sqrt(best);
}

PointCloud PointCloud::transformed(const Eigen::MatrixXd& rot, const Eigen::VectorXd& shift,
                                   double scale) const {
  Eigen::MatrixXd out = (rot * pts_) * scale;
  out.colwise() += shift;
  return PointCloud(dim_, std::move(out), h_ * scale);
}

}  // namespace conebeta
