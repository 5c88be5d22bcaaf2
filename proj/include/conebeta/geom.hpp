#pragma once

#include <optional>
#include <utility>

#include "conebeta/types.hpp"

namespace conebeta::geom {

/// d-dimensional affine plane in R^n: orthonormal basis columns plus an
/// offset point on the plane.
class AffinePlane {
 public:
  AffinePlane() = default;
  /// Orthonormalizes the given spanning columns (tolerance 1e-12 enforced).
  AffinePlane(Eigen::MatrixXd basis, Eigen::VectorXd offset);

  int dim() const { return static_cast<int>(basis_.cols()); }
  int ambient() const { return static_cast<int>(basis_.rows()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::VectorXd& offset() const { return offset_; }

  /// Orthonormal basis of the orthogonal complement (computed lazily).
  Eigen::MatrixXd complement() const;

  Eigen::VectorXd project(const Point& y) const;
  double distance(const Point& y) const { return (y - project(y)).norm(); }

  /// Component of v inside span(basis) (linear part, no offset).
  Eigen::VectorXd tangential(const Eigen::VectorXd& v) const { return basis_ * (basis_.transpose() * v); }

  AffinePlane through(const Point& p) const { return AffinePlane(basis_, p); }
  AffinePlane transformed(const Eigen::MatrixXd& rot, const Eigen::VectorXd& shift,
                          double scale = 1.0) const;

  /// Plane through d+1 affinely independent points; nullopt when degenerate.
  static std::optional<AffinePlane> through_points(const Eigen::MatrixXd& pts);

  /// Canonical axis-aligned plane spanned by coordinate axes [0, d).
  static AffinePlane axis_aligned(int n, int d, const Point& offset);

 private:
  Eigen::MatrixXd basis_;
  Eigen::VectorXd offset_;
};

struct Projection {
  Point onto;
  double dist;
};

/// Orthogonal projection of y onto V plus the distance to V.
Projection project(const Point& y, const AffinePlane& V);

/// Truncated cone (alpha = 0) or truncated paraboloid (alpha in (0,1)) at
/// `apex` around the axis plane: |P_perp(apex-y)| < aperture * |P_axis(apex-y)|^(1+alpha),
/// intersected with the open ball of the given radius.
struct ConeSpec {
  Point apex;
  AffinePlane axis;
  double aperture = 0.0;
  double radius = 0.0;
  double alpha = 0.0;

  ConeSpec(Point apex_, AffinePlane axis_, double aperture_, double radius_, double alpha_);
};

/// Strict inequalities: ties resolve to "outside", and the apex itself is
/// outside (both projections vanish).
bool in_truncated_cone(const Point& y, const ConeSpec& spec);

/// Normalised local Hausdorff distance between two clouds: restriction to the
/// ball on the sup side only, distances taken against the full other set.
/// A sup over an empty side contributes 0.
double local_hausdorff_distance(const PointCloud& A, const PointCloud& Bset, const Ball& ball);

/// Deterministic grid sample of the slice plane ∩ ball (empty when they miss).
Eigen::MatrixXd plane_sample(const AffinePlane& plane, const Ball& ball, int per_axis);

/// Normalised local Hausdorff distance between two planes inside a ball,
/// evaluated on grid samples of both slices.
double plane_hausdorff_distance(const AffinePlane& L, const AffinePlane& Lprime, const Ball& ball,
                                int per_axis = 33);

/// One-sided variant against a cloud: max over the plane slice sample of the
/// distance to the full cloud, over r.
double plane_to_cloud_gap(const AffinePlane& plane, const PointCloud& E, const Ball& ball,
                          int per_axis);

struct ReifenbergResult {
  double theta;
  AffinePlane plane;
};

/// Optimal normalised bilateral distance from E to a d-plane inside the ball,
/// minimised over the same plane family the beta optimiser searches.
ReifenbergResult reifenberg_theta(const PointCloud& E, const Ball& ball, int d,
                                  uint64_t seed = 7);

}  // namespace conebeta::geom
