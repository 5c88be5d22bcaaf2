#include "conebeta/geom.hpp"

#include <Eigen/QR>
#include <cmath>

#include "conebeta/detail/planeopt.hpp"

namespace conebeta::geom {

AffinePlane::AffinePlane(Eigen::MatrixXd basis, Eigen::VectorXd offset)
    : basis_(std::move(basis)), offset_(std::move(offset)) {
  const int n = static_cast<int>(basis_.rows());
  const int d = static_cast<int>(basis_.cols());
  if (d < 1 || d >= n) throw std::invalid_argument("AffinePlane: need 1 <= d < n");
  if (offset_.size() != n) throw std::invalid_argument("AffinePlane: offset/ambient mismatch");
  // Gram-Schmidt with a degeneracy guard, then verify to 1e-12.
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < j; ++i) basis_.col(j) -= basis_.col(i).dot(basis_.col(j)) * basis_.col(i);
    double norm = basis_.col(j).norm();
    if (norm < 1e-12) throw std::invalid_argument("AffinePlane: degenerate basis");
    basis_.col(j) /= norm;
  }
  Eigen::MatrixXd gram = basis_.transpose() * basis_;
  if ((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("AffinePlane: basis not orthonormal");
}

Eigen::MatrixXd AffinePlane::complement() const {
  const int n = ambient(), d = dim();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis_);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - d);
}

Eigen::VectorXd AffinePlane::project(const Point& y) const {
  if (y.size() != offset_.size()) throw std::invalid_argument("project: dimension mismatch");
  Eigen::VectorXd w = y - offset_;
  return offset_ + basis_ * (basis_.transpose() * w);
}

AffinePlane AffinePlane::transformed(const Eigen::MatrixXd& rot, const Eigen::VectorXd& shift,
                                     double scale) const {
  return AffinePlane(rot * basis_, (rot * offset_) * scale + shift);
}

std::optional<AffinePlane> AffinePlane::through_points(const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  const int d = static_cast<int>(pts.cols()) - 1;
  if (d < 1 || d >= n) return std::nullopt;
  Eigen::MatrixXd span(n, d);
  for (int j = 0; j < d; ++j) span.col(j) = pts.col(j + 1) - pts.col(0);
  // reject near-degenerate tuples before orthonormalising
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);
  qr.setThreshold(1e-10);
  if (qr.rank() < d) return std::nullopt;
  try {
    return AffinePlane(span, pts.col(0));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

AffinePlane AffinePlane::axis_aligned(int n, int d, const Point& offset) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, d);
  for (int j = 0; j < d; ++j) b(j, j) = 1.0;
  return AffinePlane(b, offset);
}

Projection project(const Point& y, const AffinePlane& V) {
  Eigen::VectorXd onto = V.project(y);
  return Projection{onto, (y - onto).norm()};
}

ConeSpec::ConeSpec(Point apex_, AffinePlane axis_, double aperture_, double radius_, double alpha_)
    : apex(std::move(apex_)), axis(std::move(axis_)), aperture(aperture_), radius(radius_),
      alpha(alpha_) {
  if (!(aperture > 0.0)) throw std::invalid_argument("ConeSpec: aperture must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("ConeSpec: radius must be positive");
  if (alpha < 0.0 || alpha >= 1.0) throw std::invalid_argument("ConeSpec: alpha in [0,1)");
}

bool in_truncated_cone(const Point& y, const ConeSpec& spec) {
  Eigen::VectorXd u = spec.apex - y;
  double norm2 = u.squaredNorm();
  if (norm2 >= spec.radius * spec.radius) return false;
  Eigen::VectorXd tang = spec.axis.tangential(u);
  double t2 = tang.squaredNorm();
  double w2 = std::max(0.0, norm2 - t2);
  double t = std::sqrt(t2);
  double rhs = spec.aperture * std::pow(t, 1.0 + spec.alpha);
  return std::sqrt(w2) < rhs;
}

namespace {

double dist_to_cloud(const Eigen::VectorXd& y, const PointCloud& C) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < C.size(); ++i) best = std::min(best, (C.col(i) - y).squaredNorm());
  return std::sqrt(best);
}

}  // namespace

double local_hausdorff_distance(const PointCloud& A, const PointCloud& Bset, const Ball& ball) {
  double sup_a = 0.0, sup_b = 0.0;
  if (Bset.size() > 0) {
    for (int i : A.indices_in_ball(ball)) sup_a = std::max(sup_a, dist_to_cloud(A.col(i), Bset));
  }
  if (A.size() > 0) {
    for (int i : Bset.indices_in_ball(ball)) sup_b = std::max(sup_b, dist_to_cloud(Bset.col(i), A));
  }
  return std::max(sup_a, sup_b) / ball.radius;
}

Eigen::MatrixXd plane_sample(const AffinePlane& plane, const Ball& ball, int per_axis) {
  const int d = plane.dim();
  Eigen::VectorXd foot = plane.project(ball.center);
  double gap2 = (foot - ball.center).squaredNorm();
  double r2 = ball.radius * ball.radius;
  if (gap2 >= r2) return Eigen::MatrixXd(plane.ambient(), 0);
  double slice_r = std::sqrt(r2 - gap2);
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(d, 0);
  const int m = per_axis;
  for (;;) {
    Eigen::VectorXd t(d);
    for (int j = 0; j < d; ++j)
      t[j] = slice_r * (m == 1 ? 0.0 : -1.0 + 2.0 * idx[j] / double(m - 1));
    if (t.squaredNorm() <= slice_r * slice_r * (1.0 + 1e-12))
      pts.push_back(foot + plane.basis() * t);
    int j = 0;
    while (j < d && ++idx[j] == m) idx[j++] = 0;
    if (j == d) break;
  }
  Eigen::MatrixXd out(plane.ambient(), static_cast<int>(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) out.col(static_cast<int>(i)) = pts[i];
  return out;
}

double plane_hausdorff_distance(const AffinePlane& L, const AffinePlane& Lprime, const Ball& ball,
                                int per_axis) {
  double sup = 0.0;
  Eigen::MatrixXd sl = plane_sample(L, ball, per_axis);
  for (int i = 0; i < sl.cols(); ++i) sup = std::max(sup, Lprime.distance(sl.col(i)));
  Eigen::MatrixXd sr = plane_sample(Lprime, ball, per_axis);
  for (int i = 0; i < sr.cols(); ++i) sup = std::max(sup, L.distance(sr.col(i)));
  return sup / ball.radius;
}

double plane_to_cloud_gap(const AffinePlane& plane, const PointCloud& E, const Ball& ball,
                          int per_axis) {
  Eigen::MatrixXd s = plane_sample(plane, ball, per_axis);
  double sup = 0.0;
  for (int i = 0; i < s.cols(); ++i) sup = std::max(sup, dist_to_cloud(s.col(i), E));
  return sup;
}

ReifenbergResult reifenberg_theta(const PointCloud& E, const Ball& ball, int d, uint64_t seed) {
  Indices inside = E.indices_in_ball(ball);
  if (inside.empty()) throw std::invalid_argument("reifenberg_theta: E ∩ ball is empty");
  const int per_axis = d == 1 ? 65 : (d == 2 ? 17 : 7);
  auto objective = [&](const AffinePlane& plane) {
    double sup_e = 0.0;
    for (int i : inside) sup_e = std::max(sup_e, plane.distance(E.col(i)));
    double sup_l = plane_to_cloud_gap(plane, E, ball, per_axis);
    return std::max(sup_e, sup_l) / ball.radius;
  };
  auto result = detail::optimize_plane(E, ball, d, objective, seed);
  return ReifenbergResult{result.value, result.plane};
}

}  // namespace conebeta::geom
