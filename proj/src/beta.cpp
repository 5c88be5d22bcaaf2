#include "conebeta/beta.hpp"

#include <cmath>

#include "conebeta/choquet.hpp"
#include "conebeta/detail/planeopt.hpp"

namespace conebeta::beta {

const char* kind_name(BetaKind k) {
  switch (k) {
    case BetaKind::beta_content: return "beta_content";
    case BetaKind::beta_bar: return "beta_bar";
    case BetaKind::beta_inf: return "beta_inf";
  }
  return "?";
}

namespace {

double ipow(double x, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= x;
  return r;
}

void check_preconditions(const PointCloud& E, const Ball& ball, int d, double p, BetaKind kind,
                         const BetaOptions& opts) {
  if (d < 1 || d >= E.dim()) throw std::invalid_argument("beta: need 1 <= d < n");
  if (kind != BetaKind::beta_inf) {
    if (!std::isfinite(p) || p < 1.0)
      throw std::invalid_argument("beta: content kinds need 1 <= p < infinity");
  }
  if (!opts.skip_center_check && !E.is_on_cloud(ball.center, E.resolution() * (1.0 + 1e-9)))
    throw std::invalid_argument("beta: ball must be centred on E (within h)");
}

std::shared_ptr<const content::ContentFunctional> make_mu(const PointCloud& E, const Ball& ball,
                                                          int d, BetaKind kind,
                                                          const BetaOptions& opts) {
  if (kind == BetaKind::beta_bar) {
    if (opts.cache) return opts.cache->hausdorff(d);
    return std::make_shared<const content::HausdorffFunctional>(E, d);
  }
  if (opts.cache) return opts.cache->modified(ball, d, opts.content_params);
  return std::make_shared<const content::ModifiedFunctional>(E, ball, d, opts.content_params);
}

double beta_from_distances(const PointCloud& E, const Ball& ball, int d, double p, BetaKind kind,
                           const Indices& inside, const std::vector<double>& dist_over_r,
                           const content::ContentFunctional* mu) {
  if (kind == BetaKind::beta_inf) {
    double sup = 0.0;
    for (double v : dist_over_r) sup = std::max(sup, v);
    return sup;
  }
  choquet::ValuedCloud vc;
  vc.base = &E;
  vc.values.assign(E.size(), 0.0);
  for (size_t k = 0; k < inside.size(); ++k) vc.values[inside[k]] = dist_over_r[k];
  double integral = choquet::choquet_integral(vc, inside, p, *mu);
  return std::pow(integral / ipow(ball.radius, d), 1.0 / p);
}

}  // namespace

double beta_with_plane(const PointCloud& E, const Ball& ball, int d, double p,
                       const geom::AffinePlane& L, BetaKind kind, const BetaOptions& opts) {
  check_preconditions(E, ball, d, p, kind, opts);
  Indices inside = E.indices_in_ball(ball);
  if (inside.empty()) throw std::invalid_argument("beta: E ∩ ball is empty");
  std::vector<double> dist(inside.size());
  for (size_t k = 0; k < inside.size(); ++k)
    dist[k] = L.distance(E.col(inside[k])) / ball.radius;
  std::shared_ptr<const content::ContentFunctional> mu;
  if (kind != BetaKind::beta_inf) mu = make_mu(E, ball, d, kind, opts);
  return beta_from_distances(E, ball, d, p, kind, inside, dist, mu.get());
}

BetaValue best_plane(const PointCloud& E, const Ball& ball, int d, double p, BetaKind kind,
                     const BetaOptions& opts, const OptimizerKnobs& knobs) {
  check_preconditions(E, ball, d, p, kind, opts);
  Indices inside = E.indices_in_ball(ball);
  if (inside.empty()) throw std::invalid_argument("beta: E ∩ ball is empty");
  std::shared_ptr<const content::ContentFunctional> mu;
  if (kind != BetaKind::beta_inf) mu = make_mu(E, ball, d, kind, opts);

  std::vector<double> dist(inside.size());
  auto objective = [&](const geom::AffinePlane& plane) {
    for (size_t k = 0; k < inside.size(); ++k)
      dist[k] = plane.distance(E.col(inside[k])) / ball.radius;
    return beta_from_distances(E, ball, d, p, kind, inside, dist, mu.get());
  };

  geom::detail::PlaneOptKnobs pk;
  pk.max_iterations = knobs.max_iterations;
  pk.rel_tolerance = knobs.rel_tolerance;
  pk.stall_window = knobs.stall_window;
  pk.random_restarts = knobs.random_restarts;
  auto result = geom::detail::optimize_plane(E, ball, d, objective, knobs.seed, pk);

  BetaValue out;
  out.kind = kind;
  out.value = result.value;
  out.plane = result.plane;
  out.p = kind == BetaKind::beta_inf ? std::numeric_limits<double>::infinity() : p;
  out.d = d;
  out.ball = ball;
  return out;
}

double p_limit(int d) {
  if (d < 1) throw std::invalid_argument("p_limit: need d >= 1");
  if (d <= 2) return std::numeric_limits<double>::infinity();
  return 2.0 * d / (d - 2.0);
}

}  // namespace conebeta::beta
