#include "conebeta/classify.hpp"

#include <algorithm>
#include <cmath>

#include "conebeta/detail/planeopt.hpp"
#include "conebeta/rng.hpp"
#include "conebeta/threads.hpp"

namespace conebeta::classify {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::summable: return "summable";
    case Verdict::divergent: return "divergent";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

BetaProfile beta_profile(const PointCloud& E, int point_index, int d, double p,
                         beta::BetaKind kind, double base, int k_lo, int k_hi,
                         const beta::BetaOptions& opts) {
  if (base <= 1.0) throw std::invalid_argument("beta_profile: need base > 1");
  if (k_hi < k_lo) throw std::invalid_argument("beta_profile: need k_hi >= k_lo");
  if (std::pow(base, -k_hi) < E.r_min() * (1.0 - 1e-12))
    throw std::invalid_argument("beta_profile: finest scale below the resolution floor 4h");
  BetaProfile prof;
  prof.point = point_index;
  prof.kind = kind;
  prof.p = p;
  prof.d = d;
  prof.base = base;
  prof.k_lo = k_lo;
  prof.k_hi = k_hi;
  const Eigen::VectorXd x = E.point(point_index);
  for (int k = k_lo; k <= k_hi; ++k) {
    double r = std::pow(base, -k);
    prof.scales.push_back(r);
    prof.values.push_back(beta::best_plane(E, Ball(x, r), d, p, kind, opts));
  }
  // nesting cross-check between adjacent scales
  const double expo = 1.0 + (std::isfinite(prof.p_effective()) ? d / prof.p_effective() : 0.0);
  for (size_t k = 0; k + 1 < prof.values.size(); ++k) {
    double bound = std::pow(base, expo) * prof.values[k].value;
    if (prof.values[k + 1].value > bound * (1.0 + 1e-9) + 1e-15) ++prof.monotonicity_flags;
  }
  return prof;
}

SquareFunctionResult square_function(const BetaProfile& profile, double alpha,
                                     const SquareThresholds& thr) {
  if (alpha < 0.0 || alpha >= 1.0) throw std::invalid_argument("square_function: alpha in [0,1)");
  if (profile.values.empty()) throw std::invalid_argument("square_function: empty profile");
  SquareFunctionResult res;
  res.alpha = alpha;
  res.thresholds = thr;
  double sum = 0.0;
  for (size_t k = 0; k < profile.values.size(); ++k) {
    double b = profile.values[k].value;
    double inc = b * b / std::pow(profile.scales[k], 2.0 * alpha);
    res.increments.push_back(inc);
    sum += inc;
    res.partial_sums.push_back(sum);
  }
  const int len = static_cast<int>(res.increments.size());
  const int window = std::max(2, len / 3);
  const int start = std::max(0, len - window);
  // geometric fit of the tail increments (positive entries only)
  {
    std::vector<std::pair<double, double>> pts;
    for (int k = start; k < len; ++k)
      if (res.increments[k] > 0.0) pts.emplace_back(double(k), std::log(res.increments[k]));
    if (pts.size() >= 2) {
      double n = double(pts.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      double slope = (n * sxy - sx * sy) / std::max(n * sxx - sx * sx, 1e-30);
      res.tail_ratio = std::exp(slope);
    } else {
      res.tail_ratio = 0.0;
    }
  }
  {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = start; k < len; ++k) {
      n += 1;
      sx += k;
      sy += res.partial_sums[k];
      sxx += double(k) * k;
      sxy += double(k) * res.partial_sums[k];
    }
    res.tail_slope = n >= 2 ? (n * sxy - sx * sy) / std::max(n * sxx - sx * sx, 1e-30) : 0.0;
  }
  double tail_min = std::numeric_limits<double>::infinity();
  for (int k = start; k < len; ++k) tail_min = std::min(tail_min, res.increments[k]);

  if (res.total() <= thr.negligible_sum) {
    res.verdict = Verdict::summable;
  } else if (res.tail_ratio <= thr.decay_ratio) {
    res.verdict = Verdict::summable;
  } else if (tail_min >= thr.divergence_floor) {
    res.verdict = Verdict::divergent;
  } else {
    res.verdict = Verdict::indeterminate;
  }
  return res;
}

double square_function_integral(const BetaProfile& profile, double alpha) {
  if (profile.values.size() < 2) return 0.0;
  double total = 0.0;
  const int sub = 32;
  for (size_t k = 0; k + 1 < profile.scales.size(); ++k) {
    double r_hi = profile.scales[k];      // larger radius
    double r_lo = profile.scales[k + 1];  // smaller radius
    double b2_hi = profile.values[k].value * profile.values[k].value;
    double b2_lo = profile.values[k + 1].value * profile.values[k + 1].value;
    double llo = std::log(r_lo), lhi = std::log(r_hi);
    double dl = (lhi - llo) / sub;
    for (int s = 0; s < sub; ++s) {
      double lr = llo + (s + 0.5) * dl;
      double r = std::exp(lr);
      double t = (lhi - lr) / (lhi - llo);  // 0 at r_hi, 1 at r_lo
      double b2;
      if (b2_hi > 0.0 && b2_lo > 0.0)
        b2 = std::exp((1.0 - t) * std::log(b2_hi) + t * std::log(b2_lo));
      else
        b2 = (1.0 - t) * b2_hi + t * b2_lo;
      total += b2 * std::pow(r, -2.0 * alpha) * dl;  // dr/r = d(log r)
    }
  }
  return total;
}

double discretization_constant(double base, double alpha, int d, double p) {
  double dp = std::isfinite(p) ? d / p : 0.0;
  return std::pow(base, 2.0 * (alpha + 1.0 + dp)) / std::log(base);
}

namespace {

bool paraboloid_covers(const PointCloud& E, int xi, const geom::AffinePlane& V, double lambda,
                       double alpha, double r) {
  const Eigen::VectorXd x = E.point(xi);
  const double r2 = r * r;
  for (int32_t j = 0; j < E.size(); ++j) {
    if (j == xi) continue;
    Eigen::VectorXd u = x - E.col(j);
    double n2 = u.squaredNorm();
    if (n2 == 0.0 || n2 >= r2) continue;  // open ball, apex duplicates skipped
    double t2 = V.tangential(u).squaredNorm();
    double w = std::sqrt(std::max(0.0, n2 - t2));
    if (!(w < lambda * std::pow(std::sqrt(t2), 1.0 + alpha))) return false;
  }
  return true;
}

}  // namespace

std::optional<ConeCertificate> cone_certificate(const PointCloud& E, int point_index, int d,
                                                double lambda, double alpha, double r0,
                                                uint64_t seed, const beta::BetaOptions& opts) {
  if (!(lambda > 0.0)) throw std::invalid_argument("cone_certificate: lambda > 0");
  if (r0 < E.r_min() * (1.0 - 1e-12))
    throw std::invalid_argument("cone_certificate: r0 below the resolution floor");
  const Eigen::VectorXd x = E.point(point_index);

  std::vector<geom::AffinePlane> candidates;
  beta::BetaOptions bopts = opts;
  bopts.skip_center_check = true;
  beta::OptimizerKnobs knobs;
  knobs.seed = seed;
  knobs.max_iterations = 200;
  for (double r = r0; r >= E.r_min() * (1.0 - 1e-12); r *= 0.5) {
    try {
      auto bv = beta::best_plane(E, Ball(x, r), d, 1.0, beta::BetaKind::beta_inf, bopts, knobs);
      candidates.push_back(bv.plane.through(x));
    } catch (const std::invalid_argument&) {
      break;
    }
  }
  {
    Indices local = E.indices_in_ball(Ball(x, std::max(E.r_min(), r0 * 0.25)));
    if (!local.empty())
      candidates.push_back(geom::detail::weighted_pca_plane(E, local, d).through(x));
  }
  candidates.push_back(geom::AffinePlane::axis_aligned(E.dim(), d, x));
  Rng rng(seed);
  for (int t = 0; t < 10; ++t) {
    Eigen::MatrixXd basis(E.dim(), d);
    for (int j = 0; j < d; ++j) basis.col(j) = rng.unit_vector(E.dim());
    try {
      candidates.emplace_back(geom::AffinePlane(basis, x));
    } catch (const std::invalid_argument&) {
    }
  }

  for (const auto& cand : candidates) {
    bool ok = true;
    for (double r = r0; r >= E.r_min() * (1.0 - 1e-12); r *= 0.5) {
      if (!paraboloid_covers(E, point_index, cand, lambda, alpha, r)) {
        ok = false;
        break;
      }
    }
    if (ok) return ConeCertificate{cand, lambda, r0, alpha};
  }
  return std::nullopt;
}

double tangent_defect(const PointCloud& E, const Point& x, const geom::AffinePlane& V, double r,
                      double alpha) {
  Indices inside = E.indices_in_ball(Ball(x, r));
  if (inside.empty()) throw std::invalid_argument("tangent_defect: empty ball");
  double sup = 0.0;
  for (int32_t i : inside) sup = std::max(sup, V.distance(E.col(i)));
  return sup / std::pow(r, 1.0 + alpha);
}

ClassifyResult classify_points(const PointCloud& E, const ClassifyParams& params,
                               const Indices& point_subset) {
  if (params.p > beta::p_limit(params.d) && !params.force_p)
    throw std::invalid_argument("classify: p exceeds the admissible limit 2d/(d-2) (use force)");
  Indices subset = point_subset;
  if (subset.empty()) {
    subset.resize(E.size());
    for (int32_t i = 0; i < E.size(); ++i) subset[i] = i;
  }
  int k_hi = params.k_hi;
  if (k_hi < 0) {
    k_hi = params.k_lo;
    while (std::pow(params.base, -(k_hi + 1)) >= E.r_min()) ++k_hi;
  }

  ClassifyResult result;
  result.labels.resize(subset.size());
  result.profiles.resize(subset.size());

  parallel_for(static_cast<int>(subset.size()), [&](int si) {
    PointLabel& label = result.labels[si];
    label.point = subset[si];
    try {
      beta::BetaOptions opts;
      opts.content_params = params.content_params;
      BetaProfile prof = beta_profile(E, subset[si], params.d, params.p, params.kind,
                                      params.base, params.k_lo, k_hi, opts);
      for (double a : params.alphas) {
        SquareFunctionResult sq = square_function(prof, a, params.thresholds);
        label.square_totals[a] = sq.total();
        if (a == 0.0)
          label.cone_verdict = sq.verdict;
        else
          label.paraboloid_verdicts[a] = sq.verdict;
      }
      if (params.with_certificates) {
        double r0 = prof.scales.front();
        for (double a : params.alphas) {
          std::optional<ConeCertificate> found;
          for (double lam : params.lambda_grid) {
            found = cone_certificate(E, subset[si], params.d, lam, a, r0,
                                     params.seed + 13 * subset[si], opts);
            if (found) break;
          }
          if (a == 0.0) {
            label.certificate = found;
          } else {
            label.paraboloid_certificates[a] = found.has_value();
          }
        }
      }
      if (label.cone_verdict && params.with_certificates) {
        label.agreement =
            (*label.cone_verdict == Verdict::summable) == label.certificate.has_value();
      }
      result.profiles[si] = std::move(prof);
    } catch (const std::exception& e) {
      label.error = e.what();
    }
  });

  ClassifySummary& sum = result.summary;
  sum.points = static_cast<int>(subset.size());
  int agree = 0, with_verdict = 0;
  for (const auto& label : result.labels) {
    if (!label.error.empty()) {
      ++sum.errors;
      continue;
    }
    for (double a : params.alphas) {
      Verdict v = a == 0.0 ? label.cone_verdict.value_or(Verdict::indeterminate)
                           : label.paraboloid_verdicts.at(a);
      if (v == Verdict::summable) ++sum.summable_counts[a];
      if (v == Verdict::divergent) ++sum.divergent_counts[a];
    }
    if (label.certificate) ++sum.certificates;
    if (label.cone_verdict && params.with_certificates) {
      ++with_verdict;
      if (label.agreement)
        ++agree;
      else
        sum.mismatches.push_back(label.point);
    }
  }
  sum.agreement_rate = with_verdict > 0 ? double(agree) / with_verdict : 1.0;
  return result;
}

}  // namespace conebeta::classify
