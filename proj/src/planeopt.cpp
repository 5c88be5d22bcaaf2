#include "conebeta/detail/planeopt.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <unordered_map>

namespace conebeta::geom::detail {

namespace {

int64_t hash_cell(const Eigen::VectorXd& p, const Eigen::VectorXd& anchor, double side) {
  int64_t h = 1469598103934665603LL;
  for (int a = 0; a < p.size(); ++a) {
    auto c = static_cast<int64_t>(std::floor((p[a] - anchor[a]) / side));
    h = (h ^ c) * 1099511628211LL;
  }
  return h;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

struct Chart {
  AffinePlane anchor;
  Eigen::MatrixXd normal;  // complement basis of anchor
  double offset_scale;

  AffinePlane realize(const Eigen::VectorXd& params) const {
    const int n = anchor.ambient(), d = anchor.dim();
    const int q = n - d;
    Eigen::MatrixXd span = anchor.basis();
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < q; ++i) span.col(j) += params[j * q + i] * normal.col(i);
    Eigen::VectorXd off = anchor.offset();
    for (int i = 0; i < q; ++i) off += params[d * q + i] * offset_scale * normal.col(i);
    return AffinePlane(span, off);
  }

  int dims() const { return (anchor.dim() + 1) * (anchor.ambient() - anchor.dim()); }
};

struct Candidate {
  double value;
  Eigen::VectorXd params;
  AffinePlane plane;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value < b.value;
  return lex_less(a.params, b.params);
}

Candidate nelder_mead(const Chart& chart,
                      const std::function<double(const AffinePlane&)>& objective,
                      const PlaneOptKnobs& knobs) {
  const int q = chart.dims();
  const double step = 0.25;
  std::vector<Eigen::VectorXd> xs(q + 1, Eigen::VectorXd::Zero(q));
  std::vector<double> fs(q + 1);
  std::vector<AffinePlane> planes(q + 1);
  auto eval = [&](const Eigen::VectorXd& x, AffinePlane* out) {
    AffinePlane p = chart.realize(x);
    double v = objective(p);
    if (out) *out = p;
    return v;
  };
  for (int i = 0; i <= q; ++i) {
    if (i > 0) xs[i][i - 1] = step;
    fs[i] = eval(xs[i], &planes[i]);
  }
  double stall_best = *std::min_element(fs.begin(), fs.end());
  int stall_at = 0;
  for (int iter = 0; iter < knobs.max_iterations; ++iter) {
    std::vector<int> order(q + 1);
    for (int i = 0; i <= q; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (fs[a] != fs[b]) return fs[a] < fs[b];
      return lex_less(xs[a], xs[b]);
    });
    int lo = order[0], hi = order[q], second_hi = order[q - 1];

    if (fs[lo] < stall_best * (1.0 - knobs.rel_tolerance) ||
        (stall_best > 0 && fs[lo] < stall_best - 1e-300)) {
      if (fs[lo] < stall_best * (1.0 - knobs.rel_tolerance)) {
        stall_best = fs[lo];
        stall_at = iter;
      }
    }
    if (iter - stall_at >= knobs.stall_window) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(q);
    for (int i = 0; i <= q; ++i)
      if (i != hi) centroid += xs[i];
    centroid /= q;

    Eigen::VectorXd xr = centroid + (centroid - xs[hi]);
    AffinePlane pr;
    double fr = eval(xr, &pr);
    if (fr < fs[lo]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[hi]);
      AffinePlane pe;
      double fe = eval(xe, &pe);
      if (fe < fr) {
        xs[hi] = xe; fs[hi] = fe; planes[hi] = pe;
      } else {
        xs[hi] = xr; fs[hi] = fr; planes[hi] = pr;
      }
    } else if (fr < fs[second_hi]) {
      xs[hi] = xr; fs[hi] = fr; planes[hi] = pr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (xs[hi] - centroid);
      AffinePlane pc;
      double fc = eval(xc, &pc);
      if (fc < fs[hi]) {
        xs[hi] = xc; fs[hi] = fc; planes[hi] = pc;
      } else {
        for (int i = 0; i <= q; ++i) {
          if (i == lo) continue;
          xs[i] = xs[lo] + 0.5 * (xs[i] - xs[lo]);
          fs[i] = eval(xs[i], &planes[i]);
        }
      }
    }
  }
  int lo = 0;
  for (int i = 1; i <= q; ++i) {
    if (fs[i] < fs[lo] || (fs[i] == fs[lo] && lex_less(xs[i], xs[lo]))) lo = i;
  }
  return Candidate{fs[lo], xs[lo], planes[lo]};
}

}  // namespace

AffinePlane weighted_pca_plane(const PointCloud& E, const Indices& subset, int d) {
  const int n = E.dim();
  const double side = E.resolution();
  std::unordered_map<int64_t, int> counts;
  for (int i : subset) counts[hash_cell(E.col(i), E.bbox_min(), side)]++;
  double wsum = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  std::vector<double> w(subset.size());
  for (size_t k = 0; k < subset.size(); ++k) {
    w[k] = 1.0 / counts[hash_cell(E.col(subset[k]), E.bbox_min(), side)];
    wsum += w[k];
    mean += w[k] * E.col(subset[k]);
  }
  mean /= wsum;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  for (size_t k = 0; k < subset.size(); ++k) {
    Eigen::VectorXd u = E.col(subset[k]) - mean;
    cov += w[k] * (u * u.transpose());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::MatrixXd basis(n, d);
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd v = es.eigenvectors().col(n - 1 - j);  // descending variance
    // deterministic sign: largest-magnitude entry positive
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    if (v[arg] < 0) v = -v;
    basis.col(j) = v;
  }
  try {
    return AffinePlane(basis, mean);
  } catch (const std::invalid_argument&) {
    return AffinePlane::axis_aligned(n, d, mean);
  }
}

PlaneOptResult optimize_plane(const PointCloud& E, const Ball& ball, int d,
                              const std::function<double(const AffinePlane&)>& objective,
                              uint64_t seed, const PlaneOptKnobs& knobs) {
  const int n = E.dim();
  Indices inside = E.indices_in_ball(ball);
  if (inside.empty()) throw std::invalid_argument("optimize_plane: empty ball");
  Rng rng(seed);

  std::vector<AffinePlane> seeds;
  AffinePlane pca = weighted_pca_plane(E, inside, d);
  seeds.push_back(pca);
  seeds.push_back(pca.through(ball.center));
  seeds.push_back(AffinePlane::axis_aligned(n, d, ball.center));
  int restarts = knobs.random_restarts < 0 ? d + 1 : knobs.random_restarts;
  for (int r = 0; r < restarts; ++r) {
    if (static_cast<int>(inside.size()) > d) {
      Eigen::MatrixXd tuple(n, d + 1);
      for (int j = 0; j <= d; ++j)
        tuple.col(j) = E.col(inside[rng.uniform_int(static_cast<int>(inside.size()))]);
      if (auto pl = AffinePlane::through_points(tuple)) {
        seeds.push_back(*pl);
        continue;
      }
    }
    // fallback: random orientation through a random inside point
    Eigen::MatrixXd basis(n, d);
    for (int j = 0; j < d; ++j) basis.col(j) = rng.unit_vector(n);
    try {
      seeds.emplace_back(basis, E.col(inside[rng.uniform_int(static_cast<int>(inside.size()))]));
    } catch (const std::invalid_argument&) {
    }
  }

  Candidate best;
  best.value = std::numeric_limits<double>::infinity();
  bool have = false;
  for (const auto& s : seeds) {
    Chart chart{s, s.complement(), ball.radius};
    Candidate c = nelder_mead(chart, objective, knobs);
    if (!have || better(c, best)) {
      best = c;
      have = true;
    }
  }
  return PlaneOptResult{best.plane, best.value, best.params};
}

}  // namespace conebeta::geom::detail
