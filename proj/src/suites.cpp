#include "conebeta/suites.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "conebeta/choquet.hpp"
#include "conebeta/io.hpp"
#include "conebeta/detail/planeopt.hpp"
#include "conebeta/rng.hpp"
#include "conebeta/threads.hpp"

namespace conebeta::suites {

namespace {

double ipow(double x, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= x;
  return r;
}

struct Stat {
  std::mutex mu;
  long checked = 0;
  long violations = 0;
  std::map<std::string, double> max_constants;

  void count(bool ok) {
    std::lock_guard lock(mu);
    ++checked;
    if (!ok) ++violations;
  }
  void fit(const std::string& name, double c) {
    std::lock_guard lock(mu);
    auto [it, fresh] = max_constants.emplace(name, c);
    if (!fresh) it->second = std::max(it->second, c);
  }
};

int cloud_d(const std::string& kind) { return kind == "plane3" || kind == "blob3" ? 2 : 1; }

std::vector<std::string> default_kinds() {
  return {"uniform2", "segment", "graph", "cantor", "plane3"};
}

}  // namespace

PointCloud make_cloud(const std::string& kind, int size, uint64_t seed) {
  Rng rng(seed);
  if (kind == "uniform2" || kind == "blob3") {
    const int n = kind == "uniform2" ? 2 : 3;
    Eigen::MatrixXd pts(n, size);
    for (int i = 0; i < size; ++i)
      for (int a = 0; a < n; ++a) pts(a, i) = rng.uniform();
    return PointCloud(n, std::move(pts), 2.0 / std::sqrt(double(size)));
  }
  if (kind == "segment") {
    Eigen::MatrixXd pts(2, size);
    double h = 1.0 / (size - 1);
    for (int i = 0; i < size; ++i) {
      pts(0, i) = double(i) / (size - 1) + rng.uniform(-h / 8, h / 8);
      pts(1, i) = rng.uniform(-h / 8, h / 8);
    }
    return PointCloud(2, std::move(pts), h);
  }
  if (kind == "graph") {
    synth::SynthSpec s;
    s.family = synth::Family::lipschitz_graph;
    s.sample_count = size;
    s.seed = seed;
    s.slopes = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return synth::generate(s).cloud;
  }
  if (kind == "cantor") {
    synth::SynthSpec s;
    s.family = synth::Family::cantor4;
    s.depth = 4;
    s.seed = seed;
    return synth::generate(s).cloud;
  }
  if (kind == "plane3") {
    synth::SynthSpec s;
    s.family = synth::Family::plane;
    s.n = 3;
    s.d = 2;
    s.sample_count = size;
    s.noise = 1e-9;
    s.seed = seed;
    return synth::generate(s).cloud;
  }
  throw std::invalid_argument("make_cloud: unknown kind " + kind);
}

// ---------------------------------------------------------------------------

SuiteReport monotonicity_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "monotonicity";
  Stat stat;
  auto kinds = default_kinds();
  const int per_kind = opts.clouds;
  std::vector<std::pair<std::string, uint64_t>> jobs;
  for (const auto& k : kinds)
    for (int c = 0; c < per_kind; ++c) jobs.emplace_back(k, opts.seed + 977 * c + 13);

  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    const auto& [kind, seed] = jobs[ji];
    PointCloud E = make_cloud(kind, opts.size, seed);
    const int d = cloud_d(kind);
    const double p = 2.0;
    Rng rng(seed * 31 + 7);
    content::ContentCache cache(E);
    beta::BetaOptions bopts;
    bopts.cache = &cache;
    const double diam = E.diameter();
    for (int ci = 0; ci < 16; ++ci) {
      int center = rng.uniform_int(E.size());
      Eigen::VectorXd x = E.point(center);
      for (double frac : {0.5, 0.25, 0.12}) {
        double r = frac * diam;
        if (r < E.r_min() * 4) continue;
        Ball B(x, r);
        beta::BetaValue base;
        try {
          base = beta::best_plane(E, B, d, p, beta::BetaKind::beta_content, bopts);
        } catch (const std::exception&) {
          continue;
        }
        double base_bar =
            beta::beta_with_plane(E, B, d, p, base.plane, beta::BetaKind::beta_bar, bopts);
        double base_inf =
            beta::beta_with_plane(E, B, d, p, base.plane, beta::BetaKind::beta_inf, bopts);
        for (double f : {0.5, 0.25, 0.75}) {
          // half concentric, half offset to another sample point inside B
          Ball Bp = B;
          if (ci % 2 == 0) {
            Bp = Ball(x, f * r);
          } else {
            Indices in_sub = E.indices_in_ball(Ball(x, r * (1.0 - f) * 0.9));
            if (in_sub.empty()) continue;
            Eigen::VectorXd c2 = E.point(in_sub[rng.uniform_int(int(in_sub.size()))]);
            double rp = f * (r - (c2 - x).norm());
            if (rp <= E.r_min()) continue;
            Bp = Ball(c2, rp);
          }
          if (Bp.radius < E.r_min()) continue;
          if (E.indices_in_ball(Bp).empty()) continue;
          double ratio = std::pow(B.radius / Bp.radius, 1.0 + double(d) / p);
          double ratio_inf = B.radius / Bp.radius;
          try {
            double lhs =
                beta::beta_with_plane(E, Bp, d, p, base.plane, beta::BetaKind::beta_content, bopts);
            bool ok = lhs <= ratio * base.value * (1.0 + 1e-9) + 1e-15;
            stat.count(ok);
            if (base.value > 0) stat.fit("max_slack", lhs / (ratio * base.value));
            double lhs_bar =
                beta::beta_with_plane(E, Bp, d, p, base.plane, beta::BetaKind::beta_bar, bopts);
            stat.count(lhs_bar <= ratio * base_bar * (1.0 + 1e-9) + 1e-15);
            double lhs_inf =
                beta::beta_with_plane(E, Bp, d, p, base.plane, beta::BetaKind::beta_inf, bopts);
            stat.count(lhs_inf <= ratio_inf * base_inf * (1.0 + 1e-9) + 1e-15);
          } catch (const std::exception&) {
            continue;
          }
        }
      }
    }
  });
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"nested pairs hold exactly", stat.violations == 0,
                        double(stat.checked), ""});
  return rep;
}

SuiteReport p_compare_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "p_compare";
  Stat stat;
  auto kinds = default_kinds();
  std::vector<std::pair<std::string, uint64_t>> jobs;
  for (const auto& k : kinds)
    for (int c = 0; c < opts.clouds; ++c) jobs.emplace_back(k, opts.seed + 311 * c + 5);
  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    const auto& [kind, seed] = jobs[ji];
    PointCloud E = make_cloud(kind, opts.size, seed);
    const int d = cloud_d(kind);
    Rng rng(seed + 1);
    content::ContentCache cache(E);
    beta::BetaOptions bopts;
    bopts.cache = &cache;
    for (int ci = 0; ci < 6; ++ci) {
      Eigen::VectorXd x = E.point(rng.uniform_int(E.size()));
      Ball B(x, 0.4 * E.diameter());
      try {
        double b1 = beta::best_plane(E, B, d, 1.0, beta::BetaKind::beta_content, bopts).value;
        for (double p : {1.5, 2.0, 3.0}) {
          double bp = beta::best_plane(E, B, d, p, beta::BetaKind::beta_content, bopts).value;
          if (bp < 1e-13) {
            stat.count(b1 < 1e-8);
            continue;
          }
          stat.count(true);
          stat.fit("C_low_p_max", b1 / bp);
        }
      } catch (const std::exception&) {
      }
    }
  });
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"ratio beta1/betap finite", stat.violations == 0,
                        rep.constants.count("C_low_p_max") ? rep.constants["C_low_p_max"] : 0.0,
                        ""});
  return rep;
}

SuiteReport interpolation_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "interpolation";
  Stat stat;
  auto kinds = default_kinds();
  std::vector<std::pair<std::string, uint64_t>> jobs;
  for (const auto& k : kinds)
    for (int c = 0; c < opts.clouds; ++c) jobs.emplace_back(k, opts.seed + 733 * c + 3);
  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    const auto& [kind, seed] = jobs[ji];
    PointCloud E = make_cloud(kind, opts.size, seed);
    const int d = cloud_d(kind);
    Rng rng(seed + 2);
    content::ContentCache cache(E);
    beta::BetaOptions bopts;
    bopts.cache = &cache;
    for (int ci = 0; ci < 6; ++ci) {
      Eigen::VectorXd x = E.point(rng.uniform_int(E.size()));
      double r = 0.5 * E.diameter();
      try {
        double b1 = beta::best_plane(E, Ball(x, r), d, 1.0, beta::BetaKind::beta_content, bopts)
                        .value;
        double binf =
            beta::best_plane(E, Ball(x, r / 2), d, 1.0, beta::BetaKind::beta_inf, bopts).value;
        for (double alpha : {0.0, 0.3, 0.7}) {
          double lhs = std::pow(r, -alpha) * binf;
          double rhs = std::pow(std::pow(r, -alpha) * b1, 1.0 / (d + 1));
          if (rhs < 1e-13) {
            stat.count(lhs < 1e-6);
            continue;
          }
          stat.count(true);
          char name[32];
          std::snprintf(name, sizeof(name), "C_interp_a%.1f", alpha);
          stat.fit(name, lhs / rhs);
        }
      } catch (const std::exception&) {
      }
    }
  });
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"interpolation ratios finite", stat.violations == 0, 0.0, ""});
  return rep;
}

SuiteReport jensen_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "jensen";
  Stat stat;
  std::vector<uint64_t> jobs;
  for (int c = 0; c < opts.clouds * 9; ++c) jobs.push_back(opts.seed + 149 * c + 1);
  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    uint64_t seed = jobs[ji];
    Rng rng(seed);
    std::string kind = std::vector<std::string>{"segment", "graph", "plane3"}[ji % 3];
    PointCloud E = make_cloud(kind, opts.size, seed);
    const int d = cloud_d(kind);
    content::HausdorffFunctional H(E, d);
    Eigen::VectorXd x = E.point(rng.uniform_int(E.size()));
    Ball B(x, E.diameter() * rng.uniform(0.3, 0.8));
    Indices A = E.indices_in_ball(B);
    if (A.size() < 4) return;
    double mass = H.measure(A);
    if (mass < 1e-12) return;
    choquet::ValuedCloud vc;
    vc.base = &E;
    vc.values.assign(E.size(), 0.0);
    double a = rng.uniform(0.5, 6.0), b = rng.uniform(0, 3.0), c = rng.uniform(0, 1.0);
    for (int32_t i : A)
      vc.values[i] = std::abs(std::sin(a * E.col(i)[0] + b)) + c * std::abs(E.col(i)[1 % E.dim()]);
    for (double p : {2.0, 4.0}) {
      double lhs = choquet::choquet_integral(vc, A, 1.0, H) / mass;
      double rhs = std::pow(choquet::choquet_integral(vc, A, p, H) / mass, 1.0 / p);
      if (rhs < 1e-13) {
        stat.count(lhs < 1e-9);
        continue;
      }
      stat.count(true);
      stat.fit("C_jensen_max", lhs / rhs);
    }
  });
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"mean inequality ratios finite", stat.violations == 0,
                        rep.constants.count("C_jensen_max") ? rep.constants["C_jensen_max"] : 0,
                        ""});
  return rep;
}

SuiteReport comparable_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "comparable";
  Stat stat;
  std::vector<std::pair<std::string, uint64_t>> jobs;
  for (const auto& k : {"segment", "graph", "cantor", "plane3"})
    for (int c = 0; c < opts.clouds; ++c) jobs.emplace_back(k, opts.seed + 419 * c + 11);
  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    const auto& [kind, seed] = jobs[ji];
    PointCloud E = make_cloud(kind, opts.size, seed);
    const int d = cloud_d(kind);
    const double p = 2.0;
    Rng rng(seed + 3);
    content::ContentCache cache(E);
    beta::BetaOptions bopts;
    bopts.cache = &cache;
    for (int ci = 0; ci < 5; ++ci) {
      Eigen::VectorXd x = E.point(rng.uniform_int(E.size()));
      double r = rng.uniform(0.2, 0.45) * E.diameter();
      if (r < E.r_min() * 2) continue;
      Ball B(x, r);
      try {
        geom::AffinePlane L =
            beta::best_plane(E, B, d, p, beta::BetaKind::beta_content, bopts).plane;
        double beta_m = beta::beta_with_plane(E, B, d, p, L, beta::BetaKind::beta_content, bopts);
        double beta_h = beta::beta_with_plane(E, B, d, p, L, beta::BetaKind::beta_bar, bopts);
        // left side: Hausdorff-weighted never exceeds content-weighted
        stat.count(beta_h <= beta_m * (1.0 + 1e-9) + 1e-15);
        double beta_h2 =
            beta::beta_with_plane(E, B.scaled(2.0), d, p, L, beta::BetaKind::beta_bar, bopts);
        if (beta_h2 > 1e-13) stat.fit("C_comparable_max", beta_m / beta_h2);
      } catch (const std::exception&) {
      }
    }
  });
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"hausdorff <= content weighted (exact)", stat.violations == 0,
                        double(stat.checked), ""});
  return rep;
}

SuiteReport transfer_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "transfer";
  Stat stat;
  std::vector<uint64_t> jobs;
  for (int c = 0; c < opts.clouds * 3; ++c) jobs.push_back(opts.seed + 607 * c + 17);
  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    uint64_t seed = jobs[ji];
    Rng rng(seed);
    PointCloud F = make_cloud("graph", opts.size, seed);  // the larger LCR set
    const int d = 1;
    const double p = 2.0;
    // E: the graph with a few windows removed (still a subset of F)
    std::vector<int32_t> keep;
    double w0 = rng.uniform(0.1, 0.4), w1 = w0 + rng.uniform(0.05, 0.2);
    double w2 = rng.uniform(0.55, 0.8), w3 = w2 + rng.uniform(0.05, 0.15);
    for (int32_t i = 0; i < F.size(); ++i) {
      double t = F.col(i)[0];
      if ((t > w0 && t < w1) || (t > w2 && t < w3)) continue;
      keep.push_back(i);
    }
    if (keep.size() < 8) return;
    Eigen::MatrixXd pts(F.dim(), static_cast<int>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) pts.col(static_cast<int>(i)) = F.col(keep[i]);
    PointCloud E(F.dim(), std::move(pts), F.resolution());

    content::ContentCache cacheF(F), cacheE(E);
    beta::BetaOptions boF, boE;
    boF.cache = &cacheF;
    boE.cache = &cacheE;
    content::HausdorffFunctional HF(F, d);

    for (int ci = 0; ci < 4; ++ci) {
      Eigen::VectorXd x = E.point(rng.uniform_int(E.size()));
      double r = rng.uniform(0.2, 0.4) * F.diameter();
      Ball B(x, r), B2 = B.scaled(2.0);
      try {
        geom::AffinePlane L = beta::best_plane(E, B, d, p, beta::BetaKind::beta_content, boE).plane;
        // subset form: content-weighted beta of E against the host F
        double lhs = beta::beta_with_plane(E, B, d, p, L, beta::BetaKind::beta_content, boE);
        double rhs1 = beta::beta_with_plane(F, B2, d, p, L, beta::BetaKind::beta_content, boF);
        choquet::ValuedCloud vcF;
        vcF.base = &F;
        vcF.values.assign(F.size(), 0.0);
        Indices inF = F.indices_in_ball(B2);
        for (int32_t i : inF) {
          double dist = std::numeric_limits<double>::infinity();
          for (int32_t j = 0; j < E.size(); ++j)
            dist = std::min(dist, (F.col(i) - E.col(j)).norm());
          vcF.values[i] = dist / B.radius;
        }
        double err = std::pow(
            choquet::choquet_integral(vcF, inF, p, HF) / ipow(B.radius, d), 1.0 / p);
        if (rhs1 + err > 1e-13) {
          stat.count(true);
          stat.fit("C_subset_max", lhs / (rhs1 + err));
        } else {
          stat.count(lhs < 1e-9);
        }
        // two-set form with Hausdorff-weighted coefficients
        double lhs_bar = beta::beta_with_plane(E, B, d, p, L, beta::BetaKind::beta_bar, boE);
        double rhs_bar = beta::beta_with_plane(F, B2, d, p, L, beta::BetaKind::beta_bar, boF);
        if (rhs_bar + err > 1e-13) {
          stat.count(true);
          stat.fit("C_two_set_max", lhs_bar / (rhs_bar + err));
        } else {
          stat.count(lhs_bar < 1e-9);
        }
      } catch (const std::exception&) {
      }
    }
  });
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"transfer ratios finite", stat.violations == 0, 0.0, ""});
  return rep;
}

SuiteReport content_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "content";
  Stat stat;
  std::vector<std::pair<std::string, uint64_t>> jobs;
  for (const auto& k : default_kinds())
    for (int c = 0; c < opts.clouds; ++c) jobs.emplace_back(k, opts.seed + 257 * c + 29);
  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    const auto& [kind, seed] = jobs[ji];
    PointCloud E = make_cloud(kind, opts.size, seed);
    const int d = cloud_d(kind);
    Rng rng(seed + 4);
    // monotone + subadditive on random subsets of one cloud
    for (int t = 0; t < 6; ++t) {
      Indices A, A2;
      for (int32_t i = 0; i < E.size(); ++i) {
        double u = rng.uniform();
        if (u < 0.3) A.push_back(i);
        if (u < 0.6) A2.push_back(i);  // A ⊆ A2
      }
      double cA = content::hausdorff_content(E, A, d).value;
      double cA2 = content::hausdorff_content(E, A2, d).value;
      stat.count(cA <= cA2 * (1.0 + 1e-12) + 1e-300);
      Indices B;
      for (int32_t i = 0; i < E.size(); ++i)
        if (rng.uniform() < 0.3) B.push_back(i);
      Indices U = A;
      U.insert(U.end(), B.begin(), B.end());
      std::sort(U.begin(), U.end());
      U.erase(std::unique(U.begin(), U.end()), U.end());
      double cB = content::hausdorff_content(E, B, d).value;
      double cU = content::hausdorff_content(E, U, d).value;
      stat.count(cU <= (cA + cB) * (1.0 + 1e-12) + 1e-300);
    }
    // modified-content lower regularity, exact on the radius grid
    Eigen::VectorXd x0 = E.point(rng.uniform_int(E.size()));
    Ball host(x0, 0.6 * E.diameter());
    try {
      content::ModifiedFunctional M(E, host, d);
      content::HausdorffFunctional H(E, d);
      Indices hostA = M.host_points();
      for (double r = host.radius; r >= E.r_min(); r *= 0.5) {
        for (int t = 0; t < 4; ++t) {
          int32_t xi = hostA[rng.uniform_int(int(hostA.size()))];
          Ball query(E.point(xi), r);
          Indices A;
          for (int32_t i : hostA)
            if (query.contains(E.col(i))) A.push_back(i);
          double m = M.measure(A);
          stat.count(m >= M.c1() * ipow(r, d) * (1.0 - 1e-9));
          double h = H.measure(A);
          if (m > 1e-13) stat.fit("C_h_over_m_max", h / m);
        }
      }
    } catch (const std::exception&) {
    }
  });
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"monotone/subadditive/lower-regular", stat.violations == 0,
                        double(stat.checked), ""});
  return rep;
}

SuiteReport choquet_oracle_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "choquet_oracle";
  Stat stat;
  const int instances = std::max(100, opts.clouds * 9);
  std::vector<double> errs(instances, 0.0);
  parallel_for(instances, [&](int t) {
    Rng rng(opts.seed + 31 * t + 41);
    int m = 5 + rng.uniform_int(30);
    PointCloud base = make_cloud("segment", std::max(m, 8), opts.seed + t);
    choquet::ValuedCloud vc;
    vc.base = &base;
    vc.values.assign(base.size(), 0.0);
    Indices A;
    for (int i = 0; i < m; ++i) {
      A.push_back(i);
      vc.values[i] = rng.uniform_int(1001) / 1000.0;  // lattice values align with the grid
    }
    double p = std::vector<double>{1.0, 2.0, 3.0}[t % 3];
    content::CountingFunctional mu;
    double ours = choquet::choquet_integral(vc, A, p, mu);
    // million-cell quadrature over [0,1]: counts at cell midpoints, exact
    // t^(p-1) integral per cell
    std::vector<double> sorted;
    for (int32_t i : A) sorted.push_back(vc.values[i]);
    std::sort(sorted.begin(), sorted.end());
    const int cells = 1000000;
    const double dt = 1.0 / cells;
    double target = 0.0;
    double prev_pow = 0.0;
    for (int i = 0; i < cells; ++i) {
      double mid = (i + 0.5) * dt;
      double count = double(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), mid));
      double hi = (i + 1.0) * dt;
      double hip = std::pow(hi, p);
      target += count * (hip - prev_pow) / p;
      prev_pow = hip;
    }
    double rel = target > 0 ? std::abs(ours - target) / target : std::abs(ours - target);
    errs[t] = rel;
  });
  for (double rel : errs) {
    stat.count(rel <= 1e-6);
    stat.fit("max_rel_err", rel);
  }
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"breakpoint evaluation matches quadrature to 1e-6",
                        stat.violations == 0, rep.constants["max_rel_err"], ""});
  return rep;
}

SuiteReport invariance_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "invariance";
  Stat stat;
  std::vector<std::pair<std::string, uint64_t>> jobs;
  for (const auto& k : {"uniform2", "blob3"})
    for (int c = 0; c < opts.clouds; ++c) jobs.emplace_back(k, opts.seed + 97 * c + 53);
  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    const auto& [kind, seed] = jobs[ji];
    PointCloud E = make_cloud(kind, opts.size, seed);
    const int n = E.dim();
    const int d = n - 1;
    Rng rng(seed + 6);
    Eigen::VectorXd x = E.point(rng.uniform_int(E.size()));
    Ball B(x, 0.45 * E.diameter());
    geom::AffinePlane L = geom::detail::weighted_pca_plane(E, E.indices_in_ball(B), d);

    auto eval = [&](const PointCloud& C, const Ball& ball, const geom::AffinePlane& plane,
                    beta::BetaKind bk) {
      return beta::beta_with_plane(C, ball, d, 2.0, plane, bk, {});
    };
    struct Transform {
      Eigen::MatrixXd rot;
      Eigen::VectorXd shift;
      double scale;
      bool all_kinds;
    };
    std::vector<Transform> transforms;
    transforms.push_back({Eigen::MatrixXd::Identity(n, n), rng.gaussian_vector(n), 1.0, true});
    {
      // signed axis permutation with determinant +1
      Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
      for (int i = 0; i < n; ++i) P(perm[i], i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
      if (P.determinant() < 0) P.col(0) = -P.col(0);
      transforms.push_back({P, rng.gaussian_vector(n), 1.0, true});
    }
    transforms.push_back({rng.rotation(n), rng.gaussian_vector(n), 1.0, false});
    transforms.push_back({Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n), 3.7, true});
    transforms.push_back({Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n), 0.5, true});

    for (const auto& tr : transforms) {
      PointCloud E2 = E.transformed(tr.rot, tr.shift, tr.scale);
      Ball B2(tr.rot * B.center * tr.scale + tr.shift, B.radius * tr.scale);
      geom::AffinePlane L2 = L.transformed(tr.rot, tr.shift, tr.scale);
      std::vector<beta::BetaKind> bks{beta::BetaKind::beta_inf};
      if (tr.all_kinds) {
        bks.push_back(beta::BetaKind::beta_bar);
        bks.push_back(beta::BetaKind::beta_content);
      }
      for (auto bk : bks) {
        double v1 = eval(E, B, L, bk);
        double v2 = eval(E2, B2, L2, bk);
        double scale = std::max({std::abs(v1), std::abs(v2), 1e-6});
        stat.count(std::abs(v1 - v2) / scale <= 1e-10);
        stat.fit("max_rel_drift", std::abs(v1 - v2) / scale);
      }
    }
  });
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"rigid motion and scaling leave beta unchanged", stat.violations == 0,
                        rep.constants.count("max_rel_drift") ? rep.constants["max_rel_drift"] : 0,
                        ""});
  return rep;
}

SuiteReport angle_suite(const SuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "angle";
  Stat stat;
  std::vector<std::pair<std::string, uint64_t>> jobs;
  for (const auto& k : {"segment", "graph", "plane3"})
    for (int c = 0; c < opts.clouds; ++c) jobs.emplace_back(k, opts.seed + 179 * c + 59);
  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    const auto& [kind, seed] = jobs[ji];
    PointCloud E = make_cloud(kind, opts.size, seed);
    const int d = cloud_d(kind);
    Rng rng(seed + 7);
    content::ContentCache cache(E);
    beta::BetaOptions bopts;
    bopts.cache = &cache;
    for (int ci = 0; ci < 4; ++ci) {
      Eigen::VectorXd x = E.point(rng.uniform_int(E.size()));
      double r = rng.uniform(0.25, 0.4) * E.diameter();
      Ball B(x, r), Bp(x, r * 0.5);
      auto w = cubes::separated_points_in_ball(E, Bp, 0.2, d);
      if (!w) continue;
      try {
        geom::AffinePlane L =
            beta::best_plane(E, B.scaled(2.0), d, 1.0, beta::BetaKind::beta_content, bopts).plane;
        geom::AffinePlane Lp =
            beta::best_plane(E, Bp.scaled(2.0), d, 1.0, beta::BetaKind::beta_content, bopts).plane;
        auto diag = cubes::angle_diagnostic(E, Bp, B, L, Lp, *w, d, bopts);
        if (diag.rhs < 1e-13) {
          stat.count(diag.lhs < 1e-9);
          continue;
        }
        stat.count(true);
        stat.fit("C_angle_max", diag.lhs / diag.rhs);
      } catch (const std::exception&) {
      }
    }
  });
  rep.checked = stat.checked;
  rep.violations = stat.violations;
  rep.constants = stat.max_constants;
  rep.checks.push_back({"angle control ratios finite", stat.violations == 0,
                        rep.constants.count("C_angle_max") ? rep.constants["C_angle_max"] : 0,
                        ""});
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport christ_structural(const cubes::CubeTree& tree) {
  SuiteReport rep;
  rep.suite = "christ_structural";
  const PointCloud& E = *tree.cloud;
  long violations = 0, checked = 0;
  // (1) exact partition per level
  for (const auto& level : tree.by_level) {
    std::vector<int32_t> all;
    for (int id : level) {
      const auto& m = tree.cube(id).members;
      all.insert(all.end(), m.begin(), m.end());
    }
    std::sort(all.begin(), all.end());
    bool ok = static_cast<int>(all.size()) == E.size();
    for (size_t i = 0; ok && i < all.size(); ++i) ok = all[i] == static_cast<int32_t>(i);
    ++checked;
    if (!ok) ++violations;
  }
  // (2) nesting: members contained in the parent (with per-level partition
  // this forces the containment dichotomy for every intersecting pair)
  for (const auto& q : tree.all) {
    if (q.parent < 0) continue;
    const auto& pm = tree.cube(q.parent).members;
    bool ok = std::includes(pm.begin(), pm.end(), q.members.begin(), q.members.end());
    ++checked;
    if (!ok) ++violations;
  }
  // (3) two-sided sandwich at the recorded effective constant
  for (const auto& q : tree.all) {
    const Eigen::VectorXd x = E.point(q.center);
    bool ok = true;
    for (int32_t i : q.members)
      if ((E.col(i) - x).norm() > q.side * (1.0 + 1e-12)) ok = false;
    const double inner = tree.c0_effective * q.side;
    for (int32_t i = 0; i < E.size() && ok; ++i) {
      if ((E.col(i) - x).norm() <= inner &&
          !std::binary_search(q.members.begin(), q.members.end(), i))
        ok = false;
    }
    ++checked;
    if (!ok) ++violations;
  }
  rep.checked = checked;
  rep.violations = violations;
  rep.checks.push_back({"partition/nesting/sandwich", violations == 0, double(checked), ""});
  rep.constants["c0_effective"] = tree.c0_effective;
  rep.constants["inner_ratio"] = tree.inner_ratio;
  return rep;
}

SuiteReport stopping_invariants(const cubes::StoppingForest& forest) {
  SuiteReport rep;
  rep.suite = "stopping_invariants";
  const cubes::CubeTree& tree = *forest.tree;
  long violations = 0, checked = 0;
  const double delta2 = forest.params.delta * forest.params.delta;
  for (const auto& region : forest.regions) {
    std::vector<int> sorted = region.tree;
    std::sort(sorted.begin(), sorted.end());
    auto in_region = [&](int id) {
      return std::binary_search(sorted.begin(), sorted.end(), id);
    };
    bool coherent = true;
    for (int id : region.tree) {
      // (1) the top cube contains every member
      if (!tree.is_ancestor(region.root, id)) coherent = false;
      // (2) closed under intermediate ancestors
      int up = id;
      while (up != region.root && up != -1) {
        up = tree.cube(up).parent;
        if (up != -1 && !in_region(up)) coherent = false;
      }
      // (3) sibling closed
      if (id != region.root) {
        int parent = tree.cube(id).parent;
        for (int sib : tree.cube(parent).children)
          if (!in_region(sib)) coherent = false;
      }
    }
    ++checked;
    if (!coherent) ++violations;
    if (region.tree.size() > 1) {
      // every member of a non-singleton region carries a witness and obeys
      // the delta^2 partial-sum bound along its chain to the top
      for (int id : region.tree) {
        bool ok = forest.cube_witness[id] == 1;
        double sum = 0.0;
        int up = id;
        for (;;) {
          double b = forest.cube_beta[up];
          if (b < 0.0) {
            ok = false;
            break;
          }
          sum += b * b / std::pow(tree.cube(up).side, 2.0 * forest.params.alpha);
          if (up == region.root) break;
          up = tree.cube(up).parent;
        }
        if (sum >= delta2 * (1.0 + 1e-12)) ok = false;
        ++checked;
        if (!ok) ++violations;
      }
    }
  }
  rep.checked = checked;
  rep.violations = violations;
  rep.checks.push_back({"region coherence + stop condition", violations == 0, double(checked),
                        ""});
  return rep;
}

bool discretization_within_constant(const classify::BetaProfile& profile, double alpha,
                                    double* ratio_out) {
  double dyadic = 0.0;
  for (size_t k = 0; k < profile.values.size(); ++k) {
    double b = profile.values[k].value;
    dyadic += b * b / std::pow(profile.scales[k], 2.0 * alpha);
  }
  double integral = classify::square_function_integral(profile, alpha);
  double C = classify::discretization_constant(profile.base, alpha, profile.d,
                                               profile.p_effective());
  if (ratio_out) *ratio_out = integral > 0 ? dyadic / integral : 0.0;
  if (dyadic <= 1e-18 && integral <= 1e-18) return true;
  if (integral <= 0.0) return false;
  double ratio = dyadic / integral;
  return ratio <= C && ratio >= 1.0 / C;
}

// ---------------------------------------------------------------------------

std::vector<std::string> suite_names() {
  return {"monotonicity", "p_compare", "interpolation", "jensen",     "comparable",
          "transfer",     "content",   "choquet_oracle", "invariance", "angle"};
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
  if (name == "monotonicity") return monotonicity_suite(opts);
  if (name == "p_compare") return p_compare_suite(opts);
  if (name == "interpolation") return interpolation_suite(opts);
  if (name == "jensen") return jensen_suite(opts);
  if (name == "comparable") return comparable_suite(opts);
  if (name == "transfer") return transfer_suite(opts);
  if (name == "content") return content_suite(opts);
  if (name == "choquet_oracle") return choquet_oracle_suite(opts);
  if (name == "invariance") return invariance_suite(opts);
  if (name == "angle") return angle_suite(opts);
  throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace conebeta::suites
