#pragma once

#include <map>
#include <optional>

#include "conebeta/beta.hpp"
#include "conebeta/types.hpp"

namespace conebeta::classify {

struct BetaProfile {
  int point = -1;
  beta::BetaKind kind = beta::BetaKind::beta_inf;
  double p = 1.0;
  int d = 1;
  double base = 10.0;
  int k_lo = 0, k_hi = 0;
  std::vector<double> scales;   // r_k = base^-k, k = k_lo..k_hi
  std::vector<beta::BetaValue> values;
  int monotonicity_flags = 0;   // adjacent scales violating the nesting bound

  double p_effective() const {
    return kind == beta::BetaKind::beta_inf ? std::numeric_limits<double>::infinity() : p;
  }
};

BetaProfile beta_profile(const PointCloud& E, int point_index, int d, double p,
                         beta::BetaKind kind, double base, int k_lo, int k_hi,
                         const beta::BetaOptions& opts = {});

enum class Verdict { summable, divergent, indeterminate };
const char* verdict_name(Verdict v);

struct SquareThresholds {
  double decay_ratio = 0.9;       // geometric-decay acceptance on tail increments
  double divergence_floor = 1e-4; // tail increments bounded below => divergent
  double negligible_sum = 1e-12;  // total below this is summable outright
};

struct SquareFunctionResult {
  double alpha = 0.0;
  std::vector<double> increments;    // beta(r_k)^2 / r_k^(2 alpha)
  std::vector<double> partial_sums;  // nondecreasing
  double tail_ratio = 0.0;           // fitted geometric ratio of tail increments
  double tail_slope = 0.0;           // fitted growth of partial sums per k
  Verdict verdict = Verdict::indeterminate;
  SquareThresholds thresholds;

  double total() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

SquareFunctionResult square_function(const BetaProfile& profile, double alpha,
                                     const SquareThresholds& thr = {});

/// Quadrature of beta(x,r)^2 / r^(2 alpha + 1) over the profile's scale range
/// (log-linear interpolation of beta^2 between grid values).
double square_function_integral(const BetaProfile& profile, double alpha);

/// Bound on the dyadic-sum / integral ratio implied by the nesting inequality:
/// base^(2(alpha + 1 + d/p)) / ln(base).
double discretization_constant(double base, double alpha, int d, double p);

struct ConeCertificate {
  geom::AffinePlane plane;
  double lambda = 0.0;
  double radius = 0.0;
  double alpha = 0.0;
};

/// Searches plane candidates (multiscale beta-optimal planes plus random
/// restarts) for an axis V such that every sample point of E in B(x, r),
/// r over the geometric grid [r_min, r0], lies inside the open truncated
/// paraboloid. nullopt means no certificate found, not a disproof.
std::optional<ConeCertificate> cone_certificate(const PointCloud& E, int point_index, int d,
                                                double lambda, double alpha, double r0,
                                                uint64_t seed = 11,
                                                const beta::BetaOptions& opts = {});

/// sup over E ∩ B(x,r) of dist(y, V) / r^(1+alpha).
double tangent_defect(const PointCloud& E, const Point& x, const geom::AffinePlane& V, double r,
                      double alpha);

struct PointLabel {
  int point = -1;
  std::optional<Verdict> cone_verdict;                 // alpha = 0 entry, when requested
  std::map<double, Verdict> paraboloid_verdicts;       // per requested alpha > 0
  std::map<double, double> square_totals;              // per alpha partial-sum total
  std::optional<ConeCertificate> certificate;          // smallest lambda certified (alpha = 0)
  std::map<double, bool> paraboloid_certificates;      // per alpha > 0
  bool agreement = true;                               // verdict vs certificate, alpha = 0
  std::string error;
};

struct ClassifyParams {
  int d = 1;
  double p = 2.0;
  beta::BetaKind kind = beta::BetaKind::beta_content;
  std::vector<double> alphas{0.0};
  double base = 10.0;
  int k_lo = 0;
  int k_hi = -1;  // negative -> deepest scale above r_min
  std::vector<double> lambda_grid{0.1, 0.25, 0.5, 1.0};
  SquareThresholds thresholds;
  bool with_certificates = true;
  uint64_t seed = 1;
  bool force_p = false;
  content::ModifiedParams content_params{};
};

struct ClassifySummary {
  int points = 0;
  int errors = 0;
  std::map<double, int> summable_counts;
  std::map<double, int> divergent_counts;
  int certificates = 0;
  double agreement_rate = 1.0;
  std::vector<int> mismatches;  // point indices where verdict and certificate disagree
};

struct ClassifyResult {
  std::vector<PointLabel> labels;
  std::vector<BetaProfile> profiles;
  ClassifySummary summary;
};

/// Full per-point pipeline; per-point failures are collected, never fatal.
/// point_subset empty means every sample point.
ClassifyResult classify_points(const PointCloud& E, const ClassifyParams& params,
                               const Indices& point_subset = {});

}  // namespace conebeta::classify
