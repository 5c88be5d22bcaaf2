#pragma once

#include "conebeta/content.hpp"
#include "conebeta/types.hpp"

namespace conebeta::choquet {

/// Nonnegative function sampled on a cloud.
struct ValuedCloud {
  const PointCloud* base = nullptr;
  std::vector<double> values;
};

/// Sorted distinct values of f; the superlevel set {f > t} is constant
/// between consecutive entries.
std::vector<double> superlevel_breakpoints(const ValuedCloud& vc);

/// p-Choquet integral of f over A against mu, factor-free convention:
///   ∫_0^∞ mu({x in A : f(x) > t}) t^(p-1) dt
/// evaluated exactly as sum_j mu({f > t_j}) (t_{j+1}^p - t_j^p)/p.
double choquet_integral(const ValuedCloud& vc, const Indices& A, double p,
                        const content::ContentFunctional& mu);

}  // namespace conebeta::choquet
