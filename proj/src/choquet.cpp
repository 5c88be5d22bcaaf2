#include "conebeta/choquet.hpp"

#include <algorithm>
#include <cmath>

namespace conebeta::choquet {

std::vector<double> superlevel_breakpoints(const ValuedCloud& vc) {
  std::vector<double> bp = vc.values;
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

double choquet_integral(const ValuedCloud& vc, const Indices& A, double p,
                        const content::ContentFunctional& mu) {
  if (p < 1.0) throw std::invalid_argument("choquet_integral: need p >= 1");
  if (A.empty()) return 0.0;
  for (int32_t i : A) {
    double v = vc.values[i];
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("choquet_integral: values must be finite and nonnegative");
  }
  // descending order: the superlevel set {f > t} is a prefix
  Indices order = A;
  std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    if (vc.values[a] != vc.values[b]) return vc.values[a] > vc.values[b];
    return a < b;
  });
  // thresholds ascending with 0 prepended; cuts[j] = |{f > t_j}|
  std::vector<double> thresholds{0.0};
  for (int32_t i : A) thresholds.push_back(vc.values[i]);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<int> cuts;
  cuts.reserve(thresholds.size());
  const int m = static_cast<int>(order.size());
  for (double t : thresholds) {
    int lo = 0, hi = m;  // first index with value <= t
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (vc.values[order[mid]] > t)
        lo = mid + 1;
      else
        hi = mid;
    }
    cuts.push_back(lo);
  }
  // nested_prefixes wants ascending cuts; superlevel counts are descending in t
  std::vector<int> asc(cuts.rbegin(), cuts.rend());
  std::vector<double> measures_asc = mu.nested_prefixes(order, asc);
  std::vector<double> measures(measures_asc.rbegin(), measures_asc.rend());

  double total = 0.0;
  for (size_t j = 0; j + 1 < thresholds.size(); ++j) {
    double lo = thresholds[j], hi = thresholds[j + 1];
    total += measures[j] * (std::pow(hi, p) - std::pow(lo, p)) / p;
  }
  return total;
}

}  // namespace conebeta::choquet
