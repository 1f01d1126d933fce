#include "emco/stats.hpp"

#include <algorithm>
#include <cmath>

namespace emco {

double quantile_type1(std::span<const double> sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 0) return 0.0;
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double pos = std::ceil(q * static_cast<double>(n));
  std::size_t idx = pos <= 1.0 ? 0 : static_cast<std::size_t>(pos) - 1;
  if (idx >= n) idx = n - 1;
  return sorted[idx];
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) {
    const double d = x - m;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n - 1));
}

std::vector<std::vector<int>> resampling_groups(
    const std::vector<int>& cluster_id, std::size_t n) {
  std::vector<std::vector<int>> groups;
  if (cluster_id.empty()) {
    groups.resize(n);
    for (std::size_t i = 0; i < n; ++i) groups[i] = {static_cast<int>(i)};
    return groups;
  }
  int max_id = 0;
  for (int c : cluster_id) max_id = std::max(max_id, c);
  groups.resize(static_cast<std::size_t>(max_id) + 1);
  for (std::size_t i = 0; i < n; ++i)
    groups[cluster_id[i]].push_back(static_cast<int>(i));
  // Drop ids with no rows (possible on subsets).
  groups.erase(std::remove_if(groups.begin(), groups.end(),
                              [](const auto& g) { return g.empty(); }),
               groups.end());
  return groups;
}

}  // namespace emco
