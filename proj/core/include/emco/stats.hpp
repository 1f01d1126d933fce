#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace emco {

// Left-continuous inverse CDF (type-1) on an ascending-sorted sample.
// q <= 0 returns the minimum, q >= 1 the maximum.
double quantile_type1(std::span<const double> sorted, double q);

double mean(std::span<const double> v);

// Sample standard deviation with n-1 denominator; 0 for n < 2.
double sample_sd(std::span<const double> v);

// Resampling units for the nonparametric bootstrap: one group of row indices
// per cluster id, or one singleton group per observation when ids are empty.
std::vector<std::vector<int>> resampling_groups(
    const std::vector<int>& cluster_id, std::size_t n);

}  // namespace emco
