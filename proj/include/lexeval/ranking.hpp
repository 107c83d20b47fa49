#pragma once

#include <span>
#include <vector>

namespace lexeval {

// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct KendallTau {
    bool defined = false;  // false when n < 2 or either side is entirely tied
    double tau = 0.0;      // tau-b (tie-corrected)
    double z = 0.0;        // normal-approximation statistic for C - D
    double con_minus_dis = 0.0;
};

// Knight's O(n log n) computation with tie corrections.
KendallTau kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace lexeval
