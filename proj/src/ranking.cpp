#include "lexeval/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace lexeval {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double average = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = average;
        i = j + 1;
    }
    return ranks;
}

namespace {

// strict inversions (a[i] > a[j], i < j) via bottom-up merge sort
std::uint64_t count_inversions(std::vector<double>& a) {
    const std::size_t n = a.size();
    std::vector<double> buffer(n);
    std::uint64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t left = 0; left + width < n; left += 2 * width) {
            const std::size_t mid = left + width;
            const std::size_t right = std::min(left + 2 * width, n);
            std::size_t i = left, j = mid, k = left;
            while (i < mid && j < right) {
                if (a[j] < a[i]) {
                    inversions += mid - i;
                    buffer[k++] = a[j++];
                } else {
                    buffer[k++] = a[i++];
                }
            }
            while (i < mid) buffer[k++] = a[i++];
            while (j < right) buffer[k++] = a[j++];
            std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(left),
                      buffer.begin() + static_cast<std::ptrdiff_t>(right),
                      a.begin() + static_cast<std::ptrdiff_t>(left));
        }
    }
    return inversions;
}

struct TieCounts {
    double pairs = 0.0;        // sum t(t-1)/2
    double weighted = 0.0;     // sum t(t-1)(2t+5)
    double first_order = 0.0;  // sum t(t-1)
    double second_order = 0.0; // sum t(t-1)(t-2)
};

template <typename Equal>
TieCounts tie_counts(std::size_t n, Equal&& tied_with_previous) {
    TieCounts counts;
    std::size_t run = 1;
    auto flush = [&](std::size_t t) {
        if (t < 2) return;
        const double td = static_cast<double>(t);
        counts.pairs += td * (td - 1.0) / 2.0;
        counts.weighted += td * (td - 1.0) * (2.0 * td + 5.0);
        counts.first_order += td * (td - 1.0);
        counts.second_order += td * (td - 1.0) * (td - 2.0);
    };
    for (std::size_t i = 1; i < n; ++i) {
        if (tied_with_previous(i)) {
            ++run;
        } else {
            flush(run);
            run = 1;
        }
    }
    flush(run);
    return counts;
}

}  // namespace

KendallTau kendall_tau(std::span<const double> x, std::span<const double> y) {
    KendallTau result;
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) return result;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    const TieCounts x_ties =
        tie_counts(n, [&](std::size_t i) { return x[order[i]] == x[order[i - 1]]; });
    const TieCounts xy_ties = tie_counts(n, [&](std::size_t i) {
        return x[order[i]] == x[order[i - 1]] && y[order[i]] == y[order[i - 1]];
    });

    std::vector<double> y_sorted_by_x(n);
    for (std::size_t i = 0; i < n; ++i) y_sorted_by_x[i] = y[order[i]];
    const std::uint64_t discordant = count_inversions(y_sorted_by_x);
    // y_sorted_by_x is now sorted
    const TieCounts y_ties =
        tie_counts(n, [&](std::size_t i) { return y_sorted_by_x[i] == y_sorted_by_x[i - 1]; });

    const double nd = static_cast<double>(n);
    const double total_pairs = nd * (nd - 1.0) / 2.0;
    if (x_ties.pairs >= total_pairs || y_ties.pairs >= total_pairs) return result;  // constant side

    result.con_minus_dis = total_pairs - x_ties.pairs - y_ties.pairs + xy_ties.pairs -
                           2.0 * static_cast<double>(discordant);
    result.tau = result.con_minus_dis /
                 std::sqrt((total_pairs - x_ties.pairs) * (total_pairs - y_ties.pairs));

    const double v0 = nd * (nd - 1.0) * (2.0 * nd + 5.0);
    double variance = (v0 - x_ties.weighted - y_ties.weighted) / 18.0 +
                      x_ties.first_order * y_ties.first_order / (2.0 * nd * (nd - 1.0));
    if (n > 2) {
        variance += x_ties.second_order * y_ties.second_order /
                    (9.0 * nd * (nd - 1.0) * (nd - 2.0));
    }
    result.z = variance > 0.0 ? result.con_minus_dis / std::sqrt(variance) : 0.0;
    result.defined = true;
    return result;
}

}  // namespace lexeval
