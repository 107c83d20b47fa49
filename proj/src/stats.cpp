#include "lexeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lexeval/error.hpp"
#include "lexeval/ranking.hpp"

namespace lexeval {

namespace {

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

// unbiased-by-draw index in [0, n) from a 64-bit stream
std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(rng()) * static_cast<unsigned __int128>(n)) >> 64);
}

}  // namespace

std::vector<double> minmax_normalize(std::span<const double> series) {
    if (series.empty()) throw Error(Errc::insufficient_data, "cannot normalize an empty series");
    const auto [min_it, max_it] = std::minmax_element(series.begin(), series.end());
    const double min = *min_it, max = *max_it;
    std::vector<double> out(series.size());
    if (min == max) {
        std::fill(out.begin(), out.end(), 0.5);
        return out;
    }
    const double range = max - min;
    for (std::size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - min) / range;
    return out;
}

std::optional<Correlation> pearson(const PairedSeries& pairs) {
    const std::size_t n = pairs.n();
    if (n < 3 || pairs.expert_values.size() != n) return std::nullopt;
    const double mean_x = mean_of(pairs.metric_values);
    const double mean_y = mean_of(pairs.expert_values);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = pairs.metric_values[i] - mean_x;
        const double dy = pairs.expert_values[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;

    Correlation result;
    result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    const double denom = 1.0 - result.r * result.r;
    if (denom <= 0.0) {
        result.p_value = 0.0;
    } else {
        const double t = result.r * std::sqrt(df / denom);
        result.p_value = student_t_two_sided_p(t, df);
    }
    return result;
}

std::optional<Correlation> spearman(const PairedSeries& pairs) {
    if (pairs.n() < 3) return std::nullopt;
    PairedSeries ranked;
    ranked.metric_values = average_ranks(pairs.metric_values);
    ranked.expert_values = average_ranks(pairs.expert_values);
    return pearson(ranked);
}

std::optional<Correlation> kendall(const PairedSeries& pairs) {
    if (pairs.n() < 2) return std::nullopt;
    const KendallTau kt = kendall_tau(pairs.metric_values, pairs.expert_values);
    if (!kt.defined) return std::nullopt;
    Correlation result;
    result.r = std::clamp(kt.tau, -1.0, 1.0);
    result.p_value = normal_two_sided_p(kt.z);
    return result;
}

std::optional<CccResult> lin_ccc(const PairedSeries& pairs) {
    const std::size_t n = pairs.n();
    if (n < 2 || pairs.expert_values.size() != n) return std::nullopt;
    const double mean_x = mean_of(pairs.metric_values);
    const double mean_y = mean_of(pairs.expert_values);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = pairs.metric_values[i] - mean_x;
        const double dy = pairs.expert_values[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    const double nd = static_cast<double>(n);
    const double var_x = sxx / nd, var_y = syy / nd, cov = sxy / nd;
    const double shift = mean_x - mean_y;

    CccResult result;
    if (var_x == 0.0 && var_y == 0.0) {
        result.degenerate = true;
        result.value = shift == 0.0 ? 1.0 : 0.0;
        return result;
    }
    result.value = 2.0 * cov / (var_x + var_y + shift * shift);
    return result;
}

double mae(const PairedSeries& pairs) {
    if (pairs.n() == 0) throw Error(Errc::insufficient_data, "mae of an empty series");
    double sum = 0.0;
    for (std::size_t i = 0; i < pairs.n(); ++i)
        sum += std::abs(pairs.metric_values[i] - pairs.expert_values[i]);
    return sum / static_cast<double>(pairs.n());
}

std::string_view to_string(Statistic statistic) {
    switch (statistic) {
        case Statistic::pearson_r: return "pearson_r";
        case Statistic::spearman_r: return "spearman_r";
        case Statistic::kendall_tau: return "kendall_tau";
        case Statistic::lin_ccc: return "lin_ccc";
        case Statistic::mae: return "mae";
    }
    return "pearson_r";
}

std::optional<double> evaluate_statistic(Statistic statistic, const PairedSeries& pairs) {
    switch (statistic) {
        case Statistic::pearson_r: {
            const auto c = pearson(pairs);
            if (!c) return std::nullopt;
            return c->r;
        }
        case Statistic::spearman_r: {
            const auto c = spearman(pairs);
            if (!c) return std::nullopt;
            return c->r;
        }
        case Statistic::kendall_tau: {
            const auto c = kendall(pairs);
            if (!c) return std::nullopt;
            return c->r;
        }
        case Statistic::lin_ccc: {
            const auto c = lin_ccc(pairs);
            if (!c || c->degenerate) return std::nullopt;
            return c->value;
        }
        case Statistic::mae: {
            if (pairs.n() == 0) return std::nullopt;
            return mae(pairs);
        }
    }
    return std::nullopt;
}

namespace {

double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

BootstrapCi bootstrap_ci(const PairedSeries& pairs, Statistic statistic, std::size_t samples,
                         std::uint64_t seed, double level) {
    const std::size_t n = pairs.n();
    if (n < 3) throw Error(Errc::insufficient_data, "bootstrap needs n >= 3");
    if (level <= 0.0 || level >= 1.0) throw Error(Errc::config, "ci level must be in (0,1)");

    std::mt19937_64 rng(seed);
    PairedSeries resample;
    resample.metric_values.resize(n);
    resample.expert_values.resize(n);

    BootstrapCi ci;
    std::vector<double> values;
    values.reserve(samples);
    for (std::size_t b = 0; b < samples; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = bounded(rng, n);
            resample.metric_values[i] = pairs.metric_values[idx];
            resample.expert_values[i] = pairs.expert_values[idx];
        }
        if (const auto value = evaluate_statistic(statistic, resample)) {
            values.push_back(*value);
        } else {
            ++ci.skipped;
        }
    }
    if (values.size() < 10)
        throw Error(Errc::insufficient_data,
                    "only " + std::to_string(values.size()) + " valid bootstrap resamples");
    std::sort(values.begin(), values.end());
    const double alpha = (1.0 - level) / 2.0;
    ci.lo = percentile(values, alpha);
    ci.hi = percentile(values, 1.0 - alpha);
    return ci;
}

double permutation_p(const PairedSeries& pairs, Statistic statistic, std::size_t samples,
                     std::uint64_t seed) {
    const std::size_t n = pairs.n();
    if (n < 3) throw Error(Errc::insufficient_data, "permutation test needs n >= 3");
    const auto observed = evaluate_statistic(statistic, pairs);
    if (!observed)
        throw Error(Errc::insufficient_data, "statistic undefined on the observed series");

    std::mt19937_64 rng(seed);
    PairedSeries permuted = pairs;
    std::size_t at_least_as_extreme = 0;
    for (std::size_t b = 0; b < samples; ++b) {
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = bounded(rng, i + 1);
            std::swap(permuted.expert_values[i], permuted.expert_values[j]);
        }
        const auto value = evaluate_statistic(statistic, permuted);
        if (value && std::abs(*value) >= std::abs(*observed)) ++at_least_as_extreme;
    }
    return (1.0 + static_cast<double>(at_least_as_extreme)) / (static_cast<double>(samples) + 1.0);
}

double icc2k(const std::vector<std::vector<double>>& items_by_raters) {
    const std::size_t n = items_by_raters.size();
    if (n < 2) throw Error(Errc::insufficient_data, "icc needs at least 2 items");
    const std::size_t k = items_by_raters.front().size();
    if (k < 2) throw Error(Errc::insufficient_data, "icc needs at least 2 raters");
    for (const auto& row : items_by_raters) {
        if (row.size() != k)
            throw Error(Errc::insufficient_data, "icc matrix is incomplete (ragged rows)");
    }

    const double nd = static_cast<double>(n), kd = static_cast<double>(k);
    std::vector<double> row_means(n, 0.0), col_means(k, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            row_sum += items_by_raters[i][j];
            col_means[j] += items_by_raters[i][j];
        }
        row_means[i] = row_sum / kd;
        total += row_sum;
    }
    for (double& c : col_means) c /= nd;
    const double grand = total / (nd * kd);

    double ss_rows = 0.0, ss_cols = 0.0, ss_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss_rows += (row_means[i] - grand) * (row_means[i] - grand);
    ss_rows *= kd;
    for (std::size_t j = 0; j < k; ++j) ss_cols += (col_means[j] - grand) * (col_means[j] - grand);
    ss_cols *= nd;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            // residual form keeps a perfect-agreement matrix at exactly zero
            const double residual =
                (items_by_raters[i][j] - row_means[i]) - (col_means[j] - grand);
            ss_err += residual * residual;
        }
    }

    const double ms_rows = ss_rows / (nd - 1.0);
    const double ms_cols = ss_cols / (kd - 1.0);
    const double ms_err = ss_err / ((nd - 1.0) * (kd - 1.0));
    const double denominator = ms_rows + (ms_cols - ms_err) / nd;
    if (denominator == 0.0)
        throw Error(Errc::insufficient_data, "icc undefined: zero-variance matrix");
    return (ms_rows - ms_err) / denominator;
}

// --- special functions ---

namespace {

// continued fraction for the regularized incomplete beta (modified Lentz)
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEpsilon = 3.0e-14;
    constexpr double kTiny = 1.0e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double md = static_cast<double>(m);
        const double m2 = 2.0 * md;
        double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEpsilon) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) return 1.0;
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// --- pairing ---

namespace {

std::map<std::pair<std::string, BlockKind>, double> aggregate_lookup(
    std::span<const RatingAggregate> aggregates) {
    std::map<std::pair<std::string, BlockKind>, double> lookup;
    for (const RatingAggregate& agg : aggregates)
        lookup[{agg.document_id, agg.block}] = agg.mean_normalized;
    return lookup;
}

std::map<std::string, double> document_targets(std::span<const RatingAggregate> aggregates) {
    std::map<std::string, std::vector<RatingAggregate>> grouped;
    for (const RatingAggregate& agg : aggregates) grouped[agg.document_id].push_back(agg);
    std::map<std::string, double> targets;
    for (const auto& [id, group] : grouped) targets[id] = document_level_target(group);
    return targets;
}

}  // namespace

PairedSeries pair_series(std::span<const MetricVector> metrics,
                         std::span<const RatingAggregate> aggregates, std::string_view metric,
                         PairScope scope, std::optional<BlockKind> block) {
    const std::string name(metric);
    PairedSeries pairs;

    if (scope == PairScope::document) {
        const auto targets = document_targets(aggregates);
        for (const MetricVector& mv : metrics) {
            const auto value = mv.document_metrics.find(name);
            if (value == mv.document_metrics.end()) continue;
            const auto target = targets.find(mv.document_id);
            if (target == targets.end()) continue;
            pairs.metric_values.push_back(value->second);
            pairs.expert_values.push_back(target->second);
        }
        return pairs;
    }

    if (scope == PairScope::single_block && !block)
        throw Error(Errc::config, "single_block pairing requires a block");
    const auto lookup = aggregate_lookup(aggregates);
    for (const MetricVector& mv : metrics) {
        const auto values = mv.block_metrics.find(name);
        if (values == mv.block_metrics.end()) continue;
        for (BlockKind kind : kAllBlocks) {
            if (scope == PairScope::single_block && kind != *block) continue;
            const auto expert = lookup.find({mv.document_id, kind});
            if (expert == lookup.end()) continue;
            pairs.metric_values.push_back(values->second[block_index(kind)]);
            pairs.expert_values.push_back(expert->second);
        }
    }
    return pairs;
}

}  // namespace lexeval
