#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexeval/corpus.hpp"
#include "lexeval/metrics.hpp"

namespace lexeval {

struct PairedSeries {
    std::vector<double> metric_values;
    std::vector<double> expert_values;

    std::size_t n() const { return metric_values.size(); }
};

// (x - min) / (max - min); a constant series maps everywhere to 0.5.
std::vector<double> minmax_normalize(std::span<const double> series);

struct Correlation {
    double r = 0.0;
    double p_value = 1.0;
};

// Sample correlation with a two-sided t-test (df = n - 2). Undefined (nullopt)
// when n < 3 or either side is constant.
std::optional<Correlation> pearson(const PairedSeries& pairs);

// Pearson on average ranks; ties share averaged ranks.
std::optional<Correlation> spearman(const PairedSeries& pairs);

// Kendall tau-b with tie correction; p via the normal approximation.
std::optional<Correlation> kendall(const PairedSeries& pairs);

struct CccResult {
    double value = 0.0;
    bool degenerate = false;  // both series constant (equal -> 1, unequal -> 0)
};

// Lin's concordance correlation with population (1/n) moments.
std::optional<CccResult> lin_ccc(const PairedSeries& pairs);

// Mean absolute error; throws on an empty series.
double mae(const PairedSeries& pairs);

enum class Statistic { pearson_r, spearman_r, kendall_tau, lin_ccc, mae };

std::string_view to_string(Statistic statistic);

// nullopt when the statistic is undefined on this input (used to skip
// degenerate resamples).
std::optional<double> evaluate_statistic(Statistic statistic, const PairedSeries& pairs);

struct BootstrapCi {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t skipped = 0;  // resamples where the statistic was undefined
};

// Percentile CI over B paired resamples with replacement; deterministic under
// the seed. Throws when fewer than 10 resamples yield a defined statistic.
BootstrapCi bootstrap_ci(const PairedSeries& pairs, Statistic statistic, std::size_t samples = 1000,
                         std::uint64_t seed = 42, double level = 0.95);

// Two-sided p = (1 + #{|stat(perm)| >= |stat(observed)|}) / (B + 1), permuting
// the expert side only.
double permutation_p(const PairedSeries& pairs, Statistic statistic, std::size_t samples = 1000,
                     std::uint64_t seed = 42);

// Two-way random-effects, average-measures intraclass correlation over a
// complete items x raters matrix.
double icc2k(const std::vector<std::vector<double>>& items_by_raters);

// --- special functions (exposed for direct testing) ---
double incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, double df);
double normal_two_sided_p(double z);

// --- pairing ---

enum class PairScope { document, pooled_blocks, single_block };

// Raw (unnormalized) metric/expert pairs; pairs with either side missing are
// dropped. `single_block` requires `block`.
PairedSeries pair_series(std::span<const MetricVector> metrics,
                         std::span<const RatingAggregate> aggregates, std::string_view metric,
                         PairScope scope, std::optional<BlockKind> block = std::nullopt);

// --- report assembly ---

struct StatSummary {
    std::size_t n = 0;
    std::optional<double> mean, variance, std_dev;  // of the normalized metric
    std::optional<double> pearson_r, pearson_p;
    std::optional<double> spearman_r, spearman_p;
    std::optional<double> kendall_tau, kendall_p;
    std::optional<double> lin_ccc;
    std::optional<double> mae;
    std::map<std::string, std::pair<double, double>> bootstrap;  // statistic -> CI
    std::optional<double> permutation_p;
};

struct MetricReport {
    std::string name;
    bool block_level = false;
    StatSummary global;
    std::map<BlockKind, StatSummary> per_block;  // block-level metrics only
};

struct ExpertBlockStats {
    std::size_t rating_count = 0;    // raw ratings
    std::size_t evaluated_pairs = 0; // distinct rated (document, block) pairs
    std::optional<double> mean, variance, std_dev, avg_raters;
    std::map<int, std::size_t> rater_histogram;
    std::optional<double> icc2k;
};

struct StatsConfig {
    std::uint64_t seed = 42;
    std::size_t bootstrap_samples = 1000;
    std::size_t permutation_samples = 0;  // permutation tests are opt-in
    double ci_level = 0.95;
};

struct AnalysisReport {
    StatsConfig run;
    std::size_t dropped_unknown_document_ratings = 0;
    std::vector<MetricReport> metrics;
    std::map<BlockKind, ExpertBlockStats> experts;
};

// Normalizes globally per metric, pairs per scope, and computes every
// statistic; degeneracies surface as absent cells, never as failures.
AnalysisReport build_report(std::span<const MetricVector> metrics,
                            std::span<const ExpertRating> ratings, const StatsConfig& config);

std::string analysis_to_json(const AnalysisReport& report);
AnalysisReport analysis_from_json(const std::string& text);

}  // namespace lexeval
