// Independent straight-from-the-formula reference implementations used to
// check the library. Everything here recomputes results with its own set,
// pair and long-double arithmetic; only providers and text primitives are
// shared, since they are inputs to the formulas.
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lexeval/corpus.hpp"
#include "lexeval/metrics.hpp"

namespace oracle {

// --- metric oracles ---

double coverage_ratio(const lexeval::Document& doc, const lexeval::MetricConfig& config);
double redundancy_penalty(const lexeval::Document& doc, const lexeval::MetricConfig& config);
double compression_ratio(const lexeval::Document& doc, const lexeval::MetricConfig& config);
double term_frequency_coherence(const lexeval::Document& doc, const lexeval::MetricConfig& config);
double citation_coverage(const lexeval::Document& doc, const lexeval::MetricConfig& config);
lexeval::BlockMetric intra_block_coherence(const lexeval::Document& doc,
                                           const lexeval::MetricConfig& config);
lexeval::BlockMetric inter_block_distinctiveness(const lexeval::Document& doc,
                                                 const lexeval::MetricConfig& config);
double semantic_entropy(const lexeval::Document& doc, const lexeval::MetricConfig& config);
lexeval::BlockMetric neutrality_bias(const lexeval::Document& doc,
                                     const lexeval::MetricConfig& config);
double raw_cosine_similarity(const lexeval::Document& doc, const lexeval::MetricConfig& config);
double block_order_consistency(const lexeval::Document& doc, const lexeval::MetricConfig& config);
double monotonicity_score(const lexeval::Document& doc, const lexeval::MetricConfig& config);
double keyword_pseudo_f1(const lexeval::Document& doc, const lexeval::MetricConfig& config);
lexeval::BlockMetric legal_term_density(const lexeval::Document& doc,
                                        const lexeval::MetricConfig& config);

// The extraction E exactly as the formulas define it.
std::string combined(const lexeval::Document& doc);

// Frequency-ranked top-n terms with the (frequency desc, term asc) tie-break.
std::vector<std::string> top_terms(const std::vector<std::string>& tokens, std::size_t n);

// --- statistics oracles ---

double pearson_r(std::span<const double> x, std::span<const double> y);
double spearman_r(std::span<const double> x, std::span<const double> y);
double kendall_tau_b(std::span<const double> x, std::span<const double> y);  // O(n^2)
double lin_ccc(std::span<const double> x, std::span<const double> y);
double mae(std::span<const double> x, std::span<const double> y);

// Definitional two-way ANOVA (SS_err by subtraction, long double).
double icc2k(const std::vector<std::vector<double>>& matrix);

}  // namespace oracle
