#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexeval/corpus.hpp"
#include "lexeval/providers.hpp"
#include "lexeval/textproc.hpp"

namespace lexeval {

namespace metric_names {
inline constexpr std::string_view coverage_ratio = "coverage_ratio";
inline constexpr std::string_view redundancy_penalty = "redundancy_penalty";
inline constexpr std::string_view compression_ratio = "compression_ratio";
inline constexpr std::string_view term_frequency_coherence = "term_frequency_coherence";
inline constexpr std::string_view citation_coverage = "citation_coverage";
inline constexpr std::string_view intra_block_coherence = "intra_block_coherence";
inline constexpr std::string_view inter_block_distinctiveness = "inter_block_distinctiveness";
inline constexpr std::string_view semantic_entropy = "semantic_entropy";
inline constexpr std::string_view neutrality_bias = "neutrality_bias";
inline constexpr std::string_view raw_cosine_similarity = "raw_cosine_similarity";
inline constexpr std::string_view llm_evaluation = "llm_evaluation";
inline constexpr std::string_view block_order_consistency = "block_order_consistency";
inline constexpr std::string_view block_completeness = "block_completeness";
inline constexpr std::string_view monotonicity_score = "monotonicity_score";
inline constexpr std::string_view keyword_pseudo_f1 = "keyword_pseudo_f1";
inline constexpr std::string_view legal_term_density = "legal_term_density";
}  // namespace metric_names

// All 16 metric names in presentation order.
std::span<const std::string_view> all_metric_names();

// Block-level metrics yield one value per block; the rest are document-level.
bool is_block_level_metric(std::string_view name);

struct MetricConfig {
    Tokenizer tokenizer;
    SentenceSplitter splitter;
    LegalPatterns patterns;
    std::shared_ptr<const EmbeddingProvider> embeddings;
    std::shared_ptr<const SentimentProvider> sentiment;
    std::shared_ptr<const NerProvider> ner;
    std::shared_ptr<const ChatClient> chat;  // absent disables llm_evaluation
    JudgeOptions judge;
    std::set<std::string> disabled;
};

// Per-document workspace caching tokenizations, sentences, embeddings and
// citation sets shared across metrics. Not safe for concurrent use; run one
// instance per thread.
class DocumentAnalysis {
public:
    DocumentAnalysis(const Document& doc, const MetricConfig& config);
    // the analysis only references its inputs; temporaries would dangle
    DocumentAnalysis(Document&&, const MetricConfig&) = delete;
    DocumentAnalysis(const Document&, MetricConfig&&) = delete;
    DocumentAnalysis(Document&&, MetricConfig&&) = delete;

    const Document& doc() const { return *doc_; }
    const MetricConfig& config() const { return *config_; }

    // E: the seven blocks joined with single newlines, in canonical order.
    const std::string& combined() const;

    const std::vector<std::string>& source_tokens() const;
    const std::vector<std::string>& combined_tokens() const;
    const std::set<std::string>& combined_token_set() const;
    const std::set<std::string>& source_key_terms() const;  // top-50
    const CitationSet& source_citations() const;
    const CitationSet& combined_citations() const;
    const std::vector<std::string>& block_tokens(BlockKind kind) const;
    const std::vector<std::string>& block_sentences(BlockKind kind) const;
    const Embedding& block_embedding(BlockKind kind) const;
    const std::vector<Embedding>& sentence_embeddings(BlockKind kind) const;
    const Embedding& source_embedding() const;
    const Embedding& combined_embedding() const;

private:
    const Document* doc_;
    const MetricConfig* config_;
    mutable std::optional<std::string> combined_;
    mutable std::optional<std::vector<std::string>> source_tokens_;
    mutable std::optional<std::vector<std::string>> combined_tokens_;
    mutable std::optional<std::set<std::string>> combined_token_set_;
    mutable std::optional<std::set<std::string>> source_key_terms_;
    mutable std::optional<CitationSet> source_citations_;
    mutable std::optional<CitationSet> combined_citations_;
    mutable std::array<std::optional<std::vector<std::string>>, kBlockCount> block_tokens_;
    mutable std::array<std::optional<std::vector<std::string>>, kBlockCount> block_sentences_;
    mutable std::array<std::optional<Embedding>, kBlockCount> block_embeddings_;
    mutable std::array<std::optional<std::vector<Embedding>>, kBlockCount> sentence_embeddings_;
    mutable std::optional<Embedding> source_embedding_;
    mutable std::optional<Embedding> combined_embedding_;
};

struct BlockMetric {
    std::array<double, kBlockCount> per_block{};
    double document_mean = 0.0;
};

std::string combined_extraction(const Document& doc);

double coverage_ratio(const DocumentAnalysis& a);
double redundancy_penalty(const DocumentAnalysis& a);
double compression_ratio(const DocumentAnalysis& a);
double term_frequency_coherence(const DocumentAnalysis& a);
double citation_coverage(const DocumentAnalysis& a);
BlockMetric intra_block_coherence(const DocumentAnalysis& a);
BlockMetric inter_block_distinctiveness(const DocumentAnalysis& a);
double semantic_entropy(const DocumentAnalysis& a);  // bits
BlockMetric neutrality_bias(const DocumentAnalysis& a);
double raw_cosine_similarity(const DocumentAnalysis& a);
double block_order_consistency(const DocumentAnalysis& a);
double block_completeness(const DocumentAnalysis& a);  // alias of coverage_ratio
double monotonicity_score(const DocumentAnalysis& a);
double keyword_pseudo_f1(const DocumentAnalysis& a);
BlockMetric legal_term_density(const DocumentAnalysis& a);

struct LlmMetric {
    std::array<int, kBlockCount> scores{};  // 1..5
    std::array<std::string, kBlockCount> reasons;
    double document_mean = 0.0;  // on the raw 1..5 scale
};

LlmMetric llm_evaluation(const Document& doc, const ChatClient& client,
                         const JudgeOptions& options);

struct MetricVector {
    std::string document_id;
    std::map<std::string, double> document_metrics;
    std::map<std::string, std::array<double, kBlockCount>> block_metrics;
    std::optional<std::array<std::string, kBlockCount>> llm_reasons;
    std::vector<std::string> warnings;  // per-metric failures; not serialized
};

// Runs every enabled metric; failed or disabled metrics are absent from the
// vector, never zero-filled.
MetricVector compute_all(const Document& doc, const MetricConfig& config);

std::string metric_vector_to_json_line(const MetricVector& mv);
MetricVector metric_vector_from_json_line(const std::string& line);

void save_metric_vectors(std::span<const MetricVector> vectors,
                         const std::filesystem::path& path);
std::vector<MetricVector> load_metric_vectors(const std::filesystem::path& path);

}  // namespace lexeval
