#include "lexeval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "lexeval/error.hpp"
#include "lexeval/ranking.hpp"

namespace lexeval {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 16> kMetricOrder = {
    metric_names::coverage_ratio,
    metric_names::redundancy_penalty,
    metric_names::compression_ratio,
    metric_names::term_frequency_coherence,
    metric_names::citation_coverage,
    metric_names::intra_block_coherence,
    metric_names::inter_block_distinctiveness,
    metric_names::semantic_entropy,
    metric_names::neutrality_bias,
    metric_names::raw_cosine_similarity,
    metric_names::llm_evaluation,
    metric_names::block_order_consistency,
    metric_names::block_completeness,
    metric_names::monotonicity_score,
    metric_names::keyword_pseudo_f1,
    metric_names::legal_term_density,
};

constexpr std::array<std::string_view, 5> kBlockLevel = {
    metric_names::intra_block_coherence, metric_names::inter_block_distinctiveness,
    metric_names::neutrality_bias,       metric_names::legal_term_density,
    metric_names::llm_evaluation,
};

double block_mean(const std::array<double, kBlockCount>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(kBlockCount);
}

// cosine over raw vectors; dot/sqrt(na*nb) so identical inputs give exactly 1
double vector_cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

}  // namespace

std::span<const std::string_view> all_metric_names() { return kMetricOrder; }

bool is_block_level_metric(std::string_view name) {
    return std::find(kBlockLevel.begin(), kBlockLevel.end(), name) != kBlockLevel.end();
}

std::string combined_extraction(const Document& doc) {
    std::string combined;
    for (BlockKind kind : kAllBlocks) {
        if (!combined.empty()) combined.push_back('\n');
        combined += doc.block(kind);
    }
    return combined;
}

DocumentAnalysis::DocumentAnalysis(const Document& doc, const MetricConfig& config)
    : doc_(&doc), config_(&config) {
    if (!config.embeddings || !config.sentiment || !config.ner)
        throw Error(Errc::config, "embedding, sentiment and NER providers are required");
}

const std::string& DocumentAnalysis::combined() const {
    if (!combined_) combined_ = combined_extraction(*doc_);
    return *combined_;
}

const std::vector<std::string>& DocumentAnalysis::source_tokens() const {
    if (!source_tokens_) source_tokens_ = config_->tokenizer.tokenize(doc_->source_text);
    return *source_tokens_;
}

const std::vector<std::string>& DocumentAnalysis::combined_tokens() const {
    if (!combined_tokens_) combined_tokens_ = config_->tokenizer.tokenize(combined());
    return *combined_tokens_;
}

const std::set<std::string>& DocumentAnalysis::combined_token_set() const {
    if (!combined_token_set_) {
        combined_token_set_.emplace(combined_tokens().begin(), combined_tokens().end());
    }
    return *combined_token_set_;
}

const std::set<std::string>& DocumentAnalysis::source_key_terms() const {
    if (!source_key_terms_)
        source_key_terms_ = key_terms(doc_->source_text, 50, config_->tokenizer).terms;
    return *source_key_terms_;
}

const CitationSet& DocumentAnalysis::source_citations() const {
    if (!source_citations_)
        source_citations_ = extract_citations(doc_->source_text, *config_->ner, config_->patterns,
                                              config_->tokenizer);
    return *source_citations_;
}

const CitationSet& DocumentAnalysis::combined_citations() const {
    if (!combined_citations_)
        combined_citations_ =
            extract_citations(combined(), *config_->ner, config_->patterns, config_->tokenizer);
    return *combined_citations_;
}

const std::vector<std::string>& DocumentAnalysis::block_tokens(BlockKind kind) const {
    auto& slot = block_tokens_[block_index(kind)];
    if (!slot) slot = config_->tokenizer.tokenize(doc_->block(kind));
    return *slot;
}

const std::vector<std::string>& DocumentAnalysis::block_sentences(BlockKind kind) const {
    auto& slot = block_sentences_[block_index(kind)];
    if (!slot) slot = config_->splitter.split(doc_->block(kind));
    return *slot;
}

const Embedding& DocumentAnalysis::block_embedding(BlockKind kind) const {
    auto& slot = block_embeddings_[block_index(kind)];
    if (!slot) slot = config_->embeddings->embed(doc_->block(kind));
    return *slot;
}

const std::vector<Embedding>& DocumentAnalysis::sentence_embeddings(BlockKind kind) const {
    auto& slot = sentence_embeddings_[block_index(kind)];
    if (!slot) {
        std::vector<Embedding> embeddings;
        for (const std::string& sentence : block_sentences(kind))
            embeddings.push_back(config_->embeddings->embed(sentence));
        slot = std::move(embeddings);
    }
    return *slot;
}

const Embedding& DocumentAnalysis::source_embedding() const {
    if (!source_embedding_) source_embedding_ = config_->embeddings->embed(doc_->source_text);
    return *source_embedding_;
}

const Embedding& DocumentAnalysis::combined_embedding() const {
    if (!combined_embedding_) combined_embedding_ = config_->embeddings->embed(combined());
    return *combined_embedding_;
}

double coverage_ratio(const DocumentAnalysis& a) {
    const std::set<std::string>& key = a.source_key_terms();
    if (key.empty()) return 0.0;
    const std::set<std::string>& extracted = a.combined_token_set();
    std::size_t shared = 0;
    for (const std::string& term : key) shared += extracted.contains(term) ? 1 : 0;
    return static_cast<double>(shared) / static_cast<double>(key.size());
}

double redundancy_penalty(const DocumentAnalysis& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kBlockCount; ++i) {
        for (std::size_t j = i + 1; j < kBlockCount; ++j) {
            sum += cosine(a.block_embedding(kAllBlocks[i]), a.block_embedding(kAllBlocks[j]));
        }
    }
    return sum / 21.0;
}

double compression_ratio(const DocumentAnalysis& a) {
    const std::size_t source_count = a.source_tokens().size();
    if (source_count == 0) return 0.0;
    std::size_t block_total = 0;
    for (BlockKind kind : kAllBlocks) block_total += a.block_tokens(kind).size();
    return static_cast<double>(block_total) / static_cast<double>(source_count);
}

double term_frequency_coherence(const DocumentAnalysis& a) {
    std::map<std::string, std::array<double, 2>> counts;
    for (const std::string& token : a.source_tokens()) counts[token][0] += 1.0;
    for (const std::string& token : a.combined_tokens()) counts[token][1] += 1.0;
    if (counts.empty()) return 0.0;

    // smooth IDF over the two-text corpus [D, E]: ln((1+2)/(1+df)) + 1
    const double idf_shared = 1.0;                     // df = 2
    const double idf_single = std::log(1.5) + 1.0;     // df = 1
    std::vector<double> vec_d, vec_e;
    vec_d.reserve(counts.size());
    vec_e.reserve(counts.size());
    for (const auto& [term, c] : counts) {
        const double idf = (c[0] > 0.0 && c[1] > 0.0) ? idf_shared : idf_single;
        vec_d.push_back(c[0] * idf);
        vec_e.push_back(c[1] * idf);
    }
    return vector_cosine(vec_d, vec_e);
}

double citation_coverage(const DocumentAnalysis& a) {
    const CitationSet& source = a.source_citations();
    if (source.items.empty()) return 1.0;  // nothing to preserve
    const CitationSet& extracted = a.combined_citations();
    std::size_t shared = 0;
    for (const std::string& item : source.items) shared += extracted.items.contains(item) ? 1 : 0;
    return static_cast<double>(shared) / static_cast<double>(source.items.size());
}

BlockMetric intra_block_coherence(const DocumentAnalysis& a) {
    BlockMetric metric;
    for (BlockKind kind : kAllBlocks) {
        const std::vector<Embedding>& sentences = a.sentence_embeddings(kind);
        double value = 1.0;  // blocks with fewer than two sentences
        if (sentences.size() >= 2) {
            double sum = 0.0;
            std::size_t pairs = 0;
            for (std::size_t i = 0; i < sentences.size(); ++i) {
                for (std::size_t j = i + 1; j < sentences.size(); ++j) {
                    sum += cosine(sentences[i], sentences[j]);
                    ++pairs;
                }
            }
            value = sum / static_cast<double>(pairs);
        }
        metric.per_block[block_index(kind)] = value;
    }
    metric.document_mean = block_mean(metric.per_block);
    return metric;
}

BlockMetric inter_block_distinctiveness(const DocumentAnalysis& a) {
    BlockMetric metric;
    for (std::size_t i = 0; i < kBlockCount; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < kBlockCount; ++j) {
            if (i == j) continue;
            sum += 1.0 - cosine(a.block_embedding(kAllBlocks[i]), a.block_embedding(kAllBlocks[j]));
        }
        metric.per_block[i] = sum / 6.0;
    }
    metric.document_mean = block_mean(metric.per_block);
    return metric;
}

double semantic_entropy(const DocumentAnalysis& a) {
    const std::vector<std::string>& tokens = a.combined_tokens();
    if (tokens.empty()) return 0.0;
    std::unordered_map<std::string_view, std::size_t> counts;
    for (const std::string& token : tokens) ++counts[token];
    const double total = static_cast<double>(tokens.size());
    double entropy = 0.0;
    for (const auto& [token, count] : counts) {
        const double p = static_cast<double>(count) / total;
        entropy -= p * std::log2(p);
    }
    return entropy;
}

BlockMetric neutrality_bias(const DocumentAnalysis& a) {
    BlockMetric metric;
    for (BlockKind kind : kAllBlocks) {
        const std::vector<std::string>& sentences = a.block_sentences(kind);
        double value = 1.0;  // empty block
        if (!sentences.empty()) {
            double positive_sum = 0.0, negative_sum = 0.0;
            for (const std::string& sentence : sentences) {
                const SentimentScores scores = a.config().sentiment->score(sentence);
                // neutral sentences contribute zero to both sums but count in n
                if (scores.neutral >= std::max(scores.positive, scores.negative)) continue;
                positive_sum += scores.positive;
                negative_sum += scores.negative;
            }
            const double n = static_cast<double>(sentences.size());
            value = 1.0 - std::abs(positive_sum / n - negative_sum / n);
        }
        metric.per_block[block_index(kind)] = value;
    }
    metric.document_mean = block_mean(metric.per_block);
    return metric;
}

double raw_cosine_similarity(const DocumentAnalysis& a) {
    return cosine(a.source_embedding(), a.combined_embedding());
}

double block_order_consistency(const DocumentAnalysis& a) {
    const std::vector<std::string>& source = a.source_tokens();
    const std::vector<std::string>& extracted = a.combined_tokens();

    // earliest not-yet-consumed occurrence of each extraction token in D
    std::unordered_map<std::string_view, std::deque<std::size_t>> positions;
    for (std::size_t i = 0; i < source.size(); ++i) positions[source[i]].push_back(i);

    std::vector<double> matched_d;
    matched_d.reserve(extracted.size());
    for (const std::string& token : extracted) {
        auto it = positions.find(token);
        if (it == positions.end() || it->second.empty()) continue;  // unmatched, skipped
        matched_d.push_back(static_cast<double>(it->second.front()));
        it->second.pop_front();
    }
    if (matched_d.size() < 2) return 0.0;

    std::vector<double> order_in_e(matched_d.size());
    for (std::size_t i = 0; i < order_in_e.size(); ++i) order_in_e[i] = static_cast<double>(i);
    const KendallTau kt = kendall_tau(order_in_e, matched_d);
    if (!kt.defined) return 0.0;
    return (kt.tau + 1.0) / 2.0;
}

double block_completeness(const DocumentAnalysis& a) { return coverage_ratio(a); }

double monotonicity_score(const DocumentAnalysis& a) {
    const std::vector<std::string> dates = extract_dates(a.combined());
    return std::is_sorted(dates.begin(), dates.end()) ? 1.0 : 0.0;
}

double keyword_pseudo_f1(const DocumentAnalysis& a) {
    const std::set<std::string>& key = a.source_key_terms();
    const std::set<std::string>& extracted = a.combined_token_set();
    if (key.empty() || extracted.empty()) return 0.0;
    std::size_t shared = 0;
    for (const std::string& term : key) shared += extracted.contains(term) ? 1 : 0;
    const double precision = static_cast<double>(shared) / static_cast<double>(extracted.size());
    const double recall = static_cast<double>(shared) / static_cast<double>(key.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

BlockMetric legal_term_density(const DocumentAnalysis& a) {
    // citation items re-tokenized so they intersect block token sets
    std::set<std::string> citation_tokens;
    for (const std::string& item : a.combined_citations().items) {
        for (std::string& token : a.config().tokenizer.tokenize(item))
            citation_tokens.insert(std::move(token));
    }
    BlockMetric metric;
    for (BlockKind kind : kAllBlocks) {
        const std::vector<std::string>& tokens = a.block_tokens(kind);
        const std::set<std::string> block_set(tokens.begin(), tokens.end());
        double value = 0.0;  // empty block
        if (!block_set.empty()) {
            std::size_t shared = 0;
            for (const std::string& token : block_set)
                shared += citation_tokens.contains(token) ? 1 : 0;
            value = static_cast<double>(shared) / static_cast<double>(block_set.size());
        }
        metric.per_block[block_index(kind)] = value;
    }
    metric.document_mean = block_mean(metric.per_block);
    return metric;
}

LlmMetric llm_evaluation(const Document& doc, const ChatClient& client,
                         const JudgeOptions& options) {
    const std::map<BlockKind, LlmBlockJudgment> judgments = judge_blocks(doc, client, options);
    LlmMetric metric;
    double sum = 0.0;
    for (BlockKind kind : kAllBlocks) {
        const LlmBlockJudgment& judgment = judgments.at(kind);
        metric.scores[block_index(kind)] = judgment.score;
        metric.reasons[block_index(kind)] = judgment.reason;
        sum += judgment.score;
    }
    metric.document_mean = sum / static_cast<double>(kBlockCount);
    return metric;
}

MetricVector compute_all(const Document& doc, const MetricConfig& config) {
    MetricVector mv;
    mv.document_id = doc.id;
    DocumentAnalysis analysis(doc, config);

    const auto enabled = [&](std::string_view name) {
        return !config.disabled.contains(std::string(name));
    };
    const auto run_document = [&](std::string_view name, auto&& fn) {
        if (!enabled(name)) return;
        try {
            mv.document_metrics[std::string(name)] = fn();
        } catch (const std::exception& e) {
            mv.warnings.push_back(std::string(name) + ": " + e.what());
        }
    };
    const auto run_block = [&](std::string_view name, auto&& fn) {
        if (!enabled(name)) return;
        try {
            const BlockMetric metric = fn();
            mv.block_metrics[std::string(name)] = metric.per_block;
            mv.document_metrics[std::string(name)] = metric.document_mean;
        } catch (const std::exception& e) {
            mv.warnings.push_back(std::string(name) + ": " + e.what());
        }
    };

    run_document(metric_names::coverage_ratio, [&] { return coverage_ratio(analysis); });
    run_document(metric_names::redundancy_penalty, [&] { return redundancy_penalty(analysis); });
    run_document(metric_names::compression_ratio, [&] { return compression_ratio(analysis); });
    run_document(metric_names::term_frequency_coherence,
                 [&] { return term_frequency_coherence(analysis); });
    run_document(metric_names::citation_coverage, [&] { return citation_coverage(analysis); });
    run_block(metric_names::intra_block_coherence, [&] { return intra_block_coherence(analysis); });
    run_block(metric_names::inter_block_distinctiveness,
              [&] { return inter_block_distinctiveness(analysis); });
    run_document(metric_names::semantic_entropy, [&] { return semantic_entropy(analysis); });
    run_block(metric_names::neutrality_bias, [&] { return neutrality_bias(analysis); });
    run_document(metric_names::raw_cosine_similarity,
                 [&] { return raw_cosine_similarity(analysis); });
    run_document(metric_names::block_order_consistency,
                 [&] { return block_order_consistency(analysis); });
    run_document(metric_names::block_completeness, [&] { return block_completeness(analysis); });
    run_document(metric_names::monotonicity_score, [&] { return monotonicity_score(analysis); });
    run_document(metric_names::keyword_pseudo_f1, [&] { return keyword_pseudo_f1(analysis); });
    run_block(metric_names::legal_term_density, [&] { return legal_term_density(analysis); });

    if (enabled(metric_names::llm_evaluation)) {
        if (!config.chat) {
            mv.warnings.emplace_back("llm_evaluation: no chat client configured");
        } else {
            try {
                const LlmMetric metric = llm_evaluation(doc, *config.chat, config.judge);
                std::array<double, kBlockCount> scores{};
                for (std::size_t i = 0; i < kBlockCount; ++i)
                    scores[i] = static_cast<double>(metric.scores[i]);
                mv.block_metrics[std::string(metric_names::llm_evaluation)] = scores;
                mv.document_metrics[std::string(metric_names::llm_evaluation)] =
                    metric.document_mean;
                mv.llm_reasons = metric.reasons;
            } catch (const std::exception& e) {
                mv.warnings.push_back(std::string(metric_names::llm_evaluation) + ": " + e.what());
            }
        }
    }
    return mv;
}

std::string metric_vector_to_json_line(const MetricVector& mv) {
    json record;
    record["id"] = mv.document_id;
    record["document_metrics"] = json::object();
    for (const auto& [name, value] : mv.document_metrics) record["document_metrics"][name] = value;
    record["block_metrics"] = json::object();
    for (const auto& [name, values] : mv.block_metrics) {
        json per_block = json::object();
        for (BlockKind kind : kAllBlocks)
            per_block[std::string(to_string(kind))] = values[block_index(kind)];
        record["block_metrics"][name] = std::move(per_block);
    }
    if (mv.llm_reasons) {
        json llm = json::object();
        const auto& scores = mv.block_metrics.at(std::string(metric_names::llm_evaluation));
        for (BlockKind kind : kAllBlocks) {
            llm[std::string(to_string(kind))] = {
                {"score", static_cast<int>(scores[block_index(kind)])},
                {"reason", (*mv.llm_reasons)[block_index(kind)]}};
        }
        record["llm"] = std::move(llm);
    }
    return record.dump();
}

MetricVector metric_vector_from_json_line(const std::string& line) {
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("id") ||
        !record["id"].is_string())
        throw Error(Errc::parse, "metric record must be an object with an \"id\"");

    MetricVector mv;
    mv.document_id = record["id"].get<std::string>();
    if (record.contains("document_metrics")) {
        for (const auto& [name, value] : record["document_metrics"].items()) {
            if (!value.is_number())
                throw Error(Errc::schema, "document metric \"" + name + "\" is not a number");
            mv.document_metrics[name] = value.get<double>();
        }
    }
    if (record.contains("block_metrics")) {
        for (const auto& [name, blocks] : record["block_metrics"].items()) {
            std::array<double, kBlockCount> values{};
            for (BlockKind kind : kAllBlocks) {
                const std::string key(to_string(kind));
                if (!blocks.contains(key) || !blocks[key].is_number())
                    throw Error(Errc::schema, "block metric \"" + name + "\" lacks \"" + key + "\"");
                values[block_index(kind)] = blocks[key].get<double>();
            }
            mv.block_metrics[name] = values;
        }
    }
    if (record.contains("llm")) {
        std::array<std::string, kBlockCount> reasons;
        for (BlockKind kind : kAllBlocks) {
            const std::string key(to_string(kind));
            if (record["llm"].contains(key) && record["llm"][key].contains("reason"))
                reasons[block_index(kind)] = record["llm"][key]["reason"].get<std::string>();
        }
        mv.llm_reasons = std::move(reasons);
    }
    return mv;
}

void save_metric_vectors(std::span<const MetricVector> vectors,
                         const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write " + path.string());
    for (const MetricVector& mv : vectors) out << metric_vector_to_json_line(mv) << "\n";
}

std::vector<MetricVector> load_metric_vectors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + path.string());
    std::vector<MetricVector> vectors;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        vectors.push_back(metric_vector_from_json_line(line));
    }
    return vectors;
}

}  // namespace lexeval
