#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexeval {

// The seven semantic blocks of a judicial decision, in canonical order.
enum class BlockKind {
    plaintiff_claims,
    plaintiff_arguments,
    defendant_arguments,
    court_evidence_evaluation,
    judge_reasoning,
    legal_norms,
    court_decision,
};

inline constexpr std::size_t kBlockCount = 7;

inline constexpr std::array<BlockKind, kBlockCount> kAllBlocks = {
    BlockKind::plaintiff_claims,        BlockKind::plaintiff_arguments,
    BlockKind::defendant_arguments,     BlockKind::court_evidence_evaluation,
    BlockKind::judge_reasoning,         BlockKind::legal_norms,
    BlockKind::court_decision,
};

std::string_view to_string(BlockKind kind);

// Accepts the canonical snake_case name or a known loader alias.
std::optional<BlockKind> block_from_string(std::string_view name);

inline std::size_t block_index(BlockKind kind) { return static_cast<std::size_t>(kind); }

struct Document {
    std::string id;
    std::string source_text;
    std::array<std::string, kBlockCount> blocks;

    const std::string& block(BlockKind kind) const { return blocks[block_index(kind)]; }
    std::string& block(BlockKind kind) { return blocks[block_index(kind)]; }

    bool operator==(const Document&) const = default;
};

struct ExpertRating {
    std::string document_id;
    BlockKind block = BlockKind::plaintiff_claims;
    std::string rater_id;
    int score = 1;  // 1..5 Likert

    double normalized() const { return (score - 1) / 4.0; }

    bool operator==(const ExpertRating&) const = default;
};

struct RatingAggregate {
    std::string document_id;
    BlockKind block = BlockKind::plaintiff_claims;
    double mean_normalized = 0.0;
    int rater_count = 0;
};

enum class CorpusFormat { json, jsonl };

std::vector<Document> load_corpus(const std::filesystem::path& path, CorpusFormat format);
void save_corpus(std::span<const Document> docs, const std::filesystem::path& path,
                 CorpusFormat format);

std::vector<ExpertRating> load_ratings(const std::filesystem::path& path);

// One aggregate per distinct (document, block), ordered by (document_id, block).
// A duplicate rating by the same rater for the same pair is an error.
std::vector<RatingAggregate> aggregate_ratings(std::span<const ExpertRating> ratings);

// Unweighted mean over the document's rated blocks; throws if none are rated.
double document_level_target(std::span<const RatingAggregate> document_aggregates);

}  // namespace lexeval
