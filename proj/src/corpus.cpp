#include "lexeval/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "lexeval/error.hpp"

namespace lexeval {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kBlockCount> kBlockNames = {
    "plaintiff_claims",   "plaintiff_arguments", "defendant_arguments",
    "court_evidence_evaluation", "judge_reasoning", "legal_norms", "court_decision",
};

const std::unordered_map<std::string_view, BlockKind>& alias_table() {
    static const std::unordered_map<std::string_view, BlockKind> table = {
        {"plaintiff_claims", BlockKind::plaintiff_claims},
        {"claims", BlockKind::plaintiff_claims},
        {"plaintiff_demands", BlockKind::plaintiff_claims},
        {"plaintiff_arguments", BlockKind::plaintiff_arguments},
        {"arguments", BlockKind::plaintiff_arguments},
        {"supporting_arguments", BlockKind::plaintiff_arguments},
        {"defendant_arguments", BlockKind::defendant_arguments},
        {"counterarguments", BlockKind::defendant_arguments},
        {"court_evidence_evaluation", BlockKind::court_evidence_evaluation},
        {"evidence_evaluation", BlockKind::court_evidence_evaluation},
        {"court_evaluation_of_evidence", BlockKind::court_evidence_evaluation},
        {"judge_reasoning", BlockKind::judge_reasoning},
        {"reasoning", BlockKind::judge_reasoning},
        {"reasoning_steps", BlockKind::judge_reasoning},
        {"legal_norms", BlockKind::legal_norms},
        {"applicable_norms", BlockKind::legal_norms},
        {"norms", BlockKind::legal_norms},
        {"court_decision", BlockKind::court_decision},
        {"decision", BlockKind::court_decision},
        {"final_ruling", BlockKind::court_decision},
        {"ruling", BlockKind::court_decision},
    };
    return table;
}

Document document_from_json(const json& record, std::size_t position) {
    const std::string where = "record #" + std::to_string(position);
    if (!record.is_object()) throw Error(Errc::schema, where + " is not an object");
    if (!record.contains("id") || !record["id"].is_string())
        throw Error(Errc::schema, where + " has no string \"id\"");

    Document doc;
    doc.id = record["id"].get<std::string>();
    if (doc.id.empty()) throw Error(Errc::schema, where + " has an empty id");
    if (!record.contains("source_text") || !record["source_text"].is_string())
        throw Error(Errc::schema, "document \"" + doc.id + "\" has no string \"source_text\"");
    doc.source_text = record["source_text"].get<std::string>();

    if (!record.contains("blocks") || !record["blocks"].is_object())
        throw Error(Errc::schema, "document \"" + doc.id + "\" has no \"blocks\" object");

    std::array<bool, kBlockCount> seen{};
    for (const auto& [key, value] : record["blocks"].items()) {
        auto kind = block_from_string(key);
        if (!kind)
            throw Error(Errc::schema,
                        "document \"" + doc.id + "\" has unknown block \"" + key + "\"");
        if (seen[block_index(*kind)])
            throw Error(Errc::schema, "document \"" + doc.id + "\" repeats block \"" +
                                          std::string(to_string(*kind)) + "\"");
        if (!value.is_string())
            throw Error(Errc::schema,
                        "document \"" + doc.id + "\" block \"" + key + "\" is not a string");
        doc.block(*kind) = value.get<std::string>();
        seen[block_index(*kind)] = true;
    }
    for (BlockKind kind : kAllBlocks) {
        if (!seen[block_index(kind)])
            throw Error(Errc::schema, "document \"" + doc.id + "\" is missing block \"" +
                                          std::string(to_string(kind)) + "\"");
    }
    return doc;
}

json document_to_json(const Document& doc) {
    json blocks = json::object();
    for (BlockKind kind : kAllBlocks) blocks[std::string(to_string(kind))] = doc.block(kind);
    return json{{"id", doc.id}, {"source_text", doc.source_text}, {"blocks", blocks}};
}

json parse_json(const std::string& text, const std::string& what) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) throw Error(Errc::parse, "malformed JSON in " + what);
    return parsed;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

std::string_view to_string(BlockKind kind) { return kBlockNames[block_index(kind)]; }

std::optional<BlockKind> block_from_string(std::string_view name) {
    const auto& table = alias_table();
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::vector<Document> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    const std::string content = read_file(path);
    std::vector<Document> docs;

    if (format == CorpusFormat::json) {
        json root = parse_json(content, path.string());
        if (!root.is_array()) throw Error(Errc::schema, path.string() + " is not a JSON array");
        docs.reserve(root.size());
        for (std::size_t i = 0; i < root.size(); ++i)
            docs.push_back(document_from_json(root[i], i));
    } else {
        std::istringstream lines(content);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json record = parse_json(line, path.string() + ":" + std::to_string(lineno));
            docs.push_back(document_from_json(record, lineno));
        }
    }

    std::unordered_set<std::string_view> ids;
    for (const Document& doc : docs) {
        if (!ids.insert(doc.id).second)
            throw Error(Errc::duplicate_id, "duplicate document id \"" + doc.id + "\"");
    }
    return docs;
}

void save_corpus(std::span<const Document> docs, const std::filesystem::path& path,
                 CorpusFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write " + path.string());
    if (format == CorpusFormat::json) {
        json root = json::array();
        for (const Document& doc : docs) root.push_back(document_to_json(doc));
        out << root.dump(2) << "\n";
    } else {
        for (const Document& doc : docs) out << document_to_json(doc).dump() << "\n";
    }
}

std::vector<ExpertRating> load_ratings(const std::filesystem::path& path) {
    json root = parse_json(read_file(path), path.string());
    if (!root.is_array()) throw Error(Errc::schema, path.string() + " is not a JSON array");

    std::vector<ExpertRating> ratings;
    ratings.reserve(root.size());
    for (std::size_t i = 0; i < root.size(); ++i) {
        const json& record = root[i];
        const std::string where = "rating #" + std::to_string(i);
        if (!record.is_object()) throw Error(Errc::schema, where + " is not an object");
        for (const char* field : {"document_id", "block", "rater_id"}) {
            if (!record.contains(field) || !record[field].is_string())
                throw Error(Errc::schema, where + " has no string \"" + field + "\"");
        }
        if (!record.contains("score") || !record["score"].is_number_integer())
            throw Error(Errc::schema, where + " has no integer \"score\"");

        ExpertRating rating;
        rating.document_id = record["document_id"].get<std::string>();
        rating.rater_id = record["rater_id"].get<std::string>();
        const std::string block_name = record["block"].get<std::string>();
        auto kind = block_from_string(block_name);
        if (!kind) throw Error(Errc::unknown_block, where + " names unknown block \"" + block_name + "\"");
        rating.block = *kind;
        const auto score = record["score"].get<std::int64_t>();
        if (score < 1 || score > 5)
            throw Error(Errc::range, where + " score " + std::to_string(score) + " outside [1,5]");
        rating.score = static_cast<int>(score);
        ratings.push_back(std::move(rating));
    }
    return ratings;
}

std::vector<RatingAggregate> aggregate_ratings(std::span<const ExpertRating> ratings) {
    // rater -> score maps keyed by (doc, block); std::map gives output order and
    // a summation order independent of the input permutation
    std::map<std::pair<std::string, BlockKind>, std::map<std::string, int>> groups;
    for (const ExpertRating& rating : ratings) {
        auto& raters = groups[{rating.document_id, rating.block}];
        auto [it, inserted] = raters.emplace(rating.rater_id, rating.score);
        if (!inserted)
            throw Error(Errc::duplicate_rating,
                        "rater \"" + rating.rater_id + "\" rated document \"" +
                            rating.document_id + "\" block \"" +
                            std::string(to_string(rating.block)) + "\" more than once");
    }

    std::vector<RatingAggregate> aggregates;
    aggregates.reserve(groups.size());
    for (const auto& [key, raters] : groups) {
        RatingAggregate agg;
        agg.document_id = key.first;
        agg.block = key.second;
        double sum = 0.0;
        for (const auto& [rater, score] : raters) sum += (score - 1) / 4.0;
        agg.rater_count = static_cast<int>(raters.size());
        agg.mean_normalized = sum / static_cast<double>(agg.rater_count);
        aggregates.push_back(std::move(agg));
    }
    return aggregates;
}

double document_level_target(std::span<const RatingAggregate> document_aggregates) {
    if (document_aggregates.empty())
        throw Error(Errc::missing_ratings, "document has no rated blocks");
    for (const RatingAggregate& agg : document_aggregates) {
        if (agg.document_id != document_aggregates.front().document_id)
            throw Error(Errc::schema, "aggregates span more than one document");
    }
    double sum = 0.0;
    for (const RatingAggregate& agg : document_aggregates) sum += agg.mean_normalized;
    return sum / static_cast<double>(document_aggregates.size());
}

}  // namespace lexeval
