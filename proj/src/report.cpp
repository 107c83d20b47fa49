#include "lexeval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lexeval/error.hpp"

namespace lexeval {

using nlohmann::json;

namespace {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

// independent deterministic RNG substream per (metric, scope, statistic)
std::uint64_t substream_seed(std::uint64_t master, std::string_view metric,
                             std::string_view scope, std::string_view statistic) {
    std::string key;
    key.reserve(metric.size() + scope.size() + statistic.size() + 2);
    key.append(metric);
    key.push_back('\x1f');
    key.append(scope);
    key.push_back('\x1f');
    key.append(statistic);
    return master ^ fnv1a64(key);
}

bool is_constant(std::span<const double> values) {
    for (double v : values) {
        if (v != values.front()) return false;
    }
    return true;
}

StatSummary make_summary(std::span<const double> metric_norm, std::span<const double> expert_norm,
                         const StatsConfig& config, std::string_view metric,
                         std::string_view scope) {
    StatSummary summary;
    summary.n = metric_norm.size();
    if (summary.n == 0) return summary;

    double sum = 0.0;
    for (double v : metric_norm) sum += v;
    const double mean = sum / static_cast<double>(summary.n);
    double ss = 0.0;
    for (double v : metric_norm) ss += (v - mean) * (v - mean);
    const double variance = ss / static_cast<double>(summary.n);
    summary.mean = mean;
    summary.variance = variance;
    summary.std_dev = std::sqrt(variance);

    PairedSeries pairs;
    pairs.metric_values.assign(metric_norm.begin(), metric_norm.end());
    pairs.expert_values.assign(expert_norm.begin(), expert_norm.end());

    if (const auto c = pearson(pairs)) {
        summary.pearson_r = c->r;
        summary.pearson_p = c->p_value;
    }
    if (const auto c = spearman(pairs)) {
        summary.spearman_r = c->r;
        summary.spearman_p = c->p_value;
    }
    if (const auto c = kendall(pairs)) {
        summary.kendall_tau = c->r;
        summary.kendall_p = c->p_value;
    }
    // constant series report "--" for the whole correlation family
    if (!is_constant(metric_norm) && !is_constant(expert_norm)) {
        if (const auto c = lin_ccc(pairs); c && !c->degenerate) summary.lin_ccc = c->value;
    }
    summary.mae = mae(pairs);

    if (config.bootstrap_samples > 0 && summary.n >= 3) {
        const auto add_ci = [&](Statistic statistic, bool defined) {
            if (!defined) return;
            const auto name = to_string(statistic);
            try {
                const BootstrapCi ci =
                    bootstrap_ci(pairs, statistic, config.bootstrap_samples,
                                 substream_seed(config.seed, metric, scope, name), config.ci_level);
                summary.bootstrap[std::string(name)] = {ci.lo, ci.hi};
            } catch (const Error&) {
                // fewer than 10 valid resamples: leave the cell absent
            }
        };
        add_ci(Statistic::pearson_r, summary.pearson_r.has_value());
        add_ci(Statistic::spearman_r, summary.spearman_r.has_value());
        add_ci(Statistic::kendall_tau, summary.kendall_tau.has_value());
        add_ci(Statistic::lin_ccc, summary.lin_ccc.has_value());
        add_ci(Statistic::mae, summary.mae.has_value());
    }
    if (config.permutation_samples > 0 && summary.pearson_r.has_value()) {
        try {
            summary.permutation_p =
                permutation_p(pairs, Statistic::pearson_r, config.permutation_samples,
                              substream_seed(config.seed, metric, scope, "permutation"));
        } catch (const Error&) {
        }
    }
    return summary;
}

}  // namespace

AnalysisReport build_report(std::span<const MetricVector> metrics,
                            std::span<const ExpertRating> ratings, const StatsConfig& config) {
    AnalysisReport report;
    report.run = config;

    std::set<std::string_view> known_ids;
    for (const MetricVector& mv : metrics) known_ids.insert(mv.document_id);

    std::vector<ExpertRating> kept;
    kept.reserve(ratings.size());
    for (const ExpertRating& rating : ratings) {
        if (known_ids.contains(rating.document_id)) {
            kept.push_back(rating);
        } else {
            ++report.dropped_unknown_document_ratings;
        }
    }

    const std::vector<RatingAggregate> aggregates = aggregate_ratings(kept);

    std::map<std::pair<std::string, BlockKind>, double> block_expert;
    for (const RatingAggregate& agg : aggregates)
        block_expert[{agg.document_id, agg.block}] = agg.mean_normalized;

    std::map<std::string, double> doc_expert;
    {
        std::size_t i = 0;
        while (i < aggregates.size()) {
            std::size_t j = i;
            while (j < aggregates.size() &&
                   aggregates[j].document_id == aggregates[i].document_id)
                ++j;
            doc_expert[aggregates[i].document_id] = document_level_target(
                std::span<const RatingAggregate>(aggregates).subspan(i, j - i));
            i = j;
        }
    }

    // --- expert statistics per block ---
    std::map<BlockKind, std::map<std::string, std::map<std::string, double>>> rater_scores;
    std::map<BlockKind, std::size_t> rating_counts;
    for (const ExpertRating& rating : kept) {
        rater_scores[rating.block][rating.document_id][rating.rater_id] = rating.normalized();
        ++rating_counts[rating.block];
    }
    for (BlockKind kind : kAllBlocks) {
        ExpertBlockStats stats;
        stats.rating_count = rating_counts[kind];
        std::vector<double> means;
        for (const RatingAggregate& agg : aggregates) {
            if (agg.block != kind) continue;
            means.push_back(agg.mean_normalized);
            ++stats.rater_histogram[agg.rater_count];
        }
        stats.evaluated_pairs = means.size();
        if (!means.empty()) {
            double sum = 0.0;
            for (double v : means) sum += v;
            const double mean = sum / static_cast<double>(means.size());
            double ss = 0.0;
            for (double v : means) ss += (v - mean) * (v - mean);
            stats.mean = mean;
            stats.variance = ss / static_cast<double>(means.size());
            stats.std_dev = std::sqrt(*stats.variance);
            double raters = 0.0;
            for (const auto& [count, freq] : stats.rater_histogram)
                raters += static_cast<double>(count) * static_cast<double>(freq);
            stats.avg_raters = raters / static_cast<double>(means.size());
        }
        // ICC over items with the modal rater count (ties -> the larger count)
        int modal = 0;
        std::size_t modal_freq = 0;
        for (const auto& [count, freq] : stats.rater_histogram) {
            if (freq >= modal_freq) {
                modal_freq = freq;
                modal = count;
            }
        }
        if (modal >= 2) {
            std::vector<std::vector<double>> matrix;
            for (const auto& [doc_id, raters] : rater_scores[kind]) {
                if (raters.size() != static_cast<std::size_t>(modal)) continue;
                std::vector<double> row;
                row.reserve(raters.size());
                for (const auto& [rater, score] : raters) row.push_back(score);  // rater_id order
                matrix.push_back(std::move(row));
            }
            try {
                stats.icc2k = icc2k(matrix);
            } catch (const Error&) {
            }
        }
        report.experts[kind] = std::move(stats);
    }

    // --- metric reports ---
    std::vector<std::string> names;
    {
        std::set<std::string> seen;
        for (const MetricVector& mv : metrics) {
            for (const auto& [name, value] : mv.document_metrics) seen.insert(name);
            for (const auto& [name, values] : mv.block_metrics) seen.insert(name);
        }
        for (std::string_view name : all_metric_names()) {
            if (seen.contains(std::string(name))) names.emplace_back(name);
        }
        for (const std::string& name : seen) {
            if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
        }
    }

    for (const std::string& name : names) {
        MetricReport metric_report;
        metric_report.name = name;
        bool block_level = false;
        for (const MetricVector& mv : metrics) {
            if (mv.block_metrics.contains(name)) {
                block_level = true;
                break;
            }
        }
        metric_report.block_level = block_level;

        if (block_level) {
            std::vector<double> metric_raw, expert_raw;
            std::vector<BlockKind> block_keys;
            for (const MetricVector& mv : metrics) {
                const auto values = mv.block_metrics.find(name);
                if (values == mv.block_metrics.end()) continue;
                for (BlockKind kind : kAllBlocks) {
                    const auto expert = block_expert.find({mv.document_id, kind});
                    if (expert == block_expert.end()) continue;
                    metric_raw.push_back(values->second[block_index(kind)]);
                    expert_raw.push_back(expert->second);
                    block_keys.push_back(kind);
                }
            }
            std::vector<double> metric_norm, expert_norm;
            if (!metric_raw.empty()) {
                // normalized globally per metric before any per-block slicing
                metric_norm = minmax_normalize(metric_raw);
                expert_norm = minmax_normalize(expert_raw);
            }
            metric_report.global = make_summary(metric_norm, expert_norm, config, name, "global");
            for (BlockKind kind : kAllBlocks) {
                std::vector<double> m, e;
                for (std::size_t i = 0; i < block_keys.size(); ++i) {
                    if (block_keys[i] != kind) continue;
                    m.push_back(metric_norm[i]);
                    e.push_back(expert_norm[i]);
                }
                metric_report.per_block[kind] =
                    make_summary(m, e, config, name, to_string(kind));
            }
        } else {
            std::vector<double> metric_raw, expert_raw;
            for (const MetricVector& mv : metrics) {
                const auto value = mv.document_metrics.find(name);
                if (value == mv.document_metrics.end()) continue;
                const auto target = doc_expert.find(mv.document_id);
                if (target == doc_expert.end()) continue;
                metric_raw.push_back(value->second);
                expert_raw.push_back(target->second);
            }
            std::vector<double> metric_norm, expert_norm;
            if (!metric_raw.empty()) {
                metric_norm = minmax_normalize(metric_raw);
                expert_norm = minmax_normalize(expert_raw);
            }
            metric_report.global = make_summary(metric_norm, expert_norm, config, name, "global");
        }
        report.metrics.push_back(std::move(metric_report));
    }
    return report;
}

// --- JSON serialization ---

namespace {

json opt_to_json(const std::optional<double>& value) {
    if (!value) return nullptr;
    return *value;
}

std::optional<double> opt_from_json(const json& value) {
    if (value.is_null()) return std::nullopt;
    return value.get<double>();
}

json summary_to_json(const StatSummary& s) {
    json out;
    out["n"] = s.n;
    out["mean"] = opt_to_json(s.mean);
    out["variance"] = opt_to_json(s.variance);
    out["std_dev"] = opt_to_json(s.std_dev);
    out["pearson_r"] = opt_to_json(s.pearson_r);
    out["pearson_p"] = opt_to_json(s.pearson_p);
    out["spearman_r"] = opt_to_json(s.spearman_r);
    out["spearman_p"] = opt_to_json(s.spearman_p);
    out["kendall_tau"] = opt_to_json(s.kendall_tau);
    out["kendall_p"] = opt_to_json(s.kendall_p);
    out["lin_ccc"] = opt_to_json(s.lin_ccc);
    out["mae"] = opt_to_json(s.mae);
    json ci = json::object();
    for (const auto& [name, bounds] : s.bootstrap)
        ci[name] = json::array({bounds.first, bounds.second});
    out["bootstrap"] = std::move(ci);
    out["permutation_p"] = opt_to_json(s.permutation_p);
    return out;
}

StatSummary summary_from_json(const json& j) {
    StatSummary s;
    s.n = j.at("n").get<std::size_t>();
    s.mean = opt_from_json(j.at("mean"));
    s.variance = opt_from_json(j.at("variance"));
    s.std_dev = opt_from_json(j.at("std_dev"));
    s.pearson_r = opt_from_json(j.at("pearson_r"));
    s.pearson_p = opt_from_json(j.at("pearson_p"));
    s.spearman_r = opt_from_json(j.at("spearman_r"));
    s.spearman_p = opt_from_json(j.at("spearman_p"));
    s.kendall_tau = opt_from_json(j.at("kendall_tau"));
    s.kendall_p = opt_from_json(j.at("kendall_p"));
    s.lin_ccc = opt_from_json(j.at("lin_ccc"));
    s.mae = opt_from_json(j.at("mae"));
    if (j.contains("bootstrap")) {
        for (const auto& [name, bounds] : j.at("bootstrap").items())
            s.bootstrap[name] = {bounds[0].get<double>(), bounds[1].get<double>()};
    }
    s.permutation_p = opt_from_json(j.at("permutation_p"));
    return s;
}

}  // namespace

std::string analysis_to_json(const AnalysisReport& report) {
    json out;
    out["run"] = {{"seed", report.run.seed},
                  {"bootstrap_samples", report.run.bootstrap_samples},
                  {"permutation_samples", report.run.permutation_samples},
                  {"ci_level", report.run.ci_level},
                  {"dropped_ratings", report.dropped_unknown_document_ratings}};
    json metrics = json::array();
    for (const MetricReport& metric : report.metrics) {
        json entry;
        entry["name"] = metric.name;
        entry["level"] = metric.block_level ? "block" : "document";
        entry["global"] = summary_to_json(metric.global);
        if (metric.block_level) {
            json per_block = json::object();
            for (const auto& [kind, summary] : metric.per_block)
                per_block[std::string(to_string(kind))] = summary_to_json(summary);
            entry["per_block"] = std::move(per_block);
        }
        metrics.push_back(std::move(entry));
    }
    out["metrics"] = std::move(metrics);

    json experts = json::object();
    for (const auto& [kind, stats] : report.experts) {
        json entry;
        entry["rating_count"] = stats.rating_count;
        entry["evaluated_pairs"] = stats.evaluated_pairs;
        entry["mean"] = opt_to_json(stats.mean);
        entry["variance"] = opt_to_json(stats.variance);
        entry["std_dev"] = opt_to_json(stats.std_dev);
        entry["avg_raters"] = opt_to_json(stats.avg_raters);
        json histogram = json::object();
        for (const auto& [count, freq] : stats.rater_histogram)
            histogram[std::to_string(count)] = freq;
        entry["rater_histogram"] = std::move(histogram);
        entry["icc2k"] = opt_to_json(stats.icc2k);
        experts[std::string(to_string(kind))] = std::move(entry);
    }
    out["experts"] = {{"blocks", std::move(experts)}};
    return out.dump(2);
}

AnalysisReport analysis_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(Errc::parse, "analysis file is not a JSON object");

    AnalysisReport report;
    const json& run = j.at("run");
    report.run.seed = run.at("seed").get<std::uint64_t>();
    report.run.bootstrap_samples = run.at("bootstrap_samples").get<std::size_t>();
    report.run.permutation_samples = run.at("permutation_samples").get<std::size_t>();
    report.run.ci_level = run.at("ci_level").get<double>();
    report.dropped_unknown_document_ratings = run.value("dropped_ratings", std::size_t{0});

    for (const json& entry : j.at("metrics")) {
        MetricReport metric;
        metric.name = entry.at("name").get<std::string>();
        metric.block_level = entry.at("level").get<std::string>() == "block";
        metric.global = summary_from_json(entry.at("global"));
        if (metric.block_level && entry.contains("per_block")) {
            for (const auto& [key, summary] : entry.at("per_block").items()) {
                const auto kind = block_from_string(key);
                if (!kind) throw Error(Errc::schema, "unknown block \"" + key + "\" in analysis");
                metric.per_block[*kind] = summary_from_json(summary);
            }
        }
        report.metrics.push_back(std::move(metric));
    }
    if (j.contains("experts") && j.at("experts").contains("blocks")) {
        for (const auto& [key, entry] : j.at("experts").at("blocks").items()) {
            const auto kind = block_from_string(key);
            if (!kind) throw Error(Errc::schema, "unknown block \"" + key + "\" in analysis");
            ExpertBlockStats stats;
            stats.rating_count = entry.at("rating_count").get<std::size_t>();
            stats.evaluated_pairs = entry.at("evaluated_pairs").get<std::size_t>();
            stats.mean = opt_from_json(entry.at("mean"));
            stats.variance = opt_from_json(entry.at("variance"));
            stats.std_dev = opt_from_json(entry.at("std_dev"));
            stats.avg_raters = opt_from_json(entry.at("avg_raters"));
            for (const auto& [count, freq] : entry.at("rater_histogram").items())
                stats.rater_histogram[std::stoi(count)] = freq.get<std::size_t>();
            stats.icc2k = opt_from_json(entry.at("icc2k"));
            report.experts[*kind] = std::move(stats);
        }
    }
    return report;
}

// --- renderers ---

namespace {

std::string format_fixed(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.3f", value);
    return buffer;
}

std::string format_p(double p) {
    char buffer[64];
    if (p < 0.01) {
        std::snprintf(buffer, sizeof(buffer), "%.2e", p);
    } else {
        std::snprintf(buffer, sizeof(buffer), "%.2f", p);
    }
    return buffer;
}

std::string cell(const std::optional<double>& value) {
    return value ? format_fixed(*value) : "--";
}

std::string corr_cell(const std::optional<double>& r, const std::optional<double>& p) {
    if (!r) return "--";
    std::string out = format_fixed(*r);
    if (p) out += " (" + format_p(*p) + ")";
    return out;
}

std::vector<std::string> summary_row(std::string_view label, const StatSummary& s) {
    return {std::string(label),
            std::to_string(s.n),
            cell(s.mean),
            cell(s.variance),
            cell(s.std_dev),
            corr_cell(s.pearson_r, s.pearson_p),
            corr_cell(s.spearman_r, s.spearman_p),
            corr_cell(s.kendall_tau, s.kendall_p),
            cell(s.lin_ccc),
            cell(s.mae)};
}

const std::vector<std::string>& header_row() {
    static const std::vector<std::string> header = {
        "Metric",        "# Eval.",        "Mean",          "Var.",    "Std. Dev.",
        "Pearson r (p)", "Spearman r (p)", "Kendall r (p)", "Lin CCC", "MAE"};
    return header;
}

void markdown_table(std::ostringstream& out, const std::vector<std::vector<std::string>>& rows) {
    const std::vector<std::string>& header = header_row();
    out << "|";
    for (const std::string& h : header) out << " " << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out << "---|";
    out << "\n";
    for (const auto& row : rows) {
        out << "|";
        for (const std::string& value : row) out << " " << value << " |";
        out << "\n";
    }
    out << "\n";
}

std::string csv_escape(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted += "\"";
    return quoted;
}

std::string block_title(BlockKind kind) {
    switch (kind) {
        case BlockKind::plaintiff_claims: return "Plaintiff's Claims";
        case BlockKind::plaintiff_arguments: return "Plaintiff's Arguments";
        case BlockKind::defendant_arguments: return "Defendant's Arguments";
        case BlockKind::court_evidence_evaluation: return "Court Evidence Eval.";
        case BlockKind::judge_reasoning: return "Judge's Reasoning";
        case BlockKind::legal_norms: return "Legal Norms";
        case BlockKind::court_decision: return "Court Decision";
    }
    return "";
}

std::string metric_title(const std::string& name) {
    std::string title = name;
    std::replace(title.begin(), title.end(), '_', ' ');
    bool start = true;
    for (char& c : title) {
        if (start && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        start = c == ' ';
    }
    return title;
}

}  // namespace

std::string render_markdown(const AnalysisReport& report) {
    std::ostringstream out;

    std::vector<std::vector<std::string>> block_rows, document_rows;
    for (const MetricReport& metric : report.metrics) {
        auto row = summary_row(metric_title(metric.name), metric.global);
        (metric.block_level ? block_rows : document_rows).push_back(std::move(row));
    }
    if (!block_rows.empty()) {
        out << "## Global Statistics for Block-Level Metrics\n\n";
        markdown_table(out, block_rows);
    }
    if (!document_rows.empty()) {
        out << "## Document-Level Metrics Statistics\n\n";
        markdown_table(out, document_rows);
    }
    for (const MetricReport& metric : report.metrics) {
        if (!metric.block_level || metric.per_block.empty()) continue;
        out << "## Per-Block Statistics for " << metric_title(metric.name) << "\n\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto& [kind, summary] : metric.per_block)
            rows.push_back(summary_row(block_title(kind), summary));
        markdown_table(out, rows);
    }

    if (!report.experts.empty()) {
        out << "## Per-Block Expert Statistics\n\n";
        out << "| Block | # Ratings | # Rated Pairs | Mean | Var. | Std. Dev. | Avg. Experts | "
               "ICC(2,k) |\n";
        out << "|---|---|---|---|---|---|---|---|\n";
        for (const auto& [kind, stats] : report.experts) {
            out << "| " << block_title(kind) << " | " << stats.rating_count << " | "
                << stats.evaluated_pairs << " | " << cell(stats.mean) << " | "
                << cell(stats.variance) << " | " << cell(stats.std_dev) << " | "
                << cell(stats.avg_raters) << " | " << cell(stats.icc2k) << " |\n";
        }
        out << "\n";
    }
    return out.str();
}

std::string render_csv(const AnalysisReport& report) {
    std::ostringstream out;
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << csv_escape(row[i]);
        }
        out << "\r\n";
    };

    std::vector<std::string> header = {"Scope"};
    header.insert(header.end(), header_row().begin(), header_row().end());
    write_row(header);
    for (const MetricReport& metric : report.metrics) {
        auto row = summary_row(metric_title(metric.name), metric.global);
        row.insert(row.begin(), metric.block_level ? "block-level" : "document-level");
        write_row(row);
        for (const auto& [kind, summary] : metric.per_block) {
            auto block_row = summary_row(metric_title(metric.name), summary);
            block_row.insert(block_row.begin(), block_title(kind));
            write_row(block_row);
        }
    }
    return out.str();
}

}  // namespace lexeval
