#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>

#include "lexeval/metrics.hpp"
#include "lexeval/stats.hpp"

namespace lexeval {

// Everything a run needs; loadable from a flat key = value file, overridable
// by command-line flags (flags win).
struct RunConfig {
    std::uint64_t seed = 42;
    std::size_t bootstrap_samples = 1000;
    std::size_t permutation_samples = 0;
    double ci_level = 0.95;

    std::size_t embedding_dim = 256;
    std::string embedding_provider = "hash";  // hash | remote | file
    std::string embedding_endpoint;
    std::filesystem::path embedding_file;
    std::string sentiment_provider = "neutral";  // neutral | lexicon
    std::filesystem::path sentiment_lexicon;
    std::string normalizer = "stem";  // stem | identity

    std::string chat_endpoint;  // empty disables llm_evaluation
    std::string chat_path = "/v1/chat/completions";
    std::string chat_model = "judge";
    int judge_attempts = 3;
    int timeout_seconds = 60;
    int max_in_flight = 4;
    std::size_t jobs = 0;  // 0 = hardware concurrency

    std::filesystem::path stopwords = "data/stopwords_ru.txt";
    std::filesystem::path abbreviations = "data/abbreviations_ru.txt";
    std::filesystem::path legal_patterns = "data/legal_patterns.txt";
    std::filesystem::path gazetteer = "data/courts_gazetteer.txt";
    std::filesystem::path judge_prompt = "data/judge_prompt.txt";

    std::set<std::string> disabled;
};

// Relative paths in the file resolve against the file's directory.
RunConfig load_run_config(const std::filesystem::path& path);

// Loads the data files and constructs the configured providers.
MetricConfig build_metric_config(const RunConfig& config);

StatsConfig stats_config(const RunConfig& config);

}  // namespace lexeval
