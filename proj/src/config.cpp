#include "lexeval/config.hpp"

#include <fstream>

#include "lexeval/error.hpp"

namespace lexeval {

namespace {

std::string strip(std::string_view text) {
    std::size_t begin = text.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return "";
    std::size_t end = text.find_last_not_of(" \t\r");
    return std::string(text.substr(begin, end - begin + 1));
}

std::string unquote(const std::string& value) {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        return value.substr(1, value.size() - 2);
    return value;
}

std::uint64_t parse_unsigned(const std::string& value, const std::string& key) {
    try {
        return std::stoull(value);
    } catch (const std::exception&) {
        throw Error(Errc::config, "key \"" + key + "\" expects an unsigned integer, got: " + value);
    }
}

double parse_real(const std::string& value, const std::string& key) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw Error(Errc::config, "key \"" + key + "\" expects a number, got: " + value);
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    if (p.is_absolute()) return p;
    return base / p;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open config " + path.string());
    const std::filesystem::path base = path.parent_path();

    RunConfig config;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        const std::string entry = strip(line);
        if (entry.empty()) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::config,
                        path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = strip(entry.substr(0, eq));
        const std::string value = unquote(strip(entry.substr(eq + 1)));

        if (key == "seed") config.seed = parse_unsigned(value, key);
        else if (key == "bootstrap_samples") config.bootstrap_samples = parse_unsigned(value, key);
        else if (key == "permutation_samples")
            config.permutation_samples = parse_unsigned(value, key);
        else if (key == "ci_level") config.ci_level = parse_real(value, key);
        else if (key == "embedding_dim")
            config.embedding_dim = static_cast<std::size_t>(parse_unsigned(value, key));
        else if (key == "embedding_provider") config.embedding_provider = value;
        else if (key == "embedding_endpoint") config.embedding_endpoint = value;
        else if (key == "embedding_file") config.embedding_file = resolve(base, value);
        else if (key == "sentiment_provider") config.sentiment_provider = value;
        else if (key == "sentiment_lexicon") config.sentiment_lexicon = resolve(base, value);
        else if (key == "normalizer") config.normalizer = value;
        else if (key == "chat_endpoint") config.chat_endpoint = value;
        else if (key == "chat_path") config.chat_path = value;
        else if (key == "chat_model") config.chat_model = value;
        else if (key == "judge_attempts")
            config.judge_attempts = static_cast<int>(parse_unsigned(value, key));
        else if (key == "timeout_seconds")
            config.timeout_seconds = static_cast<int>(parse_unsigned(value, key));
        else if (key == "max_in_flight")
            config.max_in_flight = static_cast<int>(parse_unsigned(value, key));
        else if (key == "jobs") config.jobs = static_cast<std::size_t>(parse_unsigned(value, key));
        else if (key == "stopwords") config.stopwords = resolve(base, value);
        else if (key == "abbreviations") config.abbreviations = resolve(base, value);
        else if (key == "legal_patterns") config.legal_patterns = resolve(base, value);
        else if (key == "gazetteer") config.gazetteer = resolve(base, value);
        else if (key == "judge_prompt") config.judge_prompt = resolve(base, value);
        else if (key == "disable") {
            std::size_t start = 0;
            while (start <= value.size()) {
                const std::size_t comma = value.find(',', start);
                const std::string item =
                    strip(value.substr(start, comma == std::string::npos ? std::string::npos
                                                                         : comma - start));
                if (!item.empty()) config.disabled.insert(item);
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
        } else {
            throw Error(Errc::config, path.string() + ":" + std::to_string(lineno) +
                                          ": unknown key \"" + key + "\"");
        }
    }
    return config;
}

MetricConfig build_metric_config(const RunConfig& config) {
    MetricConfig metric_config;

    Tokenizer tokenizer;
    tokenizer.stopwords = load_stopwords(config.stopwords);
    if (config.normalizer == "identity") {
        tokenizer.normalizer = std::make_shared<IdentityNormalizer>();
    } else if (config.normalizer == "stem") {
        tokenizer.normalizer = std::make_shared<LightStemmer>();
    } else {
        throw Error(Errc::config, "unknown normalizer \"" + config.normalizer + "\"");
    }
    metric_config.tokenizer = tokenizer;
    metric_config.splitter = SentenceSplitter::from_file(config.abbreviations);
    metric_config.patterns = LegalPatterns::from_file(config.legal_patterns);

    if (config.embedding_provider == "hash") {
        metric_config.embeddings = std::make_shared<HashEmbedding>(tokenizer, config.embedding_dim);
    } else if (config.embedding_provider == "file") {
        metric_config.embeddings =
            std::make_shared<FileEmbedding>(config.embedding_file, config.embedding_dim);
    } else if (config.embedding_provider == "remote") {
        RemoteOptions options;
        options.endpoint = config.embedding_endpoint;
        options.path = "/embed";
        options.timeout_seconds = config.timeout_seconds;
        options.max_in_flight = config.max_in_flight;
        metric_config.embeddings =
            std::make_shared<RemoteEmbedding>(std::move(options), config.embedding_dim);
    } else {
        throw Error(Errc::config,
                    "unknown embedding provider \"" + config.embedding_provider + "\"");
    }

    if (config.sentiment_provider == "neutral") {
        metric_config.sentiment = std::make_shared<NeutralSentiment>();
    } else if (config.sentiment_provider == "lexicon") {
        metric_config.sentiment = std::make_shared<LexiconSentiment>(
            LexiconSentiment::from_file(tokenizer, config.sentiment_lexicon));
    } else {
        throw Error(Errc::config,
                    "unknown sentiment provider \"" + config.sentiment_provider + "\"");
    }

    metric_config.ner = std::make_shared<HeuristicNer>(HeuristicNer::from_file(config.gazetteer));

    if (!config.chat_endpoint.empty()) {
        RemoteOptions options;
        options.endpoint = config.chat_endpoint;
        options.path = config.chat_path;
        options.timeout_seconds = config.timeout_seconds;
        options.max_in_flight = config.max_in_flight;
        metric_config.chat = std::make_shared<HttpChatClient>(std::move(options));
        metric_config.judge =
            load_judge_options(config.judge_prompt, config.chat_model, config.judge_attempts);
    }

    metric_config.disabled = config.disabled;
    return metric_config;
}

StatsConfig stats_config(const RunConfig& config) {
    StatsConfig stats;
    stats.seed = config.seed;
    stats.bootstrap_samples = config.bootstrap_samples;
    stats.permutation_samples = config.permutation_samples;
    stats.ci_level = config.ci_level;
    return stats;
}

}  // namespace lexeval
