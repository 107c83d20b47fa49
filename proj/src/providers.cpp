#include "lexeval/providers.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "lexeval/error.hpp"
#include "lexeval/sha256.hpp"
#include "lexeval/utf8.hpp"

namespace lexeval {

using nlohmann::json;

double cosine(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim())
        throw Error(Errc::dimension_mismatch, "cosine of " + std::to_string(a.dim()) + " vs " +
                                                  std::to_string(b.dim()) + " dims");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

namespace {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace

HashEmbedding::HashEmbedding(Tokenizer tokenizer, std::size_t dim)
    : tokenizer_(std::move(tokenizer)), dim_(dim) {
    if (dim_ == 0) throw Error(Errc::config, "embedding dim must be >= 1");
}

Embedding HashEmbedding::embed(std::string_view text) const {
    Embedding result;
    result.values.assign(dim_, 0.0);
    bool any = false;
    for (const std::string& token : tokenizer_.tokenize(text)) {
        const std::uint64_t hash = fnv1a64(token);
        const std::size_t bucket = hash % dim_;
        result.values[bucket] += (hash >> 63) ? -1.0 : 1.0;
        any = true;
    }
    if (!any) return result;
    double norm_sq = 0.0;
    for (double v : result.values) norm_sq += v * v;
    if (norm_sq == 0.0) return result;  // signs can cancel
    const double norm = std::sqrt(norm_sq);
    for (double& v : result.values) v /= norm;
    return result;
}

FileEmbedding::FileEmbedding(const std::filesystem::path& path, std::size_t dim)
    : dim_(dim), path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + path_);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object() || !record.contains("sha256") ||
            !record.contains("vector"))
            throw Error(Errc::parse, path_ + ":" + std::to_string(lineno) +
                                         ": expected {\"sha256\", \"vector\"}");
        std::vector<double> vec = record["vector"].get<std::vector<double>>();
        if (vec.size() != dim_)
            throw Error(Errc::dimension_mismatch,
                        path_ + ":" + std::to_string(lineno) + ": vector has " +
                            std::to_string(vec.size()) + " dims, expected " + std::to_string(dim_));
        vectors_[record["sha256"].get<std::string>()] = std::move(vec);
    }
}

Embedding FileEmbedding::embed(std::string_view text) const {
    const std::string key = sha256_hex(text);
    auto it = vectors_.find(key);
    if (it == vectors_.end())
        throw Error(Errc::missing_key, "no stored embedding for sha256 " + key.substr(0, 12) +
                                           "… in " + path_);
    return Embedding{it->second};
}

namespace {

// counting semaphore with a runtime limit
class InFlightGate {
public:
    explicit InFlightGate(int limit) : available_(limit > 0 ? limit : 1) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return available_ > 0; });
        --available_;
    }
    void release() {
        {
            std::lock_guard lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

struct GateGuard {
    InFlightGate& gate;
    explicit GateGuard(InFlightGate& g) : gate(g) { gate.acquire(); }
    ~GateGuard() { gate.release(); }
};

json post_json(httplib::Client& client, const std::string& path, const json& body) {
    auto result = client.Post(path, body.dump(), "application/json");
    if (!result)
        throw Error(Errc::transport, "POST " + path + " failed: " + httplib::to_string(result.error()));
    if (result->status != 200)
        throw Error(Errc::transport,
                    "POST " + path + " returned status " + std::to_string(result->status));
    json parsed = json::parse(result->body, nullptr, false);
    if (parsed.is_discarded())
        throw Error(Errc::transport, "POST " + path + " returned malformed JSON");
    return parsed;
}

std::unique_ptr<httplib::Client> make_client(const RemoteOptions& options) {
    if (options.endpoint.empty()) throw Error(Errc::config, "remote endpoint not configured");
    auto client = std::make_unique<httplib::Client>(options.endpoint);
    client->set_connection_timeout(options.timeout_seconds, 0);
    client->set_read_timeout(options.timeout_seconds, 0);
    client->set_write_timeout(options.timeout_seconds, 0);
    if (const char* key = std::getenv("LEXEVAL_API_KEY"))
        client->set_default_headers({{"Authorization", std::string("Bearer ") + key}});
    return client;
}

}  // namespace

struct RemoteEmbedding::Impl {
    RemoteOptions options;
    mutable std::mutex mutex;  // httplib clients are not concurrency-safe
    std::unique_ptr<httplib::Client> client;
    mutable InFlightGate gate;

    explicit Impl(RemoteOptions opts)
        : options(std::move(opts)), client(make_client(options)), gate(options.max_in_flight) {}
};

RemoteEmbedding::RemoteEmbedding(RemoteOptions options, std::size_t dim)
    : impl_(std::make_unique<Impl>(std::move(options))), dim_(dim) {}

RemoteEmbedding::~RemoteEmbedding() = default;

Embedding RemoteEmbedding::embed(std::string_view text) const {
    GateGuard guard(impl_->gate);
    json response;
    {
        std::lock_guard lock(impl_->mutex);
        response = post_json(*impl_->client, impl_->options.path,
                             json{{"texts", json::array({std::string(text)})}});
    }
    if (!response.contains("vectors") || !response["vectors"].is_array() ||
        response["vectors"].empty())
        throw Error(Errc::transport, "embedding response lacks \"vectors\"");
    std::vector<double> vec = response["vectors"][0].get<std::vector<double>>();
    if (vec.size() != dim_)
        throw Error(Errc::dimension_mismatch, "remote embedding has " +
                                                  std::to_string(vec.size()) + " dims, expected " +
                                                  std::to_string(dim_));
    return Embedding{std::move(vec)};
}

LexiconSentiment::LexiconSentiment(Tokenizer tokenizer, std::map<std::string, int> lexicon,
                                   std::size_t token_limit)
    : tokenizer_(std::move(tokenizer)), lexicon_(std::move(lexicon)), token_limit_(token_limit) {}

LexiconSentiment LexiconSentiment::from_file(Tokenizer tokenizer,
                                             const std::filesystem::path& path,
                                             std::size_t token_limit) {
    // one "word<TAB or space>+1|-1" entry per line
    std::map<std::string, int> lexicon;
    for (const std::string& line : load_lines(path)) {
        const std::size_t sep = line.find_last_of(" \t");
        if (sep == std::string::npos)
            throw Error(Errc::parse, path.string() + ": expected \"word polarity\" in: " + line);
        const std::string word = utf8::lower(line.substr(0, line.find_first_of(" \t")));
        const std::string polarity = line.substr(sep + 1);
        if (polarity != "+1" && polarity != "-1" && polarity != "+" && polarity != "-")
            throw Error(Errc::parse, path.string() + ": polarity must be +1 or -1 in: " + line);
        lexicon[word] = polarity[0] == '+' ? 1 : -1;
    }
    return LexiconSentiment(std::move(tokenizer), std::move(lexicon), token_limit);
}

SentimentScores LexiconSentiment::score(std::string_view sentence) const {
    std::vector<std::string> tokens = tokenizer_.tokenize(sentence);
    if (tokens.size() > token_limit_) tokens.resize(token_limit_);
    if (tokens.empty()) return {0.0, 0.0, 1.0};
    std::size_t positive = 0, negative = 0;
    for (const std::string& token : tokens) {
        auto it = lexicon_.find(token);
        if (it == lexicon_.end()) continue;
        (it->second > 0 ? positive : negative) += 1;
    }
    const double total = static_cast<double>(tokens.size());
    SentimentScores scores;
    scores.positive = positive / total;
    scores.negative = negative / total;
    scores.neutral = (total - positive - negative) / total;
    return scores;
}

std::string_view to_string(NerCategory category) {
    switch (category) {
        case NerCategory::org: return "ORG";
        case NerCategory::per: return "PER";
        case NerCategory::loc: return "LOC";
    }
    return "ORG";
}

namespace {

struct Word {
    std::size_t begin = 0;  // byte offsets into the original text
    std::size_t end = 0;
    bool capitalized = false;
    std::string lowered;
};

std::vector<Word> scan_words(std::string_view text) {
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t start = i;
        const char32_t cp = utf8::decode(text, i);
        if (!utf8::is_letter(cp)) continue;
        Word word;
        word.begin = start;
        word.capitalized = utf8::is_upper(cp);
        std::string lowered_word;
        utf8::append(utf8::to_lower(cp), lowered_word);
        std::size_t end = i;
        while (i < text.size()) {
            const std::size_t next = i;
            const char32_t cp2 = utf8::decode(text, i);
            if (!utf8::is_letter(cp2)) {
                i = next;
                break;
            }
            utf8::append(utf8::to_lower(cp2), lowered_word);
            end = i;
        }
        word.end = end;
        word.lowered = std::move(lowered_word);
        words.push_back(std::move(word));
    }
    return words;
}

bool space_adjacent(std::string_view text, const Word& left, const Word& right) {
    for (std::size_t k = left.end; k < right.begin; ++k) {
        if (text[k] != ' ' && text[k] != '\t') return false;
    }
    return true;
}

const std::set<std::string>& genitive_connectives() {
    static const std::set<std::string> connectives = {
        "города", "республики", "области", "края", "округа", "района", "имени", "по", "г",
    };
    return connectives;
}

std::vector<std::string> phrase_words(std::string_view phrase) {
    std::vector<std::string> out;
    for (Word& w : scan_words(phrase)) out.push_back(std::move(w.lowered));
    return out;
}

}  // namespace

HeuristicNer::HeuristicNer(std::vector<std::string> gazetteer_phrases) {
    for (std::string& phrase : gazetteer_phrases) phrases_.push_back(utf8::lower(phrase));
    std::sort(phrases_.begin(), phrases_.end(), [](const std::string& a, const std::string& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
}

HeuristicNer HeuristicNer::from_file(const std::filesystem::path& path) {
    return HeuristicNer(load_lines(path));
}

std::set<NerEntity> HeuristicNer::entities(std::string_view text) const {
    std::set<NerEntity> found;
    const std::vector<Word> words = scan_words(text);
    std::vector<bool> taken(words.size(), false);

    // court-name gazetteer: longest phrases first, extended rightward
    for (const std::string& phrase : phrases_) {
        const std::vector<std::string> pattern = phrase_words(phrase);
        if (pattern.empty()) continue;
        for (std::size_t i = 0; i + pattern.size() <= words.size(); ++i) {
            bool matches = true;
            for (std::size_t k = 0; k < pattern.size() && matches; ++k) {
                if (words[i + k].lowered != pattern[k]) matches = false;
                if (matches && k > 0 && !space_adjacent(text, words[i + k - 1], words[i + k]))
                    matches = false;
            }
            if (!matches) continue;
            std::size_t last = i + pattern.size() - 1;
            std::size_t extra = 0;
            while (last + 1 < words.size() && extra < 4 &&
                   space_adjacent(text, words[last], words[last + 1]) &&
                   (words[last + 1].capitalized ||
                    genitive_connectives().contains(words[last + 1].lowered))) {
                ++last;
                ++extra;
            }
            found.insert(NerEntity{
                std::string(text.substr(words[i].begin, words[last].end - words[i].begin)),
                NerCategory::org});
            for (std::size_t k = i; k <= last; ++k) taken[k] = true;
        }
    }

    // multiword capitalized spans not claimed by the gazetteer
    std::size_t i = 0;
    while (i < words.size()) {
        if (taken[i] || !words[i].capitalized) {
            ++i;
            continue;
        }
        std::size_t last = i;
        while (last + 1 < words.size() && !taken[last + 1] && words[last + 1].capitalized &&
               space_adjacent(text, words[last], words[last + 1]))
            ++last;
        if (last > i) {
            found.insert(NerEntity{
                std::string(text.substr(words[i].begin, words[last].end - words[i].begin)),
                NerCategory::per});
        }
        i = last + 1;
    }
    return found;
}

struct HttpChatClient::Impl {
    RemoteOptions options;
    mutable std::mutex mutex;
    std::unique_ptr<httplib::Client> client;
    mutable InFlightGate gate;

    explicit Impl(RemoteOptions opts)
        : options(std::move(opts)), client(make_client(options)), gate(options.max_in_flight) {}
};

HttpChatClient::HttpChatClient(RemoteOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(const ChatRequest& request) const {
    json messages = json::array();
    for (const ChatMessage& message : request.messages)
        messages.push_back({{"role", message.role}, {"content", message.content}});
    GateGuard guard(impl_->gate);
    json response;
    {
        std::lock_guard lock(impl_->mutex);
        response = post_json(*impl_->client, impl_->options.path,
                             json{{"model", request.model}, {"messages", messages}});
    }
    if (!response.contains("content") || !response["content"].is_string())
        throw Error(Errc::transport, "chat response lacks string \"content\"");
    return response["content"].get<std::string>();
}

JudgeOptions load_judge_options(const std::filesystem::path& prompt_path, std::string model,
                                int max_attempts) {
    std::ifstream in(prompt_path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + prompt_path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.find("{{source_text}}") == std::string::npos ||
        text.find("{{blocks}}") == std::string::npos)
        throw Error(Errc::config, prompt_path.string() +
                                      " must contain {{source_text}} and {{blocks}} placeholders");
    JudgeOptions options;
    options.model = std::move(model);
    options.prompt_template = std::move(text);
    options.max_attempts = max_attempts;
    return options;
}

namespace {

std::string substitute(std::string text, std::string_view placeholder, std::string_view value) {
    const std::size_t at = text.find(placeholder);
    if (at != std::string::npos) text.replace(at, placeholder.size(), value);
    return text;
}

std::string strip_code_fence(std::string_view raw) {
    std::size_t begin = raw.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return std::string(raw);
    if (raw.substr(begin, 3) == "```") {
        const std::size_t line_end = raw.find('\n', begin);
        const std::size_t fence_end = raw.rfind("```");
        if (line_end != std::string::npos && fence_end > line_end)
            return std::string(raw.substr(line_end + 1, fence_end - line_end - 1));
    }
    return std::string(raw);
}

std::map<BlockKind, LlmBlockJudgment> parse_judgments(const std::string& raw) {
    json parsed = json::parse(strip_code_fence(raw), nullptr, false);
    if (parsed.is_discarded()) throw Error(Errc::parse, "reply is not valid JSON");
    if (!parsed.is_object()) throw Error(Errc::parse, "reply is not a JSON object");

    std::map<BlockKind, LlmBlockJudgment> judgments;
    for (const auto& [key, value] : parsed.items()) {
        const auto kind = block_from_string(key);
        if (!kind) throw Error(Errc::parse, "unknown block key \"" + key + "\"");
        if (judgments.contains(*kind)) throw Error(Errc::parse, "block \"" + key + "\" repeated");
        if (!value.is_object() || !value.contains("score") || !value.contains("reason"))
            throw Error(Errc::parse, "block \"" + key + "\" must be {\"score\", \"reason\"}");
        if (!value["score"].is_number_integer())
            throw Error(Errc::parse, "block \"" + key + "\" score is not an integer");
        const auto score = value["score"].get<std::int64_t>();
        if (score < 1 || score > 5)
            throw Error(Errc::parse,
                        "block \"" + key + "\" score " + std::to_string(score) + " outside 1..5");
        if (!value["reason"].is_string() || value["reason"].get<std::string>().empty())
            throw Error(Errc::parse, "block \"" + key + "\" reason must be a non-empty string");
        judgments[*kind] =
            LlmBlockJudgment{*kind, static_cast<int>(score), value["reason"].get<std::string>()};
    }
    for (BlockKind kind : kAllBlocks) {
        if (!judgments.contains(kind))
            throw Error(Errc::parse, "missing block \"" + std::string(to_string(kind)) + "\"");
    }
    return judgments;
}

}  // namespace

std::map<BlockKind, LlmBlockJudgment> judge_blocks(const Document& doc, const ChatClient& client,
                                                   const JudgeOptions& options) {
    json blocks = json::object();
    for (BlockKind kind : kAllBlocks) blocks[std::string(to_string(kind))] = doc.block(kind);

    std::string prompt = substitute(options.prompt_template, "{{source_text}}", doc.source_text);
    prompt = substitute(std::move(prompt), "{{blocks}}", blocks.dump(2));

    std::string last_response;
    std::string last_error;
    for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        ChatRequest request;
        request.model = options.model;
        std::string content = prompt;
        if (attempt > 1) {
            content += "\n\nYour previous reply was invalid: " + last_error +
                       "\nReply with only the JSON object.";
        }
        request.messages.push_back({"user", std::move(content)});
        last_response = client.complete(request);
        try {
            return parse_judgments(last_response);
        } catch (const Error& e) {
            if (e.code() != Errc::parse) throw;
            last_error = e.what();
        }
    }
    throw Error(Errc::exhausted_retries,
                "judge gave no valid reply in " + std::to_string(options.max_attempts) +
                    " attempts; last response: " + last_response);
}

}  // namespace lexeval
