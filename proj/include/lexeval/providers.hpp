#pragma once

#include <compare>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexeval/corpus.hpp"
#include "lexeval/textproc.hpp"

namespace lexeval {

struct Embedding {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
};

// dot(a,b) / sqrt(|a|^2 * |b|^2); 0.0 when either norm is zero. Computed so
// that bitwise-equal inputs yield exactly 1.0.
double cosine(const Embedding& a, const Embedding& b);

struct EmbeddingProvider {
    virtual ~EmbeddingProvider() = default;
    virtual Embedding embed(std::string_view text) const = 0;
    virtual std::size_t dim() const = 0;
};

// Deterministic feature-hashing bag of words: each normalized token is hashed
// into one of `dim` buckets with a hash-derived sign, then the vector is
// L2-normalized. Tokenless input embeds to the zero vector.
class HashEmbedding final : public EmbeddingProvider {
public:
    explicit HashEmbedding(Tokenizer tokenizer, std::size_t dim = 256);

    Embedding embed(std::string_view text) const override;
    std::size_t dim() const override { return dim_; }

private:
    Tokenizer tokenizer_;
    std::size_t dim_;
};

// JSON-lines store mapping hex SHA-256 of the exact text to its vector.
class FileEmbedding final : public EmbeddingProvider {
public:
    FileEmbedding(const std::filesystem::path& path, std::size_t dim);

    Embedding embed(std::string_view text) const override;
    std::size_t dim() const override { return dim_; }

private:
    std::unordered_map<std::string, std::vector<double>> vectors_;
    std::size_t dim_;
    std::string path_;
};

struct RemoteOptions {
    std::string endpoint;          // e.g. http://host:port
    std::string path = "/embed";
    int timeout_seconds = 60;
    int max_in_flight = 4;
};

class RemoteEmbedding final : public EmbeddingProvider {
public:
    RemoteEmbedding(RemoteOptions options, std::size_t dim);
    ~RemoteEmbedding() override;

    Embedding embed(std::string_view text) const override;
    std::size_t dim() const override { return dim_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t dim_;
};

struct SentimentScores {
    double positive = 0.0;
    double negative = 0.0;
    double neutral = 1.0;
};

struct SentimentProvider {
    virtual ~SentimentProvider() = default;
    virtual SentimentScores score(std::string_view sentence) const = 0;
};

struct NeutralSentiment final : SentimentProvider {
    SentimentScores score(std::string_view) const override { return {0.0, 0.0, 1.0}; }
};

// Signed word counts over the first `token_limit` tokens: positive and
// negative mass are the polar-token fractions, the rest is neutral.
class LexiconSentiment final : public SentimentProvider {
public:
    LexiconSentiment(Tokenizer tokenizer, std::map<std::string, int> lexicon,
                     std::size_t token_limit = 512);
    static LexiconSentiment from_file(Tokenizer tokenizer, const std::filesystem::path& path,
                                      std::size_t token_limit = 512);

    SentimentScores score(std::string_view sentence) const override;

private:
    Tokenizer tokenizer_;
    std::map<std::string, int> lexicon_;  // word -> +1 / -1
    std::size_t token_limit_;
};

enum class NerCategory { org, per, loc };

std::string_view to_string(NerCategory category);

struct NerEntity {
    std::string surface;
    NerCategory category = NerCategory::org;

    auto operator<=>(const NerEntity&) const = default;
};

struct NerProvider {
    virtual ~NerProvider() = default;
    virtual std::set<NerEntity> entities(std::string_view text) const = 0;
};

// Capitalization heuristic plus a court-name gazetteer. Gazetteer phrases are
// matched case-insensitively and extended rightward over capitalized words and
// genitive connectives; runs of two or more capitalized words become PER.
class HeuristicNer final : public NerProvider {
public:
    explicit HeuristicNer(std::vector<std::string> gazetteer_phrases = {});
    static HeuristicNer from_file(const std::filesystem::path& path);

    std::set<NerEntity> entities(std::string_view text) const override;

private:
    std::vector<std::string> phrases_;  // lowercase, longest first
};

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
};

struct ChatClient {
    virtual ~ChatClient() = default;
    virtual std::string complete(const ChatRequest& request) const = 0;
};

// Wraps a function; used for scripted judges in tests and local experiments.
class CallbackChatClient final : public ChatClient {
public:
    using Handler = std::function<std::string(const ChatRequest&)>;
    explicit CallbackChatClient(Handler handler) : handler_(std::move(handler)) {}

    std::string complete(const ChatRequest& request) const override { return handler_(request); }

private:
    Handler handler_;
};

// POST {"model", "messages": [{"role","content"}]} -> {"content": str}.
// Reads the API key from the LEXEVAL_API_KEY environment variable.
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(RemoteOptions options);
    ~HttpChatClient() override;

    std::string complete(const ChatRequest& request) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct LlmBlockJudgment {
    BlockKind block = BlockKind::plaintiff_claims;
    int score = 1;  // 1..5
    std::string reason;
};

struct JudgeOptions {
    std::string model = "judge";
    std::string prompt_template;  // must contain {{source_text}} and {{blocks}}
    int max_attempts = 3;
};

JudgeOptions load_judge_options(const std::filesystem::path& prompt_path, std::string model,
                                int max_attempts = 3);

// Sends one structured prompt for all seven blocks and parses the reply as a
// JSON object keyed by block name. Invalid replies are retried with the parse
// error appended to the prompt, up to max_attempts in total.
std::map<BlockKind, LlmBlockJudgment> judge_blocks(const Document& doc, const ChatClient& client,
                                                   const JudgeOptions& options);

}  // namespace lexeval
