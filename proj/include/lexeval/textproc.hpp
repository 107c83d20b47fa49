#pragma once

#include <filesystem>
#include <memory>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace lexeval {

struct NerProvider;

// Maps a lowercase token to its normal form (lemma-like). Implementations
// must be deterministic and keep the output lowercase and alphabetic.
struct Normalizer {
    virtual ~Normalizer() = default;
    virtual std::string apply(std::string_view lowercase_token) const = 0;
    virtual std::string_view name() const = 0;
};

struct IdentityNormalizer final : Normalizer {
    std::string apply(std::string_view token) const override { return std::string(token); }
    std::string_view name() const override { return "identity"; }
};

// Light suffix-stripping stemmer for Russian and Latin-script tokens.
// Deliberately conservative: strips one inflectional ending at most.
struct LightStemmer final : Normalizer {
    std::string apply(std::string_view token) const override;
    std::string_view name() const override { return "stem"; }
};

using StopwordSet = std::unordered_set<std::string>;

StopwordSet load_stopwords(const std::filesystem::path& path);

// One entry per line; blank lines and lines starting with '#' are ignored.
std::vector<std::string> load_lines(const std::filesystem::path& path);

struct Tokenizer {
    StopwordSet stopwords;
    std::shared_ptr<const Normalizer> normalizer = std::make_shared<IdentityNormalizer>();

    // Lowercased alphabetic tokens in source order, stopword-filtered and
    // normalizer-mapped. Neither the surface form nor the normal form of an
    // emitted token is a stopword.
    std::vector<std::string> tokenize(std::string_view text) const;
};

std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords,
                                  const Normalizer& normalizer);

struct KeyTermSet {
    std::set<std::string> terms;
    std::size_t n = 0;
};

// Top-n tokens of a single text ranked by (frequency desc, term asc). With a
// one-text corpus the IDF factor is constant, so ranking reduces to frequency.
KeyTermSet key_terms(std::string_view text, std::size_t n, const Tokenizer& tokenizer);

class SentenceSplitter {
public:
    SentenceSplitter() = default;
    explicit SentenceSplitter(std::vector<std::string> abbreviations);
    static SentenceSplitter from_file(const std::filesystem::path& path);

    // Splits on sentence-final punctuation followed by whitespace and an
    // uppercase letter or digit. Abbreviations such as "ст." do not split.
    std::vector<std::string> split(std::string_view text) const;

private:
    std::unordered_set<std::string> abbreviations_;
};

class LegalPatterns {
public:
    LegalPatterns() = default;
    explicit LegalPatterns(const std::vector<std::string>& patterns);
    static LegalPatterns from_file(const std::filesystem::path& path);

    // Matches against lowercased text; patterns are written in lowercase.
    std::vector<std::string> matches(std::string_view lowered_text) const;

    std::size_t size() const { return regexes_.size(); }

private:
    std::vector<std::regex> regexes_;
};

struct CitationSet {
    std::set<std::string> items;  // case-normalized surfaces
};

// Union of NER entity surfaces, legal-pattern matches and the text's top-20
// key terms, all lowercased.
CitationSet extract_citations(std::string_view text, const NerProvider& ner,
                              const LegalPatterns& patterns, const Tokenizer& tokenizer);

// ISO YYYY-MM-DD strings in order of first appearance; duplicates kept,
// impossible calendar dates skipped.
std::vector<std::string> extract_dates(std::string_view text);

}  // namespace lexeval
