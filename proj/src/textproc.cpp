#include "lexeval/textproc.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "lexeval/error.hpp"
#include "lexeval/providers.hpp"
#include "lexeval/utf8.hpp"

namespace lexeval {

namespace {

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string trim(std::string_view text) {
    std::size_t begin = 0, end = text.size();
    while (begin < end && is_ascii_space(text[begin])) ++begin;
    while (end > begin && is_ascii_space(text[end - 1])) --end;
    return std::string(text.substr(begin, end - begin));
}

struct Suffix {
    std::size_t length;  // in codepoints
    std::u32string text;
};

const std::vector<Suffix>& stem_suffixes() {
    static const std::vector<Suffix> suffixes = [] {
        const char32_t* three[] = {U"ами", U"ями", U"ого", U"его", U"ому", U"ему", U"ыми",
                                   U"ими", U"ать", U"ять", U"еть", U"ить", U"ала", U"яла",
                                   U"ила", U"ыла", U"ing"};
        const char32_t* two[] = {U"ах", U"ях", U"ов", U"ев", U"ам", U"ям", U"ом", U"ем",
                                 U"ой", U"ей", U"ый", U"ий", U"ая", U"яя", U"ую", U"юю",
                                 U"ие", U"ые", U"ия", U"ет", U"ит", U"ла", U"ли", U"ть",
                                 U"ed", U"es", U"ly"};
        const char32_t* one[] = {U"а", U"я", U"о", U"е", U"у", U"ю", U"ы", U"и", U"й", U"ь", U"s"};
        std::vector<Suffix> list;
        for (auto* s : three) list.push_back({3, s});
        for (auto* s : two) list.push_back({2, s});
        for (auto* s : one) list.push_back({1, s});
        return list;
    }();
    return suffixes;
}

}  // namespace

std::string LightStemmer::apply(std::string_view token) const {
    std::vector<char32_t> cps = utf8::codepoints(token);
    if (cps.size() < 4) return std::string(token);
    for (const Suffix& suffix : stem_suffixes()) {
        if (cps.size() < suffix.length + 3) continue;  // keep a stem of >= 3 codepoints
        if (std::equal(suffix.text.begin(), suffix.text.end(),
                       cps.end() - static_cast<std::ptrdiff_t>(suffix.length))) {
            cps.resize(cps.size() - suffix.length);
            return utf8::encode(cps);
        }
    }
    return std::string(token);
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    StopwordSet set;
    for (const std::string& line : load_lines(path)) set.insert(utf8::lower(line));
    return set;
}

std::vector<std::string> load_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        std::string entry = trim(line);
        if (entry.empty() || entry.front() == '#') continue;
        lines.push_back(std::move(entry));
    }
    return lines;
}

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
    const std::string lowered = utf8::lower(text);
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        if (!stopwords.contains(current)) {
            std::string normal = normalizer ? normalizer->apply(current) : current;
            if (!normal.empty() && !stopwords.contains(normal)) out.push_back(std::move(normal));
        }
        current.clear();
    };
    std::size_t i = 0;
    while (i < lowered.size()) {
        const std::size_t start = i;
        const char32_t cp = utf8::decode(lowered, i);
        if (utf8::is_letter(cp)) {
            current.append(lowered, start, i - start);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords,
                                  const Normalizer& normalizer) {
    Tokenizer tokenizer;
    tokenizer.stopwords = stopwords;
    tokenizer.normalizer = std::shared_ptr<const Normalizer>(&normalizer, [](const Normalizer*) {});
    return tokenizer.tokenize(text);
}

KeyTermSet key_terms(std::string_view text, std::size_t n, const Tokenizer& tokenizer) {
    std::map<std::string, std::size_t> frequency;
    for (std::string& token : tokenizer.tokenize(text)) ++frequency[std::move(token)];

    std::vector<std::pair<std::string_view, std::size_t>> ranked;
    ranked.reserve(frequency.size());
    for (const auto& [term, count] : frequency) ranked.emplace_back(term, count);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    KeyTermSet result;
    result.n = n;
    const std::size_t take = std::min(n, ranked.size());
    for (std::size_t i = 0; i < take; ++i) result.terms.emplace(ranked[i].first);
    return result;
}

SentenceSplitter::SentenceSplitter(std::vector<std::string> abbreviations) {
    for (std::string& entry : abbreviations) abbreviations_.insert(utf8::lower(entry));
}

SentenceSplitter SentenceSplitter::from_file(const std::filesystem::path& path) {
    return SentenceSplitter(load_lines(path));
}

std::vector<std::string> SentenceSplitter::split(std::string_view text) const {
    // decode once, keeping byte offsets so sentences are exact substrings
    std::vector<char32_t> cps;
    std::vector<std::size_t> offsets;
    std::size_t i = 0;
    while (i < text.size()) {
        offsets.push_back(i);
        cps.push_back(utf8::decode(text, i));
    }
    offsets.push_back(text.size());

    const auto is_final_punct = [](char32_t cp) {
        return cp == U'.' || cp == U'!' || cp == U'?' || cp == 0x2026;
    };
    const auto is_space_cp = [](char32_t cp) {
        return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' ||
               cp == U'\f';
    };

    std::vector<std::string> sentences;
    std::size_t sentence_start = 0;  // codepoint index
    std::size_t k = 0;
    while (k < cps.size()) {
        if (!is_final_punct(cps[k])) {
            ++k;
            continue;
        }
        std::size_t run_end = k;
        while (run_end + 1 < cps.size() && is_final_punct(cps[run_end + 1])) ++run_end;

        bool boundary = false;
        std::size_t next = run_end + 1;
        if (next < cps.size() && is_space_cp(cps[next])) {
            while (next < cps.size() && is_space_cp(cps[next])) ++next;
            if (next < cps.size() &&
                (utf8::is_upper(cps[next]) || utf8::is_ascii_digit(cps[next])))
                boundary = true;
        }

        if (boundary && run_end == k && cps[k] == U'.') {
            // single dot: suppress the boundary after a known abbreviation
            std::size_t word_begin = k;
            while (word_begin > sentence_start && utf8::is_letter(cps[word_begin - 1]))
                --word_begin;
            if (word_begin < k) {
                std::string candidate(text.substr(offsets[word_begin],
                                                  offsets[k + 1] - offsets[word_begin]));
                if (abbreviations_.contains(utf8::lower(candidate))) boundary = false;
            }
        }

        if (boundary) {
            std::string sentence = trim(text.substr(
                offsets[sentence_start], offsets[run_end + 1] - offsets[sentence_start]));
            if (!sentence.empty()) sentences.push_back(std::move(sentence));
            sentence_start = next;
            k = next;
        } else {
            k = run_end + 1;
        }
    }
    if (sentence_start < cps.size()) {
        std::string tail =
            trim(text.substr(offsets[sentence_start], text.size() - offsets[sentence_start]));
        if (!tail.empty()) sentences.push_back(std::move(tail));
    }
    return sentences;
}

LegalPatterns::LegalPatterns(const std::vector<std::string>& patterns) {
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        try {
            regexes_.emplace_back(patterns[i], std::regex::ECMAScript | std::regex::optimize);
        } catch (const std::regex_error& e) {
            throw Error(Errc::config,
                        "invalid legal pattern #" + std::to_string(i + 1) + ": " + e.what());
        }
    }
}

LegalPatterns LegalPatterns::from_file(const std::filesystem::path& path) {
    return LegalPatterns(load_lines(path));
}

std::vector<std::string> LegalPatterns::matches(std::string_view lowered_text) const {
    std::vector<std::string> found;
    const std::string haystack(lowered_text);
    for (const std::regex& pattern : regexes_) {
        for (auto it = std::sregex_iterator(haystack.begin(), haystack.end(), pattern);
             it != std::sregex_iterator(); ++it) {
            found.push_back(it->str());
        }
    }
    return found;
}

CitationSet extract_citations(std::string_view text, const NerProvider& ner,
                              const LegalPatterns& patterns, const Tokenizer& tokenizer) {
    CitationSet set;
    for (const NerEntity& entity : ner.entities(text)) set.items.insert(utf8::lower(entity.surface));
    const std::string lowered = utf8::lower(text);
    for (std::string& match : patterns.matches(lowered)) set.items.insert(std::move(match));
    for (const std::string& term : key_terms(text, 20, tokenizer).terms) set.items.insert(term);
    return set;
}

namespace {

bool leap_year(int year) { return year % 4 == 0 && (year % 100 != 0 || year % 400 == 0); }

bool valid_date(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1) return false;
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int limit = days[month - 1];
    if (month == 2 && leap_year(year)) limit = 29;
    return day <= limit;
}

std::string iso_date(int year, int month, int day) {
    char buffer[24];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02d", year, month, day);
    return buffer;
}

int month_number(std::string_view name) {
    static const std::map<std::string_view, int> months = {
        {"января", 1},  {"февраля", 2}, {"марта", 3},    {"апреля", 4},
        {"мая", 5},     {"июня", 6},    {"июля", 7},     {"августа", 8},
        {"сентября", 9}, {"октября", 10}, {"ноября", 11}, {"декабря", 12},
        {"январь", 1},  {"февраль", 2}, {"март", 3},     {"апрель", 4},
        {"май", 5},     {"июнь", 6},    {"июль", 7},     {"август", 8},
        {"сентябрь", 9}, {"октябрь", 10}, {"ноябрь", 11}, {"декабрь", 12},
    };
    auto it = months.find(name);
    return it == months.end() ? 0 : it->second;
}

}  // namespace

std::vector<std::string> extract_dates(std::string_view text) {
    const std::string lowered = utf8::lower(text);

    static const std::regex dotted(R"((?:^|[^0-9.])(\d{2})\.(\d{2})\.(\d{4})(?![0-9]))",
                                   std::regex::ECMAScript | std::regex::optimize);
    static const std::regex iso(R"((?:^|[^0-9-])(\d{4})-(\d{2})-(\d{2})(?![0-9]))",
                                std::regex::ECMAScript | std::regex::optimize);
    // full-word alternations only: byte-level character classes cannot hold
    // multibyte Cyrillic
    static const std::regex verbal(
        "(?:^|[^0-9])(\\d{1,2})\\s+"
        "(января|февраля|марта|апреля|мая|июня|июля|августа|сентября|октября|ноября|декабря|"
        "январь|февраль|март|апрель|май|июнь|июль|август|сентябрь|октябрь|ноябрь|декабрь)"
        "\\s+(\\d{4})",
        std::regex::ECMAScript | std::regex::optimize);

    struct Hit {
        std::size_t position;
        std::string date;
    };
    std::vector<Hit> hits;

    auto scan = [&](const std::regex& pattern, bool month_name, bool day_first) {
        for (auto it = std::sregex_iterator(lowered.begin(), lowered.end(), pattern);
             it != std::sregex_iterator(); ++it) {
            const std::smatch& m = *it;
            int year, month, day;
            if (month_name) {
                day = std::stoi(m[1].str());
                month = month_number(m[2].str());
                year = std::stoi(m[3].str());
            } else if (day_first) {
                day = std::stoi(m[1].str());
                month = std::stoi(m[2].str());
                year = std::stoi(m[3].str());
            } else {
                year = std::stoi(m[1].str());
                month = std::stoi(m[2].str());
                day = std::stoi(m[3].str());
            }
            if (month == 0 || !valid_date(year, month, day)) continue;
            hits.push_back({static_cast<std::size_t>(m.position(1)), iso_date(year, month, day)});
        }
    };
    scan(dotted, false, true);
    scan(iso, false, false);
    scan(verbal, true, false);

    std::stable_sort(hits.begin(), hits.end(),
                     [](const Hit& a, const Hit& b) { return a.position < b.position; });
    std::vector<std::string> dates;
    dates.reserve(hits.size());
    for (Hit& hit : hits) dates.push_back(std::move(hit.date));
    return dates;
}

}  // namespace lexeval
