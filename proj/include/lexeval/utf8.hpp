#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexeval::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes the codepoint starting at byte offset `i` and advances `i` past it.
// Malformed sequences decode as U+FFFD and advance one byte.
char32_t decode(std::string_view text, std::size_t& i);

void append(char32_t cp, std::string& out);

std::vector<char32_t> codepoints(std::string_view text);

std::string encode(const std::vector<char32_t>& cps);

// Letter coverage: ASCII, Latin-1 supplement, Latin Extended-A/B, Greek,
// Cyrillic and Cyrillic Supplement. Sufficient for Russian/Latin legal text.
bool is_letter(char32_t cp);

bool is_ascii_digit(char32_t cp);

char32_t to_lower(char32_t cp);

inline bool is_upper(char32_t cp) { return is_letter(cp) && to_lower(cp) != cp; }

// Lowercases the whole string codepoint by codepoint.
std::string lower(std::string_view text);

// Number of codepoints in a valid UTF-8 string.
std::size_t length(std::string_view text);

}  // namespace lexeval::utf8
