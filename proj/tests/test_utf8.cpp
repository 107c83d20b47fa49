#include <doctest.h>

#include "lexeval/utf8.hpp"

using namespace lexeval;

TEST_CASE("utf8 decode and encode round-trip") {
    const std::string text = "Суд решил: иск удовлетворён! Court ruled, €“…”";
    const auto cps = utf8::codepoints(text);
    CHECK(utf8::encode(cps) == text);
    CHECK(utf8::length(text) == cps.size());
}

TEST_CASE("utf8 lowercasing covers Cyrillic and Latin") {
    CHECK(utf8::lower("СУД") == "суд");
    CHECK(utf8::lower("Ёлка") == "ёлка");
    CHECK(utf8::lower("ABC xyz") == "abc xyz");
    CHECK(utf8::lower("ÀÉÎÕÜ") == "àéîõü");
    CHECK(utf8::lower("ΔΣ") == "δσ");
    CHECK(utf8::lower("уже нижний") == "уже нижний");
}

TEST_CASE("utf8 letter classification") {
    CHECK(utf8::is_letter(U'ж'));
    CHECK(utf8::is_letter(U'Ж'));
    CHECK(utf8::is_letter(U'q'));
    CHECK(utf8::is_letter(U'é'));
    CHECK(!utf8::is_letter(U'7'));
    CHECK(!utf8::is_letter(U'.'));
    CHECK(!utf8::is_letter(U'№'));
    CHECK(!utf8::is_letter(U' '));
}

TEST_CASE("utf8 uppercase detection") {
    CHECK(utf8::is_upper(U'Д'));
    CHECK(utf8::is_upper(U'Ё'));
    CHECK(utf8::is_upper(U'A'));
    CHECK(!utf8::is_upper(U'д'));
    CHECK(!utf8::is_upper(U'a'));
    CHECK(!utf8::is_upper(U'5'));
}

TEST_CASE("utf8 malformed input degrades to replacement characters") {
    const std::string bad = "ab\xC3";          // truncated 2-byte sequence
    const std::string bad2 = "\xFF\xFEok";     // invalid lead bytes
    CHECK(utf8::length(bad) == 3);
    CHECK(utf8::length(bad2) == 4);
    CHECK(utf8::lower(bad2).substr(6) == "ok");  // two replacement chars, then text
}
