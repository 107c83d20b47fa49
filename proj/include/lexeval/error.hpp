#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexeval {

enum class Errc {
    parse,
    schema,
    duplicate_id,
    range,
    unknown_block,
    duplicate_rating,
    missing_ratings,
    dimension_mismatch,
    provider,
    transport,
    missing_key,
    exhausted_retries,
    insufficient_data,
    config,
    io,
};

constexpr std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::parse: return "parse error";
        case Errc::schema: return "schema error";
        case Errc::duplicate_id: return "duplicate id";
        case Errc::range: return "range error";
        case Errc::unknown_block: return "unknown block";
        case Errc::duplicate_rating: return "duplicate rating";
        case Errc::missing_ratings: return "missing ratings";
        case Errc::dimension_mismatch: return "dimension mismatch";
        case Errc::provider: return "provider error";
        case Errc::transport: return "transport error";
        case Errc::missing_key: return "missing key";
        case Errc::exhausted_retries: return "exhausted retries";
        case Errc::insufficient_data: return "insufficient data";
        case Errc::config: return "config error";
        case Errc::io: return "io error";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace lexeval
