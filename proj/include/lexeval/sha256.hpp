#pragma once

#include <string>
#include <string_view>

namespace lexeval {

// Lowercase hex SHA-256 digest of the exact byte sequence.
std::string sha256_hex(std::string_view data);

}  // namespace lexeval
