#pragma once

#include <string>
#include <string_view>

namespace dirlab {

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace dirlab
