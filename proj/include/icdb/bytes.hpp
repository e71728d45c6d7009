#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icdb {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Standard alphabet with '=' padding.
std::string base64_encode(ByteView data);

// Strict decoder: rejects whitespace, bad characters, and wrong padding.
// Throws icdb::StructuralError.
Bytes base64_decode(std::string_view text);

inline std::size_t base64_length(std::size_t raw) { return (raw + 2) / 3 * 4; }

std::string hex_encode(ByteView data);

}  // namespace icdb
