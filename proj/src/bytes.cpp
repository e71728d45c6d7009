#include "icdb/bytes.hpp"

#include <openssl/evp.h>

#include "icdb/error.hpp"

namespace icdb {

std::string base64_encode(ByteView data) {
  std::string out(base64_length(data.size()), '\0');
  if (data.empty()) return out;
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                data.data(), static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

namespace {

bool is_b64_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '+' || c == '/';
}

}  // namespace

Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw StructuralError("base64: length not a multiple of 4");
  if (text.empty()) return {};
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  for (std::size_t i = 0; i < text.size() - pad; ++i) {
    if (!is_b64_char(text[i])) throw StructuralError("base64: invalid character");
  }
  Bytes out(text.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw StructuralError("base64: decode failed");
  out.resize(static_cast<std::size_t>(n) - pad);
  // Non-canonical trailing bits would let two encodings map to one value.
  if (base64_encode(out) != text) throw StructuralError("base64: non-canonical encoding");
  return out;
}

std::string hex_encode(ByteView data) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

}  // namespace icdb
