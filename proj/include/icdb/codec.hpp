#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "icdb/bytes.hpp"
#include "icdb/crypto_schemes.hpp"

namespace icdb {

class Icrl;

// A text cell; std::nullopt is SQL NULL, distinct from the empty string.
using Cell = std::optional<std::string>;

struct IntegrityCode {
  Bytes code;
  std::uint64_t serial = 0;  // 0 is reserved for "absent"
  SchemeId scheme = SchemeId::RsaSign;
};

struct FieldCoordinates {
  std::string table_name;
  std::string attribute_name;
  std::vector<std::string> entity_key;
};

struct TupleImage {
  std::string table_name;
  std::vector<std::pair<std::string, Cell>> values;  // schema column order
};

enum class Status { Valid, Forged, Stale, Structural };

std::string_view status_name(Status s);

struct Verdict {
  Status status = Status::Valid;
  std::string detail;

  bool operator==(const Verdict&) const = default;
};

struct TupleVerdict {
  Verdict verdict;
  // Attribute names whose recovered value differs from the presented one.
  // Present only for AES_CIPHER codes that failed to match.
  std::optional<std::vector<std::string>> diffs;
};

struct CodecOptions {
  // Include the table name in field and tuple messages. Off by default, so a
  // value/code pair copied to another table with identical attribute and key
  // verifies there too.
  bool bind_table = false;
};

namespace wire {
inline constexpr char kUnit = '\x1F';    // separates message parts
inline constexpr char kRecord = '\x1E';  // separates entity-key parts
inline constexpr char kEscape = '\x10';
inline constexpr char kNull = '\x00';    // a NULL value, unescaped
}  // namespace wire

// Prefixes delimiter, escape and NUL bytes with the escape byte.
std::string escape_value(std::string_view value);
// Inverse of escape_value. Throws StructuralError on a dangling escape.
std::string unescape_value(std::string_view escaped);

Bytes canonical_field_message(const FieldCoordinates& coords, const Cell& value,
                              std::uint64_t serial, const CodecOptions& options = {});

Bytes canonical_tuple_message(const TupleImage& tuple, std::uint64_t serial,
                              const CodecOptions& options = {});

// Splits a decrypted tuple message back into values and serial. Throws
// StructuralError when the bytes are not a tuple message with `arity` values.
std::pair<std::vector<Cell>, std::uint64_t> parse_tuple_message(ByteView message,
                                                                std::size_t arity,
                                                                const CodecOptions& options = {},
                                                                std::string_view table = {});

IntegrityCode generate_field_code(const KeyMaterial& key, const FieldCoordinates& coords,
                                  const Cell& value, std::uint64_t serial,
                                  const CodecOptions& options = {},
                                  std::optional<ByteView> salt = {});

Verdict verify_field_code(const KeyMaterial& key, const FieldCoordinates& coords,
                          const Cell& value, const IntegrityCode& ic, const Icrl& icrl,
                          const CodecOptions& options = {});

IntegrityCode generate_tuple_code(const KeyMaterial& key, const TupleImage& tuple,
                                  std::uint64_t serial, const CodecOptions& options = {},
                                  std::optional<ByteView> salt = {});

TupleVerdict verify_tuple_code(const KeyMaterial& key, const TupleImage& tuple,
                               const IntegrityCode& ic, const Icrl& icrl,
                               const CodecOptions& options = {});

}  // namespace icdb
