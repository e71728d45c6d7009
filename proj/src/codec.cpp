#include "icdb/codec.hpp"

#include <charconv>

#include "icdb/error.hpp"
#include "icdb/icrl.hpp"

namespace icdb {

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Valid: return "VALID";
    case Status::Forged: return "FORGED";
    case Status::Stale: return "STALE";
    case Status::Structural: return "STRUCTURAL";
  }
  return "?";
}

namespace {

bool needs_escape(char c) {
  return c == wire::kUnit || c == wire::kRecord || c == wire::kEscape || c == wire::kNull;
}

void append_escaped(std::string& out, std::string_view value) {
  for (char c : value) {
    if (needs_escape(c)) out.push_back(wire::kEscape);
    out.push_back(c);
  }
}

void append_cell(std::string& out, const Cell& value) {
  if (value) {
    append_escaped(out, *value);
  } else {
    out.push_back(wire::kNull);
  }
}

Bytes finish(const std::string& s) { return Bytes(s.begin(), s.end()); }

std::uint64_t parse_serial(std::string_view digits) {
  std::uint64_t v = 0;
  if (digits.empty() || digits[0] == '0') throw StructuralError("tuple message: bad serial");
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw StructuralError("tuple message: bad serial");
  }
  return v;
}

void require_matching_scheme(const KeyMaterial& key, const IntegrityCode& ic) {
  if (ic.scheme != key.scheme()) {
    throw SchemeError("integrity code was produced by " + std::string(scheme_name(ic.scheme)) +
                      " but the key is " + std::string(scheme_name(key.scheme())));
  }
}

// Shared tail of field and tuple verification. Structural and forged
// outcomes take precedence over staleness: a code is only STALE once it is
// known to be genuine.
Verdict judge(const KeyMaterial& key, ByteView message, const IntegrityCode& ic,
              const Icrl& icrl) {
  if (ic.serial == 0) return {Status::Structural, "serial 0 is reserved"};
  bool ok = false;
  try {
    ok = check_code(key, message, ic.code);
  } catch (const StructuralError& e) {
    return {Status::Structural, e.what()};
  }
  if (!ok) return {Status::Forged, "code does not match"};
  if (!icrl.is_valid(ic.serial)) {
    if (ic.serial >= icrl.next_serial()) {
      return {Status::Stale, "serial " + std::to_string(ic.serial) + " was never allocated"};
    }
    return {Status::Stale, "serial " + std::to_string(ic.serial) + " is revoked"};
  }
  return {Status::Valid, {}};
}

}  // namespace

std::string escape_value(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  append_escaped(out, value);
  return out;
}

std::string unescape_value(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] == wire::kEscape) {
      if (++i == escaped.size()) throw StructuralError("dangling escape byte");
    }
    out.push_back(escaped[i]);
  }
  return out;
}

Bytes canonical_field_message(const FieldCoordinates& coords, const Cell& value,
                              std::uint64_t serial, const CodecOptions& options) {
  if (coords.entity_key.empty()) throw DomainError("field coordinates need an entity key");
  if (coords.attribute_name.empty()) throw DomainError("field coordinates need an attribute");
  std::string out;
  out.reserve(32 + coords.attribute_name.size() + (value ? value->size() : 1));
  if (options.bind_table) {
    append_escaped(out, coords.table_name);
    out.push_back(wire::kUnit);
  }
  out += std::to_string(serial);
  out.push_back(wire::kUnit);
  append_escaped(out, coords.attribute_name);
  out.push_back(wire::kUnit);
  append_cell(out, value);
  out.push_back(wire::kUnit);
  for (std::size_t i = 0; i < coords.entity_key.size(); ++i) {
    if (i) out.push_back(wire::kRecord);
    append_escaped(out, coords.entity_key[i]);
  }
  return finish(out);
}

Bytes canonical_tuple_message(const TupleImage& tuple, std::uint64_t serial,
                              const CodecOptions& options) {
  std::string out;
  if (options.bind_table) {
    append_escaped(out, tuple.table_name);
    out.push_back(wire::kUnit);
  }
  for (std::size_t i = 0; i < tuple.values.size(); ++i) {
    if (i) out.push_back(wire::kUnit);
    append_cell(out, tuple.values[i].second);
  }
  out.push_back(wire::kUnit);
  out += std::to_string(serial);
  return finish(out);
}

std::pair<std::vector<Cell>, std::uint64_t> parse_tuple_message(ByteView message,
                                                                std::size_t arity,
                                                                const CodecOptions& options,
                                                                std::string_view table) {
  // Split on unescaped unit separators, remembering each part's raw form so
  // an unescaped lone NUL can be told apart from an escaped one.
  std::vector<std::string> raw_parts(1);
  for (std::size_t i = 0; i < message.size(); ++i) {
    const char c = static_cast<char>(message[i]);
    if (c == wire::kEscape) {
      if (i + 1 == message.size()) throw StructuralError("tuple message: dangling escape");
      raw_parts.back().push_back(c);
      raw_parts.back().push_back(static_cast<char>(message[++i]));
    } else if (c == wire::kUnit) {
      raw_parts.emplace_back();
    } else {
      raw_parts.back().push_back(c);
    }
  }
  const std::size_t expected = arity + 1 + (options.bind_table ? 1 : 0);
  if (raw_parts.size() != expected) {
    throw StructuralError("tuple message has " + std::to_string(raw_parts.size()) +
                          " parts, expected " + std::to_string(expected));
  }
  std::size_t first = 0;
  if (options.bind_table) {
    if (unescape_value(raw_parts[0]) != table) throw StructuralError("tuple message: wrong table");
    first = 1;
  }
  std::vector<Cell> values;
  values.reserve(arity);
  for (std::size_t i = first; i + 1 < raw_parts.size(); ++i) {
    if (raw_parts[i].size() == 1 && raw_parts[i][0] == wire::kNull) {
      values.emplace_back(std::nullopt);
    } else {
      values.emplace_back(unescape_value(raw_parts[i]));
    }
  }
  return {std::move(values), parse_serial(raw_parts.back())};
}

IntegrityCode generate_field_code(const KeyMaterial& key, const FieldCoordinates& coords,
                                  const Cell& value, std::uint64_t serial,
                                  const CodecOptions& options, std::optional<ByteView> salt) {
  if (serial == 0) throw DomainError("serial 0 is reserved");
  const Bytes message = canonical_field_message(coords, value, serial, options);
  return {emit_code(key, message, salt), serial, key.scheme()};
}

Verdict verify_field_code(const KeyMaterial& key, const FieldCoordinates& coords,
                          const Cell& value, const IntegrityCode& ic, const Icrl& icrl,
                          const CodecOptions& options) {
  require_matching_scheme(key, ic);
  const Bytes message = canonical_field_message(coords, value, ic.serial, options);
  return judge(key, message, ic, icrl);
}

IntegrityCode generate_tuple_code(const KeyMaterial& key, const TupleImage& tuple,
                                  std::uint64_t serial, const CodecOptions& options,
                                  std::optional<ByteView> salt) {
  if (serial == 0) throw DomainError("serial 0 is reserved");
  if (tuple.values.empty()) throw DomainError("tuple has no values");
  const Bytes message = canonical_tuple_message(tuple, serial, options);
  return {emit_code(key, message, salt), serial, key.scheme()};
}

TupleVerdict verify_tuple_code(const KeyMaterial& key, const TupleImage& tuple,
                               const IntegrityCode& ic, const Icrl& icrl,
                               const CodecOptions& options) {
  require_matching_scheme(key, ic);
  const Bytes message = canonical_tuple_message(tuple, ic.serial, options);
  TupleVerdict out{judge(key, message, ic, icrl), std::nullopt};
  if (out.verdict.status != Status::Forged || key.scheme() != SchemeId::AesCipher) return out;

  // Ciphertext codes can be opened to locate the altered attributes.
  try {
    const Bytes plain = recover_plaintext(key, ic.code);
    auto [recovered, serial] =
        parse_tuple_message(plain, tuple.values.size(), options, tuple.table_name);
    std::vector<std::string> diffs;
    for (std::size_t i = 0; i < recovered.size(); ++i) {
      if (recovered[i] != tuple.values[i].second) diffs.push_back(tuple.values[i].first);
    }
    if (serial != ic.serial) {
      out.verdict.detail = "serial mismatch: code carries " + std::to_string(serial);
    }
    out.diffs = std::move(diffs);
  } catch (const StructuralError& e) {
    out.verdict = {Status::Structural, std::string("recovered plaintext: ") + e.what()};
  }
  return out;
}

}  // namespace icdb
