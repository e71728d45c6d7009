#include "icdb/bench/size_model.hpp"

namespace icdb::bench {

namespace {

std::size_t digits(std::uint64_t v) {
  std::size_t n = 1;
  while (v >= 10) {
    v /= 10;
    ++n;
  }
  return n;
}

std::size_t escaped_length(std::string_view s) {
  std::size_t n = s.size();
  for (char c : s) {
    n += c == wire::kUnit || c == wire::kRecord || c == wire::kEscape || c == wire::kNull;
  }
  return n;
}

std::size_t token_length(const Cell& c) { return c ? escaped_length(*c) : 1; }

std::size_t code_bytes(SchemeId scheme, std::size_t message, const SchemeConfig& config) {
  switch (scheme) {
    case SchemeId::RsaSign: return (config.rsa_modulus_bits + 7) / 8;
    case SchemeId::Pbkdf2Mac: return config.mac_salt_bytes + config.mac_output_bytes;
    case SchemeId::AesCipher: return (message / 16 + 1) * 16;
  }
  return 0;
}

}  // namespace

std::size_t data_file_size(const DataFile& file) {
  std::size_t n = 0;
  for (const auto& row : file.rows) {
    for (const auto& c : row) n += encoded_field_size(c) + 1;  // '|' or LF
  }
  return n;
}

std::size_t predict_converted_size(const DataFile& in, const sql::BaseTable& table,
                                   sql::Model model, SchemeId scheme, std::uint64_t first_serial,
                                   const SchemeConfig& config, const CodecOptions& codec) {
  std::size_t total = data_file_size(in);
  const std::size_t table_part = codec.bind_table ? escaped_length(table.name) + 1 : 0;
  std::uint64_t serial = first_serial;
  for (const auto& row : in.rows) {
    if (model == sql::Model::Ocf) {
      std::size_t key_part = 0;
      std::size_t key_count = 0;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!table.columns[c].is_key) continue;
        key_part += escaped_length(*row[c]);
        ++key_count;
      }
      key_part += key_count - 1;  // record separators
      for (std::size_t c = 0; c < row.size(); ++c, ++serial) {
        const std::size_t message = table_part + digits(serial) + 1 +
                                    escaped_length(table.columns[c].name) + 1 +
                                    token_length(row[c]) + 1 + key_part;
        total += 1 + base64_length(code_bytes(scheme, message, config)) + 1 + digits(serial);
      }
    } else {
      std::size_t message = table_part + row.size() + digits(serial);  // separators + serial
      for (const auto& c : row) message += token_length(c);
      total += 1 + digits(serial) + 1 + base64_length(code_bytes(scheme, message, config));
      ++serial;
    }
  }
  return total;
}

}  // namespace icdb::bench
