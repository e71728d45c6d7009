#include "icdb/convert.hpp"

#include <openssl/evp.h>

#include "icdb/error.hpp"
#include "icdb/parallel.hpp"
#include "icdb/sql/rewrite.hpp"

namespace icdb {

using sql::Model;

std::vector<std::string> emit_schema_ddl(const sql::BaseTable& table, Model model,
                                         const std::string& ic_suffix) {
  auto exists = [&](const std::string& name) {
    for (const auto& c : table.columns) {
      if (sql::iequals(c.name, name)) return true;
    }
    return false;
  };
  auto collision = [&](const std::string& name) {
    return SchemaError("table " + table.name + " already has a column named " + name);
  };
  std::vector<std::string> out;
  const std::string alter = "ALTER TABLE `" + table.name + "` ADD COLUMN `";
  if (model == Model::Ocf) {
    if (ic_suffix.empty()) throw SchemaError("empty IC suffix");
    for (const auto& c : table.columns) {
      if (exists(c.name + ic_suffix)) throw collision(c.name + ic_suffix);
    }
    for (const auto& c : table.columns) {
      out.push_back(alter + c.name + ic_suffix + "` TEXT NOT NULL AFTER `" + c.name + "`;");
    }
  } else {
    const std::string serial(sql::kSerialColumn);
    const std::string ic(sql::kTupleIcColumn);
    if (exists(serial)) throw collision(serial);
    if (exists(ic)) throw collision(ic);
    out.push_back(alter + serial + "` BIGINT UNSIGNED NOT NULL;");
    out.push_back(alter + ic + "` TEXT NOT NULL;");
  }
  return out;
}

namespace {

std::string quote_path(const std::string& path) {
  std::string out = "'";
  for (char c : path) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "'";
}

}  // namespace

std::string emit_load_statement(const std::string& table, const std::string& path) {
  return "LOAD DATA INFILE " + quote_path(path) + "\nREPLACE INTO TABLE `" + table +
         "`\nFIELDS TERMINATED BY '|'\nLINES TERMINATED BY '\\n';";
}

std::string emit_load_statements(
    const std::vector<std::pair<std::string, std::string>>& table_paths) {
  std::string out;
  for (const auto& [table, path] : table_paths) out += emit_load_statement(table, path) + "\n";
  return out;
}

Bytes derived_salt(std::uint64_t seed, std::uint64_t serial, std::size_t length) {
  Bytes out;
  for (std::uint32_t block = 0; out.size() < length; ++block) {
    std::uint8_t input[20];
    for (int i = 0; i < 8; ++i) {
      input[i] = static_cast<std::uint8_t>(seed >> (8 * i));
      input[8 + i] = static_cast<std::uint8_t>(serial >> (8 * i));
    }
    for (int i = 0; i < 4; ++i) input[16 + i] = static_cast<std::uint8_t>(block >> (8 * i));
    std::uint8_t digest[32];
    unsigned int len = 0;
    if (EVP_Digest(input, sizeof input, digest, &len, EVP_sha256(), nullptr) != 1) {
      throw Error("openssl: EVP_Digest");
    }
    out.insert(out.end(), digest, digest + len);
  }
  out.resize(length);
  return out;
}

DataFile convert_data_file(const DataFile& in, const sql::TableSchema& schema,
                           const KeyMaterial& key, Icrl& icrl, const ConvertOptions& options) {
  const sql::BaseTable base = schema.base();
  const std::size_t arity = base.columns.size();
  std::vector<std::size_t> key_pos;
  for (std::size_t i = 0; i < arity; ++i) {
    if (base.columns[i].is_key) key_pos.push_back(i);
  }
  for (std::size_t r = 0; r < in.rows.size(); ++r) {
    if (in.rows[r].size() != arity) {
      throw FormatError(r + 1, "row " + std::to_string(r + 1) + " has " +
                                   std::to_string(in.rows[r].size()) + " fields, expected " +
                                   std::to_string(arity));
    }
    for (std::size_t k : key_pos) {
      if (!in.rows[r][k]) {
        throw FormatError(r + 1, "row " + std::to_string(r + 1) + " has a NULL key " +
                                     base.columns[k].name);
      }
    }
  }
  DataFile out;
  if (in.rows.empty()) return out;

  auto salt_for = [&](std::uint64_t serial) -> std::optional<Bytes> {
    if (!options.salt_seed || key.scheme() != SchemeId::Pbkdf2Mac) return std::nullopt;
    return derived_salt(*options.salt_seed, serial, key.config().mac_salt_bytes);
  };

  out.rows.resize(in.rows.size());
  if (schema.model() == Model::Ocf) {
    const std::uint64_t first = icrl.allocate_block(in.rows.size() * arity);
    parallel_for(in.rows.size(), options.workers, [&](std::size_t r) {
      const auto& row = in.rows[r];
      FieldCoordinates coords{base.name, {}, {}};
      for (std::size_t k : key_pos) coords.entity_key.push_back(*row[k]);
      std::vector<Cell> cells;
      cells.reserve(arity * 2);
      for (std::size_t c = 0; c < arity; ++c) {
        cells.push_back(row[c]);
        const std::uint64_t serial = first + r * arity + c;
        coords.attribute_name = base.columns[c].name;
        const auto salt = salt_for(serial);
        const IntegrityCode ic =
            generate_field_code(key, coords, row[c], serial, options.codec,
                                salt ? std::optional<ByteView>(*salt) : std::nullopt);
        cells.emplace_back(sql::encode_ic_cell(ic));
      }
      out.rows[r] = std::move(cells);
    });
  } else {
    const std::uint64_t first = icrl.allocate_block(in.rows.size());
    parallel_for(in.rows.size(), options.workers, [&](std::size_t r) {
      const auto& row = in.rows[r];
      TupleImage tuple{base.name, {}};
      for (std::size_t c = 0; c < arity; ++c) tuple.values.emplace_back(base.columns[c].name, row[c]);
      const std::uint64_t serial = first + r;
      const auto salt = salt_for(serial);
      const IntegrityCode ic = generate_tuple_code(
          key, tuple, serial, options.codec, salt ? std::optional<ByteView>(*salt) : std::nullopt);
      std::vector<Cell> cells(row.begin(), row.end());
      cells.emplace_back(std::to_string(serial));
      cells.emplace_back(base64_encode(ic.code));
      out.rows[r] = std::move(cells);
    });
  }
  return out;
}

}  // namespace icdb
