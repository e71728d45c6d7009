#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icdb/codec.hpp"
#include "icdb/crypto_schemes.hpp"
#include "icdb/data_file.hpp"
#include "icdb/icrl.hpp"
#include "icdb/sql/schema.hpp"

namespace icdb {

// OCF: one ALTER per data column adding <col><suffix> TEXT NOT NULL AFTER <col>.
// OCT: two ALTERs appending Serial and IC. Throws SchemaError when a column to
// be added already exists.
std::vector<std::string> emit_schema_ddl(const sql::BaseTable& table, sql::Model model,
                                         const std::string& ic_suffix = "_IC");

std::string emit_load_statement(const std::string& table, const std::string& path);
std::string emit_load_statements(const std::vector<std::pair<std::string, std::string>>& table_paths);

struct ConvertOptions {
  int workers = 1;
  CodecOptions codec;
  // Derive PBKDF2 salts from (seed, serial) instead of the system RNG, so a
  // rerun with a fresh ICRL reproduces the output byte for byte.
  std::optional<std::uint64_t> salt_seed;
};

// Converts a dump of `schema.base()` into the ICDB layout of `schema`.
// OCF: each field, NULL included, is followed by "<base64>:<serial>".
// OCT: each row gains Serial and base64 code cells. Serials come from `icrl`
// in row-major order.
DataFile convert_data_file(const DataFile& in, const sql::TableSchema& schema,
                           const KeyMaterial& key, Icrl& icrl, const ConvertOptions& options = {});

// PBKDF2 salt used by convert_data_file when a salt seed is set.
Bytes derived_salt(std::uint64_t seed, std::uint64_t serial, std::size_t length);

}  // namespace icdb
