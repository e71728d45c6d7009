#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icdb/codec.hpp"

namespace icdb {

// Delimiter-separated table dump: fields separated by '|', records ended by
// LF. Backslash escapes '\\', '|' and LF inside a field; a field of exactly
// "\N" is NULL.
struct DataFile {
  std::vector<std::vector<Cell>> rows;

  bool operator==(const DataFile&) const = default;
};

std::string encode_field(const Cell& cell);
std::size_t encoded_field_size(const Cell& cell);

std::string encode_data_file(const DataFile& file);
// When `arity` is given, every row must have exactly that many fields
// (FormatError names the 1-based row otherwise).
DataFile decode_data_file(std::string_view text, std::optional<std::size_t> arity = {});

DataFile read_data_file(const std::string& path, std::optional<std::size_t> arity = {});
void write_data_file(const std::string& path, const DataFile& file);

}  // namespace icdb
