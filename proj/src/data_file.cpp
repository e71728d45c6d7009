#include "icdb/data_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "icdb/error.hpp"

namespace icdb {

std::string encode_field(const Cell& cell) {
  if (!cell) return "\\N";
  std::string out;
  out.reserve(cell->size());
  for (char c : *cell) {
    if (c == '\\' || c == '|' || c == '\n') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::size_t encoded_field_size(const Cell& cell) {
  if (!cell) return 2;
  std::size_t n = cell->size();
  for (char c : *cell) n += (c == '\\' || c == '|' || c == '\n');
  return n;
}

std::string encode_data_file(const DataFile& file) {
  std::string out;
  for (const auto& row : file.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back('|');
      out += encode_field(row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

DataFile decode_data_file(std::string_view text, std::optional<std::size_t> arity) {
  DataFile out;
  if (text.empty()) return out;
  if (text.back() != '\n') {
    throw FormatError(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1,
                      "last record is not LF-terminated");
  }
  std::vector<Cell> row;
  std::string field;
  bool is_null = false;
  bool field_touched = false;
  std::size_t lineno = 1;
  auto end_field = [&] {
    if (is_null) {
      row.emplace_back(std::nullopt);
    } else {
      row.emplace_back(std::move(field));
    }
    field.clear();
    is_null = false;
    field_touched = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_null && c != '|' && c != '\n') throw FormatError(lineno, "characters after \\N");
    if (c == '\\') {
      if (i + 1 >= text.size()) throw FormatError(lineno, "dangling backslash");
      const char e = text[++i];
      if (e == '\\' || e == '|' || e == '\n') {
        field.push_back(e);
      } else if (e == 'N' && !field_touched) {
        is_null = true;
      } else {
        throw FormatError(lineno, std::string("invalid escape \\") + e);
      }
      field_touched = true;
    } else if (c == '|') {
      end_field();
    } else if (c == '\n') {
      end_field();
      if (arity && row.size() != *arity) {
        throw FormatError(lineno, "row " + std::to_string(out.rows.size() + 1) + " has " +
                                      std::to_string(row.size()) + " fields, expected " +
                                      std::to_string(*arity));
      }
      out.rows.push_back(std::move(row));
      row.clear();
      ++lineno;
    } else {
      field.push_back(c);
      field_touched = true;
    }
  }
  return out;
}

DataFile read_data_file(const std::string& path, std::optional<std::size_t> arity) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open data file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_data_file(ss.str(), arity);
}

void write_data_file(const std::string& path, const DataFile& file) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open data file for writing: " + path);
  f << encode_data_file(file);
  if (!f) throw Error("failed writing data file: " + path);
}

}  // namespace icdb
