#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icdb::sql {

enum class Model { Ocf, Oct };

std::string_view model_name(Model m);  // "ocf" / "oct"
Model parse_model(std::string_view text);

bool iequals(std::string_view a, std::string_view b);

inline constexpr std::string_view kSerialColumn = "Serial";
inline constexpr std::string_view kTupleIcColumn = "IC";

// A table as it exists before conversion.
struct BaseColumn {
  std::string name;
  bool is_key = false;
};

struct BaseTable {
  std::string name;
  std::vector<BaseColumn> columns;
};

struct Column {
  std::string name;
  bool is_key = false;
  bool is_ic = false;
  bool is_serial = false;
};

// Physical layout of a converted table. OCF places name+suffix directly after
// every data column; OCT appends one Serial and one IC column.
class TableSchema {
 public:
  TableSchema(std::string name, std::vector<Column> columns, Model model,
              std::string ic_suffix = "_IC");

  static TableSchema from_base(const BaseTable& base, Model model, std::string ic_suffix = "_IC");

  const std::string& name() const { return name_; }
  const std::vector<Column>& columns() const { return columns_; }
  Model model() const { return model_; }
  const std::string& ic_suffix() const { return ic_suffix_; }

  // Indices into columns().
  const std::vector<std::size_t>& data_columns() const { return data_; }
  const std::vector<std::size_t>& key_columns() const { return keys_; }
  std::optional<std::size_t> find(std::string_view column) const;

  // OCF: physical index of the code column accompanying data column `col`.
  std::size_t ic_for(std::size_t col) const;
  // OCT only.
  std::size_t serial_column() const;
  std::size_t tuple_ic_column() const;

  BaseTable base() const;

 private:
  std::string name_;
  std::vector<Column> columns_;
  Model model_;
  std::string ic_suffix_;
  std::vector<std::size_t> data_;
  std::vector<std::size_t> keys_;
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<TableSchema> tables);

  void add(TableSchema table);
  const TableSchema* find(std::string_view name) const;
  const TableSchema& at(std::string_view name) const;  // throws SchemaError
  const std::vector<TableSchema>& tables() const { return tables_; }

 private:
  std::vector<TableSchema> tables_;
};

Catalog make_catalog(const std::vector<BaseTable>& base, Model model, std::string ic_suffix = "_IC");

}  // namespace icdb::sql
