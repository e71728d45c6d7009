#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "icdb/data_file.hpp"
#include "icdb/sql/ast.hpp"
#include "icdb/sql/schema.hpp"
#include "icdb/store/connector.hpp"

namespace icdb::store {

struct StoredColumn {
  std::string name;
  bool is_key = false;
};

struct StoredTable {
  std::string name;
  std::vector<StoredColumn> columns;
  std::vector<std::vector<Cell>> rows;  // insertion order

  std::optional<std::size_t> find(std::string_view column) const;
  std::size_t at(std::string_view column) const;  // throws SchemaError
  std::vector<std::size_t> key_columns() const;
  std::vector<std::string> key_of(const std::vector<Cell>& row) const;
  // Index of the row whose key equals `key`, if any.
  std::optional<std::size_t> find_row(const std::vector<std::string>& key) const;
};

// In-memory tables evaluating the statement subset accepted by sql::parse,
// plus the ALTER TABLE ... ADD COLUMN and LOAD DATA INFILE statements emitted
// by the converter. Cells are text; comparisons are numeric when both sides
// parse as decimal numbers and lexicographic otherwise. NULL compares false.
class EmbeddedStore : public Connector {
 public:
  void create_table(const std::string& name, std::vector<StoredColumn> columns);
  void create_table(const sql::TableSchema& schema);
  void create_table(const sql::BaseTable& base);
  void drop_table(std::string_view name);

  ResultSet execute(std::string_view sql) override;
  Capabilities capabilities() const override { return {true, true}; }

  ResultSet execute(const sql::ParsedQuery& q);

  // REPLACE semantics: a row whose key already exists overwrites it.
  std::size_t load_rows(std::string_view table, const DataFile& data);
  DataFile dump(std::string_view table) const;

  const StoredTable& table(std::string_view name) const;
  StoredTable& mutable_table(std::string_view name);
  bool has_table(std::string_view name) const;
  std::vector<std::string> table_names() const;

  // Appends a row after checking arity and key uniqueness.
  void insert_row(std::string_view table, std::vector<Cell> row);

  bool operator==(const EmbeddedStore&) const;

 private:
  ResultSet select(const sql::ParsedQuery& q) const;
  ResultSet remove(const sql::ParsedQuery& q);
  ResultSet insert(const sql::ParsedQuery& q);
  ResultSet alter(std::string_view sql);
  ResultSet load(std::string_view sql);

  std::vector<StoredTable> tables_;
};

}  // namespace icdb::store
