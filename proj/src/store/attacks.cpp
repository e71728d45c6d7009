#include "icdb/store/attacks.hpp"

#include <utility>

#include "icdb/error.hpp"

namespace icdb::store {

namespace {

std::size_t row_index(const StoredTable& t, const RowKey& key) {
  if (auto r = t.find_row(key)) return *r;
  std::string text;
  for (const auto& k : key) text += (text.empty() ? "" : ",") + k;
  throw DomainError(t.name + ": no row with key (" + text + ")");
}

}  // namespace

SavedRow save_row(const EmbeddedStore& store, const std::string& table, const RowKey& key) {
  const StoredTable& t = store.table(table);
  SavedRow out{t.name, {}, t.rows[row_index(t, key)]};
  for (const auto& c : t.columns) out.columns.push_back(c.name);
  return out;
}

void attack_forge(EmbeddedStore& store, const std::string& table, const RowKey& key,
                  const std::string& column, const Cell& replacement) {
  StoredTable& t = store.mutable_table(table);
  t.rows[row_index(t, key)][t.at(column)] = replacement;
}

void attack_substitute(EmbeddedStore& store, const std::string& table, const Coordinate& a,
                       const Coordinate& b, bool move_codes, sql::Model model,
                       const std::string& ic_suffix) {
  StoredTable& t = store.mutable_table(table);
  const std::size_t ra = row_index(t, a.row);
  const std::size_t rb = row_index(t, b.row);
  auto swap_cells = [&](std::size_t ca, std::size_t cb) {
    if (ra == rb && ca == cb) return;
    std::swap(t.rows[ra][ca], t.rows[rb][cb]);
  };
  swap_cells(t.at(a.column), t.at(b.column));
  if (!move_codes) return;
  if (model == sql::Model::Ocf) {
    swap_cells(t.at(a.column + ic_suffix), t.at(b.column + ic_suffix));
  } else if (ra != rb) {
    swap_cells(t.at(sql::kSerialColumn), t.at(sql::kSerialColumn));
    swap_cells(t.at(sql::kTupleIcColumn), t.at(sql::kTupleIcColumn));
  }
}

void attack_replay_old(EmbeddedStore& store, const std::string& table, const SavedRow& row) {
  const StoredTable& t = store.table(table);
  std::vector<Cell> cells(t.columns.size());
  std::vector<bool> filled(t.columns.size(), false);
  for (std::size_t i = 0; i < row.columns.size(); ++i) {
    const auto idx = t.find(row.columns[i]);
    if (!idx) continue;
    cells[*idx] = row.cells[i];
    filled[*idx] = true;
  }
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i] && t.columns[i].is_key) {
      throw SchemaError(t.name + ": saved row lacks key column " + t.columns[i].name);
    }
  }
  store.insert_row(table, std::move(cells));
}

void attack_insert(EmbeddedStore& store, const std::string& table, std::vector<Cell> row) {
  store.insert_row(table, std::move(row));
}

void attack_delete(EmbeddedStore& store, const std::string& table, const RowKey& key) {
  StoredTable& t = store.mutable_table(table);
  t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(row_index(t, key)));
}

}  // namespace icdb::store
