#pragma once

#include <string>
#include <vector>

#include "icdb/store/embedded.hpp"

namespace icdb::store {

using RowKey = std::vector<std::string>;

struct Coordinate {
  RowKey row;
  std::string column;
};

// A row copied out of the store, cells addressed by column name.
struct SavedRow {
  std::string table;
  std::vector<std::string> columns;
  std::vector<Cell> cells;
};

SavedRow save_row(const EmbeddedStore& store, const std::string& table, const RowKey& key);

// Overwrites one cell. Use the code column's name to edit a code.
void attack_forge(EmbeddedStore& store, const std::string& table, const RowKey& key,
                  const std::string& column, const Cell& replacement);

// Swaps the values at two coordinates. With move_codes the codes travel
// too: under OCF the `<column><ic_suffix>` cells are swapped; under OCT the
// Serial and IC cells of the two rows are swapped.
void attack_substitute(EmbeddedStore& store, const std::string& table, const Coordinate& a,
                       const Coordinate& b, bool move_codes, sql::Model model,
                       const std::string& ic_suffix = "_IC");

// Reinserts a saved row, matching columns by name into `table` (which may
// differ from the row's origin). Throws ConstraintViolation on a key clash.
void attack_replay_old(EmbeddedStore& store, const std::string& table, const SavedRow& row);

// Adds a row of attacker-chosen cells in table column order.
void attack_insert(EmbeddedStore& store, const std::string& table, std::vector<Cell> row);

void attack_delete(EmbeddedStore& store, const std::string& table, const RowKey& key);

}  // namespace icdb::store
