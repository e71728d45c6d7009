#include "icdb/sql/schema.hpp"

#include <algorithm>
#include <cctype>

#include "icdb/error.hpp"

namespace icdb::sql {

std::string_view model_name(Model m) { return m == Model::Ocf ? "ocf" : "oct"; }

Model parse_model(std::string_view text) {
  if (iequals(text, "ocf")) return Model::Ocf;
  if (iequals(text, "oct")) return Model::Oct;
  throw SchemaError("unknown model '" + std::string(text) + "' (expected ocf or oct)");
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

TableSchema::TableSchema(std::string name, std::vector<Column> columns, Model model,
                         std::string ic_suffix)
    : name_(std::move(name)), columns_(std::move(columns)), model_(model),
      ic_suffix_(std::move(ic_suffix)) {
  if (name_.empty()) throw SchemaError("table name is empty");
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& c = columns_[i];
    if (c.name.empty()) throw SchemaError(name_ + ": empty column name");
    for (std::size_t j = 0; j < i; ++j) {
      if (iequals(columns_[j].name, c.name)) throw SchemaError(name_ + ": duplicate column " + c.name);
    }
    if (!c.is_ic && !c.is_serial) {
      data_.push_back(i);
      if (c.is_key) keys_.push_back(i);
    }
  }
  if (keys_.empty()) throw SchemaError(name_ + ": table needs at least one key column");
  if (model_ == Model::Ocf) {
    if (ic_suffix_.empty()) throw SchemaError(name_ + ": empty IC suffix");
    for (std::size_t i : data_) {
      if (i + 1 >= columns_.size() || !columns_[i + 1].is_ic ||
          columns_[i + 1].name != columns_[i].name + ic_suffix_) {
        throw SchemaError(name_ + ": column " + columns_[i].name + " lacks its companion " +
                          columns_[i].name + ic_suffix_);
      }
    }
    const auto ics = std::count_if(columns_.begin(), columns_.end(), [](auto& c) { return c.is_ic; });
    if (static_cast<std::size_t>(ics) != data_.size() ||
        std::any_of(columns_.begin(), columns_.end(), [](auto& c) { return c.is_serial; })) {
      throw SchemaError(name_ + ": OCF table has stray code or serial columns");
    }
  } else {
    const auto serials =
        std::count_if(columns_.begin(), columns_.end(), [](auto& c) { return c.is_serial; });
    const auto ics = std::count_if(columns_.begin(), columns_.end(), [](auto& c) { return c.is_ic; });
    if (serials != 1 || ics != 1) {
      throw SchemaError(name_ + ": OCT table needs exactly one serial and one IC column");
    }
  }
}

TableSchema TableSchema::from_base(const BaseTable& base, Model model, std::string ic_suffix) {
  std::vector<Column> cols;
  for (const auto& c : base.columns) {
    cols.push_back({c.name, c.is_key, false, false});
    if (model == Model::Ocf) cols.push_back({c.name + ic_suffix, false, true, false});
  }
  if (model == Model::Oct) {
    cols.push_back({std::string(kSerialColumn), false, false, true});
    cols.push_back({std::string(kTupleIcColumn), false, true, false});
  }
  return TableSchema(base.name, std::move(cols), model, std::move(ic_suffix));
}

std::optional<std::size_t> TableSchema::find(std::string_view column) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (iequals(columns_[i].name, column)) return i;
  }
  return std::nullopt;
}

std::size_t TableSchema::ic_for(std::size_t col) const {
  if (model_ != Model::Ocf) throw SchemaError(name_ + ": per-field codes exist only under OCF");
  if (col + 1 >= columns_.size() || !columns_[col + 1].is_ic || columns_[col].is_ic) {
    throw SchemaError(name_ + ": column " + columns_.at(col).name + " has no IC companion");
  }
  return col + 1;
}

std::size_t TableSchema::serial_column() const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].is_serial) return i;
  }
  throw SchemaError(name_ + ": no serial column");
}

std::size_t TableSchema::tuple_ic_column() const {
  if (model_ != Model::Oct) throw SchemaError(name_ + ": tuple codes exist only under OCT");
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].is_ic) return i;
  }
  throw SchemaError(name_ + ": no IC column");
}

BaseTable TableSchema::base() const {
  BaseTable out{name_, {}};
  for (std::size_t i : data_) out.columns.push_back({columns_[i].name, columns_[i].is_key});
  return out;
}

Catalog::Catalog(std::vector<TableSchema> tables) {
  for (auto& t : tables) add(std::move(t));
}

void Catalog::add(TableSchema table) {
  if (find(table.name())) throw SchemaError("duplicate table " + table.name());
  tables_.push_back(std::move(table));
}

const TableSchema* Catalog::find(std::string_view name) const {
  for (const auto& t : tables_) {
    if (iequals(t.name(), name)) return &t;
  }
  return nullptr;
}

const TableSchema& Catalog::at(std::string_view name) const {
  if (const auto* t = find(name)) return *t;
  throw SchemaError("unknown table '" + std::string(name) + "'");
}

Catalog make_catalog(const std::vector<BaseTable>& base, Model model, std::string ic_suffix) {
  Catalog out;
  for (const auto& t : base) out.add(TableSchema::from_base(t, model, ic_suffix));
  return out;
}

}  // namespace icdb::sql
