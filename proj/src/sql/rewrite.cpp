#include "icdb/sql/rewrite.hpp"

#include <charconv>
#include <map>
#include <set>

#include "icdb/error.hpp"
#include "icdb/icrl.hpp"
#include "icdb/sql/parser.hpp"

namespace icdb::sql {

bool TupleCheck::complete() const {
  for (const auto& c : value_cols) {
    if (!c) return false;
  }
  return true;
}

std::string encode_ic_cell(const IntegrityCode& ic) {
  return base64_encode(ic.code) + ":" + std::to_string(ic.serial);
}

IntegrityCode decode_ic_cell(std::string_view cell, SchemeId scheme) {
  const std::size_t colon = cell.rfind(':');
  if (colon == std::string_view::npos) throw StructuralError("code cell lacks ':<serial>'");
  const std::string_view digits = cell.substr(colon + 1);
  std::uint64_t serial = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), serial);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() ||
      (digits.size() > 1 && digits[0] == '0')) {
    throw StructuralError("code cell has a malformed serial");
  }
  if (serial == 0) throw StructuralError("code cell carries reserved serial 0");
  return {base64_decode(cell.substr(0, colon)), serial, scheme};
}

namespace {

using ColumnId = std::pair<std::size_t, std::size_t>;  // (table in scope, schema column)

struct Scope {
  std::vector<Identifier> written;
  std::vector<const TableSchema*> tables;

  bool multi() const { return tables.size() > 1; }
};

Scope make_scope(const ParsedQuery& q, const Catalog& schemas, std::optional<Model> model) {
  Scope s;
  for (const auto& id : q.tables()) {
    const TableSchema& t = schemas.at(id.name);
    for (const auto* seen : s.tables) {
      if (seen == &t) throw SchemaError("table " + t.name() + " appears twice in FROM");
    }
    if (model && t.model() != *model) {
      throw SchemaError("table " + t.name() + " is " + std::string(model_name(t.model())) +
                        ", expected " + std::string(model_name(*model)));
    }
    s.written.push_back(id);
    s.tables.push_back(&t);
  }
  return s;
}

ColumnId resolve(const Scope& scope, const ColumnRef& ref) {
  std::optional<ColumnId> hit;
  for (std::size_t t = 0; t < scope.tables.size(); ++t) {
    if (ref.table && !iequals(ref.table->name, scope.written[t].name) &&
        !iequals(ref.table->name, scope.tables[t]->name())) {
      continue;
    }
    if (auto c = scope.tables[t]->find(ref.column.name)) {
      if (hit) throw SchemaError("ambiguous column " + render(ref));
      hit = ColumnId{t, *c};
    }
  }
  if (!hit) {
    if (ref.table) {
      bool in_scope = false;
      for (std::size_t t = 0; t < scope.tables.size(); ++t) {
        in_scope |= iequals(ref.table->name, scope.written[t].name);
      }
      if (!in_scope) throw SchemaError("table " + ref.table->name + " is not in FROM");
    }
    throw SchemaError("unknown column " + render(ref));
  }
  const Column& col = scope.tables[hit->first]->columns()[hit->second];
  if (col.is_ic || col.is_serial) {
    throw SchemaError("column " + render(ref) + " holds integrity metadata and cannot be queried");
  }
  return *hit;
}

// A column reference as the schema spells it, qualified when the scope has
// more than one table. The qualifier copies the FROM clause spelling.
ColumnRef schema_ref(const Scope& scope, ColumnId id) {
  ColumnRef ref;
  if (scope.multi()) ref.table = scope.written[id.first];
  ref.column = {scope.tables[id.first]->columns()[id.second].name, false};
  return ref;
}

ColumnRef with_suffix(ColumnRef ref, const std::string& suffix) {
  ref.column.name += suffix;
  return ref;
}

class SelectList {
 public:
  // Returns the result index, reusing an earlier occurrence.
  std::size_t add_data(ColumnId id, const ColumnRef& ref) {
    if (auto it = data_.find(id); it != data_.end()) return it->second;
    data_.emplace(id, cols_.size());
    refs_.emplace(id, ref);
    cols_.push_back(render(ref));
    return cols_.size() - 1;
  }
  std::size_t add_ic(ColumnId id, const std::string& suffix) {
    if (auto it = ic_.find(id); it != ic_.end()) return it->second;
    ic_.emplace(id, cols_.size());
    cols_.push_back(render(with_suffix(refs_.at(id), suffix)));
    return cols_.size() - 1;
  }
  std::size_t add_meta(const ColumnRef& ref) {
    cols_.push_back(render(ref));
    return cols_.size() - 1;
  }
  bool has_data(ColumnId id) const { return data_.contains(id); }
  std::size_t data_at(ColumnId id) const { return data_.at(id); }
  std::optional<std::size_t> find_data(ColumnId id) const {
    auto it = data_.find(id);
    return it == data_.end() ? std::nullopt : std::optional(it->second);
  }
  const std::vector<std::string>& columns() const { return cols_; }
  const std::map<ColumnId, std::size_t>& data() const { return data_; }

 private:
  std::vector<std::string> cols_;
  std::map<ColumnId, std::size_t> data_;
  std::map<ColumnId, std::size_t> ic_;
  std::map<ColumnId, ColumnRef> refs_;
};

// A_1..A_r, either as written or expanded from *.
std::vector<std::pair<ColumnId, ColumnRef>> projected(const ParsedQuery& q, const Scope& scope) {
  std::vector<std::pair<ColumnId, ColumnRef>> out;
  if (q.is_star()) {
    for (std::size_t t = 0; t < scope.tables.size(); ++t) {
      for (std::size_t c : scope.tables[t]->data_columns()) {
        out.emplace_back(ColumnId{t, c}, schema_ref(scope, {t, c}));
      }
    }
    return out;
  }
  for (const auto& item : q.select) {
    if (item.star) throw SchemaError("'*' cannot be mixed with other select items");
    out.emplace_back(resolve(scope, item.column), item.column);
  }
  return out;
}

std::vector<std::pair<ColumnId, ColumnRef>> conditions(const ParsedQuery& q, const Scope& scope) {
  std::vector<std::pair<ColumnId, ColumnRef>> out;
  for (const auto& ref : q.where_columns()) out.emplace_back(resolve(scope, ref), ref);
  // Join conditions still have to name real columns.
  for (const auto& j : q.joins) {
    if (!j.on) continue;
    std::vector<ColumnRef> refs;
    collect_columns(*j.on, refs);
    for (const auto& r : refs) resolve(scope, r);
  }
  return out;
}

std::string assemble(const ParsedQuery& q, const std::vector<std::string>& cols) {
  std::string out = q.distinct ? "SELECT DISTINCT " : "SELECT ";
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ", ";
    out += cols[i];
  }
  out += " " + q.from_text;
  if (!q.where_text.empty()) out += " " + q.where_text;
  if (q.semicolon) out += ";";
  return out;
}

void require_select(const ParsedQuery& q) {
  if (q.kind != StatementKind::Select) throw SchemaError("expected a SELECT statement");
}

ParsedQuery star_select(const ParsedQuery& q) {
  ParsedQuery s = q;
  s.kind = StatementKind::Select;
  s.distinct = false;
  s.select = {SelectItem{true, {}}};
  if (s.from_text.empty()) s.from_text = "FROM " + render(q.table);
  return s;
}

}  // namespace

RewritePlan rewrite_select_ocf(const ParsedQuery& q, const Catalog& schemas) {
  require_select(q);
  const Scope scope = make_scope(q, schemas, Model::Ocf);
  const auto attrs = projected(q, scope);
  const auto conds = conditions(q, scope);

  SelectList list;
  for (const auto& [id, ref] : attrs) list.add_data(id, ref);
  for (std::size_t t = 0; t < scope.tables.size(); ++t) {
    for (std::size_t k : scope.tables[t]->key_columns()) list.add_data({t, k}, schema_ref(scope, {t, k}));
  }
  for (const auto& [id, ref] : conds) list.add_data(id, ref);

  // Codes are injected for A and B; keys ride along unverified except
  // through the codes that embed them.
  std::vector<ColumnId> verified;
  std::set<ColumnId> seen;
  for (const auto& [id, ref] : attrs) {
    if (seen.insert(id).second) verified.push_back(id);
  }
  for (const auto& [id, ref] : conds) {
    if (seen.insert(id).second) verified.push_back(id);
  }
  // A table contributing only keys would otherwise go entirely unchecked.
  for (std::size_t t = 0; t < scope.tables.size(); ++t) {
    const bool touched =
        std::any_of(verified.begin(), verified.end(), [t](const ColumnId& id) { return id.first == t; });
    if (touched) continue;
    for (std::size_t k : scope.tables[t]->key_columns()) {
      if (seen.insert({t, k}).second) verified.push_back({t, k});
    }
  }

  RewritePlan plan;
  plan.kind = StatementKind::Select;
  plan.model = Model::Ocf;
  plan.distinct = q.distinct;
  for (const ColumnId& id : verified) {
    const TableSchema& t = *scope.tables[id.first];
    FieldCheck check;
    check.table = t.name();
    check.attribute = t.columns()[id.second].name;
    check.value_col = list.data_at(id);
    check.ic_col = list.add_ic(id, t.ic_suffix());
    for (std::size_t k : t.key_columns()) check.key_cols.push_back(list.data_at({id.first, k}));
    plan.fields.push_back(std::move(check));
  }
  for (const auto& [id, index] : list.data()) {
    if (!seen.contains(id)) plan.bound_columns.push_back(index);
  }
  std::sort(plan.bound_columns.begin(), plan.bound_columns.end());
  plan.columns = list.columns();
  plan.icdb_sql = assemble(q, plan.columns);
  return plan;
}

RewritePlan rewrite_select_oct(const ParsedQuery& q, const Catalog& schemas) {
  require_select(q);
  const Scope scope = make_scope(q, schemas, Model::Oct);
  const auto attrs = projected(q, scope);
  const auto conds = conditions(q, scope);

  SelectList list;
  for (const auto& [id, ref] : attrs) list.add_data(id, ref);
  for (const auto& [id, ref] : conds) list.add_data(id, ref);

  RewritePlan plan;
  plan.kind = StatementKind::Select;
  plan.model = Model::Oct;
  plan.distinct = q.distinct;
  bool incomplete = false;
  for (std::size_t t = 0; t < scope.tables.size(); ++t) {
    const TableSchema& schema = *scope.tables[t];
    TupleCheck check;
    check.table = schema.name();
    for (std::size_t c : schema.data_columns()) {
      check.attributes.push_back(schema.columns()[c].name);
      check.value_cols.push_back(list.find_data({t, c}));
    }
    check.serial_col = list.add_meta(schema_ref(scope, {t, schema.serial_column()}));
    check.ic_col = list.add_meta(schema_ref(scope, {t, schema.tuple_ic_column()}));
    incomplete |= !check.complete();
    plan.tuples.push_back(std::move(check));
  }
  plan.columns = list.columns();
  plan.icdb_sql = assemble(q, plan.columns);
  if (incomplete) plan.second_fetch.push_back(rewrite_select_oct(star_select(q), schemas));
  return plan;
}

RewritePlan rewrite_select(const ParsedQuery& q, const Catalog& schemas) {
  require_select(q);
  const Model model = schemas.at(q.table.name).model();
  return model == Model::Ocf ? rewrite_select_ocf(q, schemas) : rewrite_select_oct(q, schemas);
}

RewritePlan plan_delete(const ParsedQuery& q, const Catalog& schemas) {
  if (q.kind != StatementKind::Delete) throw SchemaError("expected a DELETE statement");
  RewritePlan plan = rewrite_select(star_select(q), schemas);
  plan.kind = StatementKind::Delete;
  plan.delete_sql = q.source;
  plan.post_actions.push_back(PostAction::RevokeObservedSerials);
  return plan;
}

RewritePlan plan_insert(const ParsedQuery& q, const Catalog& schemas, const KeyMaterial& key,
                        Icrl& icrl, const CodecOptions& options) {
  if (q.kind != StatementKind::Insert) throw SchemaError("expected an INSERT statement");
  const TableSchema& t = schemas.at(q.table.name);

  std::vector<std::size_t> schema_cols;
  for (const auto& c : q.insert_columns) {
    auto idx = t.find(c.name);
    if (!idx) throw SchemaError("unknown column " + c.name + " in " + t.name());
    const Column& col = t.columns()[*idx];
    if (col.is_ic || col.is_serial) {
      throw SchemaError("column " + c.name + " holds integrity metadata and cannot be inserted");
    }
    if (std::find(schema_cols.begin(), schema_cols.end(), *idx) != schema_cols.end()) {
      throw SchemaError("column " + c.name + " listed twice");
    }
    schema_cols.push_back(*idx);
  }
  auto position_of = [&](std::size_t schema_col) -> std::optional<std::size_t> {
    auto it = std::find(schema_cols.begin(), schema_cols.end(), schema_col);
    if (it == schema_cols.end()) return std::nullopt;
    return static_cast<std::size_t>(it - schema_cols.begin());
  };
  auto cell_of = [](const Literal& l) -> Cell {
    if (l.kind == Literal::Kind::Null) return std::nullopt;
    return l.value;
  };

  RewritePlan plan;
  plan.kind = StatementKind::Insert;
  plan.model = t.model();

  std::string cols;
  auto add_col = [&](const std::string& text) {
    if (!cols.empty()) cols += ", ";
    cols += text;
  };
  std::vector<std::string> value_rows;

  if (t.model() == Model::Ocf) {
    for (std::size_t k : t.key_columns()) {
      if (!position_of(k)) {
        throw SchemaError("INSERT into " + t.name() + " must supply key column " +
                          t.columns()[k].name);
      }
    }
    for (const auto& c : q.insert_columns) {
      add_col(render(c));
      add_col(render(Identifier{c.name + t.ic_suffix(), c.quoted}));
    }
    for (const auto& row : q.insert_rows) {
      FieldCoordinates coords{t.name(), {}, {}};
      for (std::size_t k : t.key_columns()) {
        const Cell v = cell_of(row[*position_of(k)]);
        if (!v) throw SchemaError("key column " + t.columns()[k].name + " cannot be NULL");
        coords.entity_key.push_back(*v);
      }
      std::string values;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) values += ", ";
        values += render(row[i]) + ", ";
        const Cell v = cell_of(row[i]);
        coords.attribute_name = t.columns()[schema_cols[i]].name;
        const std::uint64_t serial = icrl.allocate_block(1);
        plan.allocated_serials.push_back(serial);
        const IntegrityCode ic = generate_field_code(key, coords, v, serial, options);
        values += render(Literal{Literal::Kind::String, encode_ic_cell(ic)});
      }
      value_rows.push_back(std::move(values));
    }
  } else {
    for (const auto& c : q.insert_columns) add_col(render(c));
    add_col(std::string(kSerialColumn));
    add_col(std::string(kTupleIcColumn));
    for (const auto& row : q.insert_rows) {
      TupleImage tuple{t.name(), {}};
      for (std::size_t c : t.data_columns()) {
        auto pos = position_of(c);
        tuple.values.emplace_back(t.columns()[c].name, pos ? cell_of(row[*pos]) : std::nullopt);
      }
      const std::uint64_t serial = icrl.allocate_block(1);
      plan.allocated_serials.push_back(serial);
      const IntegrityCode ic = generate_tuple_code(key, tuple, serial, options);
      std::string values;
      for (const auto& l : row) values += render(l) + ", ";
      values += std::to_string(serial) + ", " +
                render(Literal{Literal::Kind::String, base64_encode(ic.code)});
      value_rows.push_back(std::move(values));
    }
  }

  plan.icdb_sql = "INSERT INTO " + render(q.table) + " (" + cols + ") VALUES ";
  for (std::size_t r = 0; r < value_rows.size(); ++r) {
    if (r) plan.icdb_sql += ", ";
    plan.icdb_sql += "(" + value_rows[r] + ")";
  }
  if (q.semicolon) plan.icdb_sql += ";";
  return plan;
}

}  // namespace icdb::sql
