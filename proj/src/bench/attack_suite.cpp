#include "icdb/bench/attack_suite.hpp"

#include <map>
#include <sstream>

#include "icdb/error.hpp"
#include "icdb/sql/parser.hpp"
#include "icdb/store/attacks.hpp"
#include "icdb/workflow.hpp"

namespace icdb::bench {

std::string_view attack_class_name(AttackClass c) {
  switch (c) {
    case AttackClass::Forgery: return "forgery";
    case AttackClass::Substitution: return "substitution";
    case AttackClass::OldData: return "old-data";
    case AttackClass::Insertion: return "insertion";
    case AttackClass::Deletion: return "deletion";
  }
  return "?";
}

bool AttackMatrix::matches_expected() const {
  if (cells.empty()) return false;
  for (const auto& c : cells) {
    if (c.attempts == 0) return false;
    const bool ok = c.cls == AttackClass::Deletion ? c.detected == 0 : c.detected == c.attempts;
    if (!ok) return false;
  }
  return true;
}

std::string AttackMatrix::to_text() const {
  std::vector<std::string> combos;
  std::vector<std::pair<AttackClass, std::string>> rows;
  std::map<std::pair<std::string, std::string>, const AttackCell*> index;
  for (const auto& c : cells) {
    const std::string label = c.combo.label();
    if (std::find(combos.begin(), combos.end(), label) == combos.end()) combos.push_back(label);
    const std::pair<AttackClass, std::string> row{c.cls, c.variant};
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    index[{std::string(attack_class_name(c.cls)) + "/" + c.variant, label}] = &c;
  }
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-36s", "attack");
  out << buf;
  for (const auto& c : combos) {
    std::snprintf(buf, sizeof buf, " %-16s", c.c_str());
    out << buf;
  }
  out << "\n";
  for (const auto& [cls, variant] : rows) {
    const std::string name = std::string(attack_class_name(cls)) + "/" + variant;
    std::snprintf(buf, sizeof buf, "%-36s", name.c_str());
    out << buf;
    for (const auto& c : combos) {
      auto it = index.find({name, c});
      std::string cell = "-";
      if (it != index.end()) {
        cell = std::to_string(it->second->detected) + "/" + std::to_string(it->second->attempts);
      }
      std::snprintf(buf, sizeof buf, " %-16s", cell.c_str());
      out << buf;
    }
    out << "\n";
  }
  out << (matches_expected() ? "matrix matches the expected pattern\n"
                             : "matrix DEVIATES from the expected pattern\n");
  return out.str();
}

namespace {

using store::StoredTable;
using CellKey = std::vector<Cell>;

struct Target {
  std::size_t row;                  // stored row index after the attack
  std::optional<std::string> attr;  // OCF attribute expected to be flagged
};

class Runner {
 public:
  Runner(const Combo& combo, const Dataset& d, std::uint64_t seed)
      : combo_(combo), key_(bench_key(combo.scheme, seed)), fx_(build_icdb(d, combo.model, key_)) {}

  IcdbFixture& fx() { return fx_; }
  const KeyMaterial& key() const { return key_; }

  CellKey key_of(const StoredTable& t, std::size_t row) const {
    CellKey out;
    for (std::size_t k : t.key_columns()) out.push_back(t.rows[row][k]);
    return out;
  }

  static bool is_key(const StoredTable& t, const std::string& column) {
    return t.columns[t.at(column)].is_key;
  }

  static std::string where_for(const StoredTable& t, const CellKey& key) {
    std::string out = "(";
    const auto keys = t.key_columns();
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (i) out += " AND ";
      out += "`" + t.columns[keys[i]].name + "` = " +
             sql::render(sql::Literal{sql::Literal::Kind::String, *key[i]});
    }
    return out + ")";
  }

  // Rewrites and verifies a query naming the targeted rows by their current
  // keys (the whole table when a key became NULL).
  QueryOutcome probe(const std::string& table, const std::vector<std::size_t>& rows) {
    const StoredTable& t = fx_.store.table(table);
    std::string sql = "SELECT * FROM `" + t.name + "`";
    bool whole = rows.empty();
    std::string where;
    for (std::size_t r : rows) {
      const CellKey k = key_of(t, r);
      if (std::any_of(k.begin(), k.end(), [](const Cell& c) { return !c; })) whole = true;
      if (!whole) where += (where.empty() ? "" : " OR ") + where_for(t, k);
    }
    if (!whole) sql += " WHERE " + where;
    return run_select(fx_.store, sql + ";", fx_.catalog, key_, fx_.icrl);
  }

  // True when every target is flagged in the probe of its rows.
  bool detected(const std::string& table, const std::vector<Target>& targets, bool* all_stale = nullptr) {
    std::vector<std::size_t> rows;
    for (const auto& t : targets) rows.push_back(t.row);
    const QueryOutcome out = probe(table, rows);
    const StoredTable& st = fx_.store.table(table);
    std::vector<std::size_t> key_cols;
    for (std::size_t k : st.key_columns()) {
      for (std::size_t i = 0; i < out.plan.columns.size(); ++i) {
        if (sql::iequals(out.plan.columns[i], st.columns[k].name)) {
          key_cols.push_back(i);
          break;
        }
      }
    }
    std::map<std::size_t, std::string> attr_of_ic;
    for (const auto& f : out.plan.fields) attr_of_ic[f.ic_col] = f.attribute;
    if (all_stale) *all_stale = !out.report.failures.empty();
    for (const auto& f : out.report.failures) {
      if (all_stale && f.verdict.status != Status::Stale) *all_stale = false;
    }
    for (const auto& target : targets) {
      const CellKey want = key_of(st, target.row);
      bool hit = false;
      for (const auto& f : out.report.failures) {
        const auto& row = out.result.rows[f.row];
        CellKey have;
        for (std::size_t i : key_cols) have.push_back(row.size() > i ? row[i] : std::nullopt);
        if (have != want) continue;
        // Swapping a key together with its code leaves that field consistent;
        // the rest of the row then carries the evidence.
        if (combo_.model == sql::Model::Ocf && target.attr && !is_key(st, *target.attr)) {
          auto it = attr_of_ic.find(f.column);
          if (it == attr_of_ic.end() || !sql::iequals(it->second, *target.attr)) continue;
        }
        hit = true;
        break;
      }
      if (!hit) return false;
    }
    return true;
  }

 private:
  Combo combo_;
  const KeyMaterial& key_;
  IcdbFixture fx_;
};

std::string flip_first(const std::string& s) {
  std::string out = s;
  if (out.empty()) return "A";
  out[0] = out[0] == 'A' ? 'B' : 'A';
  return out;
}

}  // namespace

AttackMatrix run_attack_suite(const AttackSuiteOptions& options) {
  AttackMatrix matrix;
  const Dataset d = generate_dataset(options.profile, options.rows, options.seed);
  for (const Combo& combo : options.combos) {
    Runner run(combo, d, options.seed);
    IcdbFixture& fx = run.fx();
    auto& store = fx.store;
    std::map<std::pair<AttackClass, std::string>, AttackCell> cells;
    auto tally = [&](AttackClass cls, const std::string& variant, bool hit, bool stale = false) {
      auto& c = cells.try_emplace({cls, variant}, AttackCell{combo, cls, variant}).first->second;
      ++c.attempts;
      c.detected += hit;
      c.stale += hit && stale;
    };
    const bool ocf = combo.model == sql::Model::Ocf;

    for (const auto& schema : fx.catalog.tables()) {
      const std::string& tname = schema.name();
      const auto& data_cols = schema.data_columns();
      const std::size_t nrows = store.table(tname).rows.size();
      const auto pristine = store.table(tname).rows;
      auto restore = [&] { store.mutable_table(tname).rows = pristine; };
      auto changed = [&] { return store.table(tname).rows != pristine; };
      auto row_key = [&](std::size_t r) { return store.table(tname).key_of(store.table(tname).rows[r]); };
      auto name_of = [&](std::size_t c) { return schema.columns()[c].name; };

      for (std::size_t r = 0; r < nrows; ++r) {
        for (std::size_t ci = 0; ci < data_cols.size(); ++ci) {
          const std::size_t c = data_cols[ci];
          const std::string attr = name_of(c);

          // Forgery of the value.
          {
            const Cell& v = pristine[r][c];
            store::attack_forge(store, tname, row_key(r), attr, v ? Cell(*v + "x") : Cell("x"));
            tally(AttackClass::Forgery, "value", run.detected(tname, {{r, attr}}));
            restore();
          }
          // Forgery of the code.
          if (ocf || ci == 0) {
            const std::string code_col = ocf ? attr + schema.ic_suffix() : std::string(sql::kTupleIcColumn);
            const Cell& code = pristine[r][store.table(tname).at(code_col)];
            store::attack_forge(store, tname, row_key(r), code_col, flip_first(code.value_or("")));
            tally(AttackClass::Forgery, "code", run.detected(tname, {{r, attr}}));
            restore();
          }
          // Substitutions against the next column of the row and the same
          // column of the next row.
          const std::size_t other_col = data_cols[(ci + 1) % data_cols.size()];
          const std::size_t other_row = (r + 1) % nrows;
          for (bool move_codes : {false, true}) {
            const std::string suffix = move_codes ? "value+code" : "value";
            if (other_col != c) {
              store::attack_substitute(store, tname, {row_key(r), attr},
                                       {row_key(r), name_of(other_col)}, move_codes, combo.model,
                                       schema.ic_suffix());
              if (changed()) {
                tally(AttackClass::Substitution, suffix + " same-row",
                      run.detected(tname, {{r, attr}, {r, name_of(other_col)}}));
              }
              restore();
            }
            if (other_row != r) {
              const auto ka = row_key(r);
              const auto kb = row_key(other_row);
              store::attack_substitute(store, tname, {ka, attr}, {kb, attr}, move_codes,
                                       combo.model, schema.ic_suffix());
              if (changed()) {
                tally(AttackClass::Substitution, suffix + " same-column",
                      run.detected(tname, {{r, attr}, {other_row, attr}}));
              }
              restore();
            }
          }
        }

        // Old data: delete through the owner's workflow, then replay.
        {
          const Icrl saved_icrl = fx.icrl;
          const StoredTable& st = store.table(tname);
          const auto key = row_key(r);
          CellKey cell_key(key.begin(), key.end());
          const store::SavedRow saved = store::save_row(store, tname, key);
          run_delete(store, "DELETE FROM `" + tname + "` WHERE " + Runner::where_for(st, cell_key) + ";",
                     fx.catalog, run.key(), fx.icrl);
          store::attack_replay_old(store, tname, saved);
          bool stale = false;
          const bool hit = run.detected(tname, {{store.table(tname).rows.size() - 1, std::nullopt}}, &stale);
          tally(AttackClass::OldData, "replay after delete", hit, stale);
          fx.icrl = saved_icrl;
          restore();
        }
      }

      // Insertion and deletion on a sample of rows.
      const KeyMaterial attacker = generate_keys(combo.scheme, options.seed + 1000);
      const std::size_t samples = std::min(options.samples_per_table, nrows);
      for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t r = s * nrows / samples;
        // A fresh key: extend each key part until no row has it.
        std::vector<Cell> base_row(pristine[r].begin(), pristine[r].end());
        const StoredTable& st = store.table(tname);
        auto fresh = base_row;
        do {
          for (std::size_t k : st.key_columns()) *fresh[k] += "9";
        } while (st.find_row(st.key_of(fresh)));

        // Codes made with another key over attacker-chosen serials.
        {
          DataFile plain;
          std::vector<Cell> values;
          for (std::size_t c : data_cols) values.push_back(fresh[c]);
          plain.rows.push_back(values);
          Icrl attacker_icrl;
          const DataFile forged = convert_data_file(plain, schema, attacker, attacker_icrl);
          store::attack_insert(store, tname, forged.rows[0]);
          tally(AttackClass::Insertion, "codes from another key",
                run.detected(tname, {{store.table(tname).rows.size() - 1, std::nullopt}}));
          restore();
        }
        // Codes copied from an existing row.
        {
          store::attack_insert(store, tname, fresh);
          tally(AttackClass::Insertion, "codes copied from a row",
                run.detected(tname, {{store.table(tname).rows.size() - 1, std::nullopt}}));
          restore();
        }
        // Deletion goes unnoticed.
        {
          store::attack_delete(store, tname, row_key(r));
          const QueryOutcome out = run.probe(tname, {});
          tally(AttackClass::Deletion, "row removed", !out.report.all_valid());
          restore();
        }
      }
    }
    for (auto& [k, cell] : cells) matrix.cells.push_back(std::move(cell));
  }
  return matrix;
}

}  // namespace icdb::bench
