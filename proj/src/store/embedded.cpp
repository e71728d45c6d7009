#include "icdb/store/embedded.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <unordered_map>

#include "icdb/error.hpp"
#include "icdb/sql/parser.hpp"

namespace icdb::store {

using sql::iequals;

std::optional<std::size_t> StoredTable::find(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (iequals(columns[i].name, column)) return i;
  }
  return std::nullopt;
}

std::size_t StoredTable::at(std::string_view column) const {
  if (auto i = find(column)) return *i;
  throw SchemaError("unknown column " + std::string(column) + " in " + name);
}

std::vector<std::size_t> StoredTable::key_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].is_key) out.push_back(i);
  }
  return out;
}

std::vector<std::string> StoredTable::key_of(const std::vector<Cell>& row) const {
  std::vector<std::string> out;
  for (std::size_t k : key_columns()) {
    if (!row[k]) throw ConstraintViolation(name + ": key column " + columns[k].name + " is NULL");
    out.push_back(*row[k]);
  }
  return out;
}

std::optional<std::size_t> StoredTable::find_row(const std::vector<std::string>& key) const {
  const auto keys = key_columns();
  if (key.size() != keys.size()) {
    throw DomainError(name + ": key has " + std::to_string(keys.size()) + " parts, got " +
                      std::to_string(key.size()));
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    bool match = true;
    for (std::size_t i = 0; i < keys.size() && match; ++i) match = rows[r][keys[i]] == key[i];
    if (match) return r;
  }
  return std::nullopt;
}

void EmbeddedStore::create_table(const std::string& name, std::vector<StoredColumn> columns) {
  if (has_table(name)) throw SchemaError("table " + name + " already exists");
  if (columns.empty()) throw SchemaError("table " + name + " has no columns");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (iequals(columns[i].name, columns[j].name)) {
        throw SchemaError("table " + name + ": duplicate column " + columns[i].name);
      }
    }
  }
  tables_.push_back({name, std::move(columns), {}});
}

void EmbeddedStore::create_table(const sql::TableSchema& schema) {
  std::vector<StoredColumn> cols;
  for (const auto& c : schema.columns()) cols.push_back({c.name, c.is_key});
  create_table(schema.name(), std::move(cols));
}

void EmbeddedStore::create_table(const sql::BaseTable& base) {
  std::vector<StoredColumn> cols;
  for (const auto& c : base.columns) cols.push_back({c.name, c.is_key});
  create_table(base.name, std::move(cols));
}

void EmbeddedStore::drop_table(std::string_view name) {
  auto it = std::find_if(tables_.begin(), tables_.end(),
                         [&](const StoredTable& t) { return iequals(t.name, name); });
  if (it == tables_.end()) throw SchemaError("unknown table '" + std::string(name) + "'");
  tables_.erase(it);
}

bool EmbeddedStore::has_table(std::string_view name) const {
  return std::any_of(tables_.begin(), tables_.end(),
                     [&](const StoredTable& t) { return iequals(t.name, name); });
}

const StoredTable& EmbeddedStore::table(std::string_view name) const {
  for (const auto& t : tables_) {
    if (iequals(t.name, name)) return t;
  }
  throw SchemaError("unknown table '" + std::string(name) + "'");
}

StoredTable& EmbeddedStore::mutable_table(std::string_view name) {
  return const_cast<StoredTable&>(std::as_const(*this).table(name));
}

std::vector<std::string> EmbeddedStore::table_names() const {
  std::vector<std::string> out;
  for (const auto& t : tables_) out.push_back(t.name);
  return out;
}

bool EmbeddedStore::operator==(const EmbeddedStore& o) const {
  if (tables_.size() != o.tables_.size()) return false;
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const auto& a = tables_[i];
    const auto& b = o.tables_[i];
    if (a.name != b.name || a.rows != b.rows || a.columns.size() != b.columns.size()) return false;
    for (std::size_t c = 0; c < a.columns.size(); ++c) {
      if (a.columns[c].name != b.columns[c].name || a.columns[c].is_key != b.columns[c].is_key) {
        return false;
      }
    }
  }
  return true;
}

void EmbeddedStore::insert_row(std::string_view name, std::vector<Cell> row) {
  StoredTable& t = mutable_table(name);
  if (row.size() != t.columns.size()) {
    throw SchemaError(t.name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                      std::to_string(t.columns.size()));
  }
  if (t.find_row(t.key_of(row))) throw ConstraintViolation(t.name + ": duplicate key");
  t.rows.push_back(std::move(row));
}

std::size_t EmbeddedStore::load_rows(std::string_view name, const DataFile& data) {
  StoredTable& t = mutable_table(name);
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    if (data.rows[r].size() != t.columns.size()) {
      throw FormatError(r + 1, t.name + ": row has " + std::to_string(data.rows[r].size()) +
                                   " fields, expected " + std::to_string(t.columns.size()));
    }
  }
  std::map<std::vector<std::string>, std::size_t> index;
  for (std::size_t r = 0; r < t.rows.size(); ++r) index.emplace(t.key_of(t.rows[r]), r);
  for (const auto& row : data.rows) {
    auto key = t.key_of(row);
    if (auto it = index.find(key); it != index.end()) {
      t.rows[it->second] = row;
    } else {
      index.emplace(std::move(key), t.rows.size());
      t.rows.push_back(row);
    }
  }
  return data.rows.size();
}

DataFile EmbeddedStore::dump(std::string_view name) const { return {table(name).rows}; }

namespace {

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  std::size_t digits = 0;
  bool dot = false;
  for (std::size_t j = i; j < s.size(); ++j) {
    if (std::isdigit(static_cast<unsigned char>(s[j]))) {
      ++digits;
    } else if (s[j] == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  if (digits == 0) return false;
  const char* begin = s.data() + (s[0] == '+' ? 1 : 0);
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

int compare_text(const std::string& a, const std::string& b) {
  double x = 0, y = 0;
  if (parse_number(a, x) && parse_number(b, y)) return x < y ? -1 : (x > y ? 1 : 0);
  return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);
}

bool holds(sql::CompareOp op, int c) {
  switch (op) {
    case sql::CompareOp::Eq: return c == 0;
    case sql::CompareOp::Ne: return c != 0;
    case sql::CompareOp::Lt: return c < 0;
    case sql::CompareOp::Gt: return c > 0;
    case sql::CompareOp::Le: return c <= 0;
    case sql::CompareOp::Ge: return c >= 0;
  }
  return false;
}

// Equality classes for hash joins: numbers by value, other text verbatim.
std::string join_key(const std::string& s) {
  double x = 0;
  if (parse_number(s, x)) {
    if (x == 0) x = 0;  // fold -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "n%a", x);
    return buf;
  }
  return "s" + s;
}

struct Slot {
  std::size_t table;
  std::size_t column;
};

// Row combinations are stored as one row index per table in scope.
using Combo = std::vector<std::size_t>;

struct Scope {
  std::vector<std::string> written;
  std::vector<const StoredTable*> tables;

  Slot resolve(const sql::ColumnRef& ref, std::size_t limit) const {
    std::optional<Slot> hit;
    bool table_seen = !ref.table;
    for (std::size_t t = 0; t < limit; ++t) {
      if (ref.table && !iequals(ref.table->name, written[t]) &&
          !iequals(ref.table->name, tables[t]->name)) {
        continue;
      }
      table_seen = true;
      if (auto c = tables[t]->find(ref.column.name)) {
        if (hit) throw SchemaError("ambiguous column " + sql::render(ref));
        hit = Slot{t, *c};
      }
    }
    if (!table_seen) throw SchemaError("table " + ref.table->name + " is not in FROM");
    if (!hit) throw SchemaError("unknown column " + sql::render(ref));
    return *hit;
  }
  Slot resolve(const sql::ColumnRef& ref) const { return resolve(ref, tables.size()); }

  const Cell& cell(const Combo& combo, Slot s) const {
    return tables[s.table]->rows[combo[s.table]][s.column];
  }
};

// An expression with column references bound to slots.
struct Bound {
  sql::Expr::Kind kind;
  std::optional<Slot> lhs_slot, rhs_slot;
  Cell lhs_lit, rhs_lit;
  sql::CompareOp op;
  std::vector<Bound> children;
};

Cell literal_cell(const sql::Literal& l) {
  if (l.kind == sql::Literal::Kind::Null) return std::nullopt;
  return l.value;
}

Bound bind(const sql::Expr& e, const Scope& scope, std::size_t limit) {
  Bound b{e.kind, {}, {}, {}, {}, e.op, {}};
  if (e.kind == sql::Expr::Kind::Compare) {
    auto side = [&](const sql::Operand& o, std::optional<Slot>& slot, Cell& lit) {
      if (const auto* c = std::get_if<sql::ColumnRef>(&o)) {
        slot = scope.resolve(*c, limit);
      } else {
        lit = literal_cell(std::get<sql::Literal>(o));
      }
    };
    side(e.lhs, b.lhs_slot, b.lhs_lit);
    side(e.rhs, b.rhs_slot, b.rhs_lit);
    return b;
  }
  for (const auto& c : e.children) b.children.push_back(bind(c, scope, limit));
  return b;
}

bool eval(const Bound& b, const Scope& scope, const Combo& combo) {
  switch (b.kind) {
    case sql::Expr::Kind::And:
      return std::all_of(b.children.begin(), b.children.end(),
                         [&](const Bound& c) { return eval(c, scope, combo); });
    case sql::Expr::Kind::Or:
      return std::any_of(b.children.begin(), b.children.end(),
                         [&](const Bound& c) { return eval(c, scope, combo); });
    case sql::Expr::Kind::Compare: break;
  }
  const Cell& l = b.lhs_slot ? scope.cell(combo, *b.lhs_slot) : b.lhs_lit;
  const Cell& r = b.rhs_slot ? scope.cell(combo, *b.rhs_slot) : b.rhs_lit;
  if (!l || !r) return false;
  return holds(b.op, compare_text(*l, *r));
}

Scope make_scope(const EmbeddedStore& store, const sql::ParsedQuery& q) {
  Scope s;
  for (const auto& id : q.tables()) {
    s.written.push_back(id.name);
    s.tables.push_back(&store.table(id.name));
  }
  return s;
}

std::vector<Combo> join_step(const Scope& scope, std::vector<Combo> current, std::size_t t,
                             const std::optional<sql::Expr>& on) {
  const StoredTable& next = *scope.tables[t];
  std::vector<Combo> out;
  const std::size_t limit = t + 1;
  std::optional<Bound> cond;
  if (on) cond = bind(*on, scope, limit);

  // Equality between an earlier column and a column of the new table.
  if (cond && cond->kind == sql::Expr::Kind::Compare && cond->op == sql::CompareOp::Eq &&
      cond->lhs_slot && cond->rhs_slot &&
      (cond->lhs_slot->table == t) != (cond->rhs_slot->table == t)) {
    const Slot inner = cond->lhs_slot->table == t ? *cond->lhs_slot : *cond->rhs_slot;
    const Slot outer = cond->lhs_slot->table == t ? *cond->rhs_slot : *cond->lhs_slot;
    std::unordered_map<std::string, std::vector<std::size_t>> index;
    for (std::size_t r = 0; r < next.rows.size(); ++r) {
      if (const Cell& v = next.rows[r][inner.column]) index[join_key(*v)].push_back(r);
    }
    for (auto& combo : current) {
      const Cell& v = scope.cell(combo, outer);
      if (!v) continue;
      auto it = index.find(join_key(*v));
      if (it == index.end()) continue;
      for (std::size_t r : it->second) {
        Combo c = combo;
        c[t] = r;
        out.push_back(std::move(c));
      }
    }
    return out;
  }
  for (auto& combo : current) {
    for (std::size_t r = 0; r < next.rows.size(); ++r) {
      Combo c = combo;
      c[t] = r;
      if (!cond || eval(*cond, scope, c)) out.push_back(std::move(c));
    }
  }
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Tokens for the two statements not covered by the shared grammar.
struct Token {
  enum Kind { Word, Quoted, String, Symbol } kind;
  std::string text;
};

std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < sql.size()) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '`') {
      const std::size_t end = sql.find('`', i + 1);
      if (end == std::string_view::npos) throw sql::SyntaxError(i, "unterminated identifier");
      out.push_back({Token::Quoted, std::string(sql.substr(i + 1, end - i - 1))});
      i = end + 1;
    } else if (c == '\'' || c == '"') {
      std::string text;
      std::size_t j = i + 1;
      for (;; ++j) {
        if (j >= sql.size()) throw sql::SyntaxError(i, "unterminated string");
        if (sql[j] == '\\' && j + 1 < sql.size()) {
          const char e = sql[++j];
          text.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e == '0' ? '\0' : e);
        } else if (sql[j] == c) {
          if (j + 1 < sql.size() && sql[j + 1] == c) {
            text.push_back(c);
            ++j;
          } else {
            break;
          }
        } else {
          text.push_back(sql[j]);
        }
      }
      out.push_back({Token::String, std::move(text)});
      i = j + 1;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < sql.size() &&
             (std::isalnum(static_cast<unsigned char>(sql[j])) || sql[j] == '_' || sql[j] == '$')) {
        ++j;
      }
      out.push_back({Token::Word, std::string(sql.substr(i, j - i))});
      i = j;
    } else {
      out.push_back({Token::Symbol, std::string(1, c)});
      ++i;
    }
  }
  if (!out.empty() && out.back().kind == Token::Symbol && out.back().text == ";") out.pop_back();
  return out;
}

class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> toks) : toks_(std::move(toks)) {}
  bool done() const { return pos_ >= toks_.size(); }
  bool peek_word(std::string_view w) const {
    return !done() && toks_[pos_].kind == Token::Word && iequals(toks_[pos_].text, w);
  }
  bool accept_word(std::string_view w) {
    if (!peek_word(w)) return false;
    ++pos_;
    return true;
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) throw sql::SyntaxError(pos_, "expected " + std::string(w));
  }
  std::string identifier() {
    if (done() || (toks_[pos_].kind != Token::Word && toks_[pos_].kind != Token::Quoted)) {
      throw sql::SyntaxError(pos_, "expected an identifier");
    }
    return toks_[pos_++].text;
  }
  std::string string() {
    if (done() || toks_[pos_].kind != Token::String) {
      throw sql::SyntaxError(pos_, "expected a string literal");
    }
    return toks_[pos_++].text;
  }
  const Token& next() {
    if (done()) throw sql::SyntaxError(pos_, "unexpected end of statement");
    return toks_[pos_++];
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ResultSet EmbeddedStore::execute(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  std::size_t j = i;
  while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
  const std::string first = upper(text.substr(i, j - i));
  if (first == "ALTER") return alter(text);
  if (first == "LOAD") return load(text);
  return execute(sql::parse(text));
}

ResultSet EmbeddedStore::execute(const sql::ParsedQuery& q) {
  switch (q.kind) {
    case sql::StatementKind::Select: return select(q);
    case sql::StatementKind::Delete: return remove(q);
    case sql::StatementKind::Insert: return insert(q);
  }
  throw UnsupportedOperation("statement kind");
}

ResultSet EmbeddedStore::select(const sql::ParsedQuery& q) const {
  const Scope scope = make_scope(*this, q);
  const std::size_t n = scope.tables.size();

  std::vector<Slot> projection;
  ResultSet out;
  if (q.is_star()) {
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t c = 0; c < scope.tables[t]->columns.size(); ++c) {
        projection.push_back({t, c});
        out.columns.push_back(scope.tables[t]->columns[c].name);
      }
    }
  } else {
    for (const auto& item : q.select) {
      if (item.star) throw SchemaError("'*' cannot be mixed with other select items");
      const Slot s = scope.resolve(item.column);
      projection.push_back(s);
      out.columns.push_back(scope.tables[s.table]->columns[s.column].name);
    }
  }
  std::optional<Bound> where;
  if (q.where) where = bind(*q.where, scope, n);

  std::vector<Combo> combos;
  combos.reserve(scope.tables[0]->rows.size());
  for (std::size_t r = 0; r < scope.tables[0]->rows.size(); ++r) {
    Combo c(n, 0);
    c[0] = r;
    combos.push_back(std::move(c));
  }
  for (std::size_t t = 1; t < n; ++t) combos = join_step(scope, std::move(combos), t, q.joins[t - 1].on);

  std::set<std::vector<Cell>> seen;
  for (const auto& combo : combos) {
    if (where && !eval(*where, scope, combo)) continue;
    std::vector<Cell> row;
    row.reserve(projection.size());
    for (const Slot& s : projection) row.push_back(scope.cell(combo, s));
    if (q.distinct && !seen.insert(row).second) continue;
    out.rows.push_back(std::move(row));
  }
  return out;
}

ResultSet EmbeddedStore::remove(const sql::ParsedQuery& q) {
  StoredTable& t = mutable_table(q.table.name);
  Scope scope{{q.table.name}, {&t}};
  std::optional<Bound> where;
  if (q.where) where = bind(*q.where, scope, 1);
  std::vector<std::vector<Cell>> kept;
  ResultSet out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (!where || eval(*where, scope, Combo{r})) {
      ++out.affected_rows;
    } else {
      kept.push_back(std::move(t.rows[r]));
    }
  }
  t.rows = std::move(kept);
  return out;
}

ResultSet EmbeddedStore::insert(const sql::ParsedQuery& q) {
  StoredTable& t = mutable_table(q.table.name);
  std::vector<std::size_t> targets;
  for (const auto& c : q.insert_columns) {
    const std::size_t idx = t.at(c.name);
    if (std::find(targets.begin(), targets.end(), idx) != targets.end()) {
      throw SchemaError("column " + c.name + " listed twice");
    }
    targets.push_back(idx);
  }
  std::vector<std::vector<Cell>> fresh;
  std::set<std::vector<std::string>> keys;
  for (const auto& row : t.rows) keys.insert(t.key_of(row));
  for (const auto& values : q.insert_rows) {
    if (values.size() != targets.size()) {
      throw SchemaError("INSERT row has " + std::to_string(values.size()) + " values for " +
                        std::to_string(targets.size()) + " columns");
    }
    std::vector<Cell> row(t.columns.size());
    for (std::size_t i = 0; i < values.size(); ++i) row[targets[i]] = literal_cell(values[i]);
    if (!keys.insert(t.key_of(row)).second) {
      throw ConstraintViolation(t.name + ": duplicate key in INSERT");
    }
    fresh.push_back(std::move(row));
  }
  ResultSet out;
  out.affected_rows = fresh.size();
  for (auto& row : fresh) t.rows.push_back(std::move(row));
  return out;
}

ResultSet EmbeddedStore::alter(std::string_view text) {
  TokenCursor cur(tokenize(text));
  cur.expect_word("ALTER");
  cur.expect_word("TABLE");
  StoredTable& t = mutable_table(cur.identifier());
  cur.expect_word("ADD");
  cur.accept_word("COLUMN");
  const std::string name = cur.identifier();
  if (t.find(name)) throw SchemaError(t.name + " already has a column named " + name);
  bool not_null = false;
  bool integer = false;
  std::optional<std::string> after;
  while (!cur.done()) {
    if (cur.accept_word("AFTER")) {
      after = cur.identifier();
      break;
    }
    if (cur.accept_word("NOT")) {
      cur.expect_word("NULL");
      not_null = true;
      continue;
    }
    const Token& tok = cur.next();
    if (tok.kind == Token::Word && upper(tok.text).find("INT") != std::string::npos) integer = true;
  }
  if (!cur.done()) throw sql::SyntaxError(0, "trailing tokens after AFTER clause");
  std::size_t pos = t.columns.size();
  if (after) pos = t.at(*after) + 1;
  const Cell fill = not_null ? Cell(integer ? "0" : "") : std::nullopt;
  t.columns.insert(t.columns.begin() + static_cast<std::ptrdiff_t>(pos), {name, false});
  for (auto& row : t.rows) row.insert(row.begin() + static_cast<std::ptrdiff_t>(pos), fill);
  return {};
}

ResultSet EmbeddedStore::load(std::string_view text) {
  TokenCursor cur(tokenize(text));
  cur.expect_word("LOAD");
  cur.expect_word("DATA");
  cur.accept_word("LOCAL");
  cur.expect_word("INFILE");
  const std::string path = cur.string();
  enum { Strict, Replace, Ignore } mode = Strict;
  if (cur.accept_word("REPLACE")) {
    mode = Replace;
  } else if (cur.accept_word("IGNORE")) {
    mode = Ignore;
  }
  cur.expect_word("INTO");
  cur.expect_word("TABLE");
  const std::string name = cur.identifier();
  while (!cur.done()) {
    if (cur.accept_word("FIELDS")) {
      cur.expect_word("TERMINATED");
      cur.expect_word("BY");
      if (cur.string() != "|") throw UnsupportedOperation("LOAD DATA: only '|' field terminators");
    } else if (cur.accept_word("LINES")) {
      cur.expect_word("TERMINATED");
      cur.expect_word("BY");
      if (cur.string() != "\n") throw UnsupportedOperation("LOAD DATA: only LF line terminators");
    } else {
      throw sql::SyntaxError(0, "unexpected token '" + cur.next().text + "' in LOAD DATA");
    }
  }
  const StoredTable& t = table(name);
  DataFile data = read_data_file(path, t.columns.size());
  ResultSet out;
  if (mode == Replace) {
    out.affected_rows = load_rows(name, data);
    return out;
  }
  std::set<std::vector<std::string>> keys;
  for (const auto& row : t.rows) keys.insert(t.key_of(row));
  DataFile kept;
  for (auto& row : data.rows) {
    if (keys.insert(t.key_of(row)).second) {
      kept.rows.push_back(std::move(row));
    } else if (mode == Strict) {
      throw ConstraintViolation(t.name + ": duplicate key in LOAD DATA");
    }
  }
  out.affected_rows = load_rows(name, kept);
  return out;
}

}  // namespace icdb::store
