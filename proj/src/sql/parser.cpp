#include "icdb/sql/parser.hpp"

#include <array>
#include <cctype>

#include "icdb/sql/schema.hpp"

namespace icdb::sql {

namespace {

enum class Tok { Ident, QuotedIdent, String, Number, Symbol, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // unquoted content for identifiers and strings
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.begin = i;
    if (ident_start(c)) {
      while (i < s.size() && ident_char(s[i])) ++i;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(t.begin, i - t.begin));
    } else if (c == '`') {
      ++i;
      while (i < s.size() && s[i] != '`') t.text.push_back(s[i++]);
      if (i == s.size()) throw SyntaxError(t.begin, "unterminated quoted identifier");
      ++i;
      if (t.text.empty()) throw SyntaxError(t.begin, "empty quoted identifier");
      t.kind = Tok::QuotedIdent;
    } else if (c == '\'' || c == '"') {
      const char q = c;
      ++i;
      bool closed = false;
      while (i < s.size()) {
        if (s[i] == '\\') {
          if (i + 1 == s.size()) break;
          const char e = s[i + 1];
          switch (e) {
            case 'n': t.text.push_back('\n'); break;
            case 't': t.text.push_back('\t'); break;
            case 'r': t.text.push_back('\r'); break;
            case '0': t.text.push_back('\0'); break;
            default: t.text.push_back(e); break;
          }
          i += 2;
        } else if (s[i] == q) {
          if (i + 1 < s.size() && s[i + 1] == q) {
            t.text.push_back(q);
            i += 2;
          } else {
            ++i;
            closed = true;
            break;
          }
        } else {
          t.text.push_back(s[i++]);
        }
      }
      if (!closed) throw SyntaxError(t.begin, "unterminated string literal");
      t.kind = Tok::String;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])) &&
                (out.empty() || out.back().kind == Tok::Op ||
                 (out.back().kind == Tok::Symbol && out.back().text != ")")))) {
      ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      t.kind = Tok::Number;
      t.text = std::string(s.substr(t.begin, i - t.begin));
    } else if (c == '<' || c == '>' || c == '=' || c == '!') {
      ++i;
      if (i < s.size() && (s[i] == '=' || (c == '<' && s[i] == '>'))) ++i;
      t.kind = Tok::Op;
      t.text = std::string(s.substr(t.begin, i - t.begin));
      if (t.text == "!") throw SyntaxError(t.begin, "unexpected '!'");
    } else if (c == '(' || c == ')' || c == ',' || c == '.' || c == '*' || c == ';') {
      ++i;
      t.kind = Tok::Symbol;
      t.text = std::string(1, c);
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      throw UnsupportedConstruct(i, "comment");
    } else if (c == '?') {
      throw UnsupportedConstruct(i, "prepared-statement parameter");
    } else {
      throw SyntaxError(i, std::string("unexpected character '") + c + "'");
    }
    t.end = i;
    out.push_back(std::move(t));
  }
  Token end;
  end.begin = end.end = s.size();
  out.push_back(end);
  return out;
}

constexpr std::array kReserved = {"SELECT", "DISTINCT", "FROM",   "WHERE",  "AND",    "OR",
                                  "INNER",  "JOIN",     "ON",     "DELETE", "INSERT", "INTO",
                                  "VALUES", "GROUP",    "ORDER",  "BY",     "HAVING", "LIMIT",
                                  "UNION",  "NOT",      "IN",     "LIKE",   "BETWEEN", "IS",
                                  "LEFT",   "RIGHT",    "OUTER",  "CROSS",  "AS",     "NULL",
                                  "UPDATE", "SET",      "EXISTS", "OFFSET", "NATURAL", "FULL"};

bool is_reserved(std::string_view word) {
  for (const char* k : kReserved) {
    if (iequals(word, k)) return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view sql) : src_(sql), toks_(lex(sql)) {}

  ParsedQuery parse_statement() {
    ParsedQuery q;
    q.source = std::string(src_);
    if (keyword("SELECT")) {
      parse_select(q);
    } else if (keyword("DELETE")) {
      parse_delete(q);
    } else if (keyword("INSERT")) {
      parse_insert(q);
    } else if (peek().kind == Tok::Ident) {
      throw UnsupportedConstruct(peek().begin, upper(peek().text) + " statement");
    } else {
      fail("expected SELECT, DELETE or INSERT");
    }
    if (symbol(";")) q.semicolon = true;
    if (peek().kind != Tok::End) {
      if (peek().kind == Tok::Ident) reject_trailing_clause();
      fail("unexpected trailing input");
    }
    return q;
  }

 private:
  static std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  std::size_t last_end() const { return pos_ == 0 ? 0 : toks_[pos_ - 1].end; }

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(peek().begin, what); }

  bool at_keyword(std::string_view kw, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && iequals(peek(ahead).text, kw);
  }
  bool keyword(std::string_view kw) {
    if (!at_keyword(kw)) return false;
    advance();
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!keyword(kw)) fail("expected " + std::string(kw));
  }
  bool symbol(std::string_view s) {
    if (peek().kind != Tok::Symbol || peek().text != s) return false;
    advance();
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!symbol(s)) fail("expected '" + std::string(s) + "'");
  }

  void reject_trailing_clause() const {
    static constexpr std::array clauses = {"GROUP", "ORDER", "HAVING", "LIMIT", "UNION", "OFFSET"};
    for (const char* c : clauses) {
      if (at_keyword(c)) throw UnsupportedConstruct(peek().begin, upper(peek().text));
    }
  }

  Identifier identifier(const char* what) {
    const Token& t = peek();
    if (t.kind == Tok::QuotedIdent) {
      advance();
      return {t.text, true};
    }
    if (t.kind == Tok::Ident && !is_reserved(t.text)) {
      advance();
      return {t.text, false};
    }
    if (t.kind == Tok::Ident && at_keyword("SELECT")) throw UnsupportedConstruct(t.begin, "subquery");
    fail(std::string("expected ") + what);
  }

  ColumnRef column_ref() {
    const std::size_t at = peek().begin;
    Identifier first = identifier("column name");
    if (peek().kind == Tok::Symbol && peek().text == "(") {
      throw UnsupportedConstruct(at, "function call " + first.name + "()");
    }
    if (symbol(".")) {
      if (peek().kind == Tok::Symbol && peek().text == "*") {
        throw UnsupportedConstruct(peek().begin, "qualified star");
      }
      Identifier col = identifier("column name");
      return {std::move(first), std::move(col)};
    }
    return {std::nullopt, std::move(first)};
  }

  void reject_alias() const {
    if (at_keyword("AS")) throw UnsupportedConstruct(peek().begin, "alias");
    if (peek().kind == Tok::QuotedIdent || (peek().kind == Tok::Ident && !is_reserved(peek().text))) {
      throw UnsupportedConstruct(peek().begin, "alias");
    }
  }

  void parse_select(ParsedQuery& q) {
    q.kind = StatementKind::Select;
    q.distinct = keyword("DISTINCT");
    if (symbol("*")) {
      q.select.push_back({true, {}});
    } else {
      do {
        q.select.push_back({false, column_ref()});
        reject_alias();
      } while (symbol(","));
    }
    if (!at_keyword("FROM")) fail("expected FROM");
    const std::size_t from_begin = peek().begin;
    advance();
    q.table = table_name();
    for (;;) {
      if (symbol(",")) {
        q.joins.push_back({JoinClause::Kind::Comma, table_name(), std::nullopt});
      } else if (at_keyword("INNER") || at_keyword("JOIN")) {
        keyword("INNER");
        expect_keyword("JOIN");
        Identifier t = table_name();
        expect_keyword("ON");
        q.joins.push_back({JoinClause::Kind::Inner, std::move(t), expr()});
      } else if (at_keyword("LEFT") || at_keyword("RIGHT") || at_keyword("CROSS") ||
                 at_keyword("NATURAL") || at_keyword("FULL") || at_keyword("OUTER")) {
        throw UnsupportedConstruct(peek().begin, upper(peek().text) + " JOIN");
      } else {
        break;
      }
    }
    q.from_text = std::string(src_.substr(from_begin, last_end() - from_begin));
    parse_where(q);
    reject_trailing_clause();
  }

  Identifier table_name() {
    if (symbol("(")) throw UnsupportedConstruct(toks_[pos_ - 1].begin, "derived table");
    Identifier id = identifier("table name");
    if (symbol(".")) throw UnsupportedConstruct(toks_[pos_ - 1].begin, "schema-qualified table");
    reject_alias();
    return id;
  }

  void parse_where(ParsedQuery& q) {
    if (!at_keyword("WHERE")) return;
    const std::size_t begin = peek().begin;
    advance();
    q.where = expr();
    q.where_text = std::string(src_.substr(begin, last_end() - begin));
  }

  void parse_delete(ParsedQuery& q) {
    q.kind = StatementKind::Delete;
    expect_keyword("FROM");
    q.table = table_name();
    parse_where(q);
    reject_trailing_clause();
  }

  void parse_insert(ParsedQuery& q) {
    q.kind = StatementKind::Insert;
    expect_keyword("INTO");
    q.table = table_name();
    expect_symbol("(");
    do {
      q.insert_columns.push_back(identifier("column name"));
    } while (symbol(","));
    expect_symbol(")");
    if (at_keyword("SELECT")) throw UnsupportedConstruct(peek().begin, "INSERT ... SELECT");
    expect_keyword("VALUES");
    do {
      const std::size_t at = peek().begin;
      expect_symbol("(");
      std::vector<Literal> row;
      do {
        row.push_back(literal());
      } while (symbol(","));
      expect_symbol(")");
      if (row.size() != q.insert_columns.size()) {
        throw SyntaxError(at, "VALUES has " + std::to_string(row.size()) + " items for " +
                                  std::to_string(q.insert_columns.size()) + " columns");
      }
      q.insert_rows.push_back(std::move(row));
    } while (symbol(","));
  }

  Literal literal() {
    const Token& t = peek();
    if (t.kind == Tok::String) {
      advance();
      return {Literal::Kind::String, t.text};
    }
    if (t.kind == Tok::Number) {
      advance();
      return {Literal::Kind::Number, t.text};
    }
    if (at_keyword("NULL")) {
      advance();
      return {Literal::Kind::Null, {}};
    }
    fail("expected literal");
  }

  Expr expr() {
    Expr left = and_expr();
    while (keyword("OR")) {
      Expr node;
      node.kind = Expr::Kind::Or;
      node.children.push_back(std::move(left));
      node.children.push_back(and_expr());
      left = std::move(node);
    }
    return left;
  }

  Expr and_expr() {
    Expr left = primary();
    while (keyword("AND")) {
      Expr node;
      node.kind = Expr::Kind::And;
      node.children.push_back(std::move(left));
      node.children.push_back(primary());
      left = std::move(node);
    }
    return left;
  }

  Expr primary() {
    if (at_keyword("NOT") || at_keyword("EXISTS")) {
      throw UnsupportedConstruct(peek().begin, upper(peek().text));
    }
    if (peek().kind == Tok::Symbol && peek().text == "(") {
      if (at_keyword("SELECT", 1)) throw UnsupportedConstruct(peek(1).begin, "subquery");
      advance();
      Expr inner = expr();
      expect_symbol(")");
      inner.parenthesized = true;
      return inner;
    }
    Expr e;
    e.kind = Expr::Kind::Compare;
    e.lhs = operand();
    if (at_keyword("IN") || at_keyword("LIKE") || at_keyword("BETWEEN") || at_keyword("IS") ||
        at_keyword("NOT")) {
      throw UnsupportedConstruct(peek().begin, upper(peek().text) + " predicate");
    }
    if (peek().kind != Tok::Op) fail("expected comparison operator");
    const std::string op = advance().text;
    if (op == "=") e.op = CompareOp::Eq;
    else if (op == "!=" || op == "<>") e.op = CompareOp::Ne;
    else if (op == "<") e.op = CompareOp::Lt;
    else if (op == ">") e.op = CompareOp::Gt;
    else if (op == "<=") e.op = CompareOp::Le;
    else if (op == ">=") e.op = CompareOp::Ge;
    else throw SyntaxError(toks_[pos_ - 1].begin, "unknown operator " + op);
    e.rhs = operand();
    return e;
  }

  Operand operand() {
    const Token& t = peek();
    if (t.kind == Tok::String || t.kind == Tok::Number || at_keyword("NULL")) return literal();
    if (t.kind == Tok::Symbol && t.text == "(" && at_keyword("SELECT", 1)) {
      throw UnsupportedConstruct(peek(1).begin, "subquery");
    }
    return column_ref();
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string_view op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Gt: return ">";
    case CompareOp::Le: return "<=";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

std::string render_operand(const Operand& o) {
  if (const auto* c = std::get_if<ColumnRef>(&o)) return render(*c);
  return render(std::get<Literal>(o));
}

}  // namespace

ParsedQuery parse(std::string_view sql) { return Parser(sql).parse_statement(); }

std::string render(const Identifier& id) { return id.quoted ? "`" + id.name + "`" : id.name; }

std::string render(const ColumnRef& c) {
  return c.table ? render(*c.table) + "." + render(c.column) : render(c.column);
}

std::string render(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Null: return "NULL";
    case Literal::Kind::Number: return l.value;
    case Literal::Kind::String: break;
  }
  std::string out = "'";
  for (char c : l.value) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '\0') {
      out += "\\0";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string render(const Expr& e) {
  std::string out;
  switch (e.kind) {
    case Expr::Kind::Compare:
      out = render_operand(e.lhs) + " " + std::string(op_text(e.op)) + " " + render_operand(e.rhs);
      break;
    case Expr::Kind::And:
      out = render(e.children.at(0)) + " AND " + render(e.children.at(1));
      break;
    case Expr::Kind::Or:
      out = render(e.children.at(0)) + " OR " + render(e.children.at(1));
      break;
  }
  return e.parenthesized ? "(" + out + ")" : out;
}

std::string render(const ParsedQuery& q) {
  std::string out;
  switch (q.kind) {
    case StatementKind::Select: {
      out = q.distinct ? "SELECT DISTINCT " : "SELECT ";
      for (std::size_t i = 0; i < q.select.size(); ++i) {
        if (i) out += ", ";
        out += q.select[i].star ? "*" : render(q.select[i].column);
      }
      out += " FROM " + render(q.table);
      for (const auto& j : q.joins) {
        if (j.kind == JoinClause::Kind::Comma) {
          out += ", " + render(j.table);
        } else {
          out += " INNER JOIN " + render(j.table) + " ON " + render(*j.on);
        }
      }
      break;
    }
    case StatementKind::Delete:
      out = "DELETE FROM " + render(q.table);
      break;
    case StatementKind::Insert: {
      out = "INSERT INTO " + render(q.table) + " (";
      for (std::size_t i = 0; i < q.insert_columns.size(); ++i) {
        if (i) out += ", ";
        out += render(q.insert_columns[i]);
      }
      out += ") VALUES ";
      for (std::size_t r = 0; r < q.insert_rows.size(); ++r) {
        if (r) out += ", ";
        out += "(";
        for (std::size_t i = 0; i < q.insert_rows[r].size(); ++i) {
          if (i) out += ", ";
          out += render(q.insert_rows[r][i]);
        }
        out += ")";
      }
      break;
    }
  }
  if (q.where) out += " WHERE " + render(*q.where);
  if (q.semicolon) out += ";";
  return out;
}

std::vector<Identifier> ParsedQuery::tables() const {
  std::vector<Identifier> out{table};
  for (const auto& j : joins) out.push_back(j.table);
  return out;
}

void collect_columns(const Expr& e, std::vector<ColumnRef>& out) {
  if (e.kind == Expr::Kind::Compare) {
    if (const auto* c = std::get_if<ColumnRef>(&e.lhs)) out.push_back(*c);
    if (const auto* c = std::get_if<ColumnRef>(&e.rhs)) out.push_back(*c);
    return;
  }
  for (const auto& child : e.children) collect_columns(child, out);
}

std::vector<ColumnRef> ParsedQuery::where_columns() const {
  std::vector<ColumnRef> out;
  if (where) collect_columns(*where, out);
  return out;
}

bool ParsedQuery::same_ast(const ParsedQuery& o) const {
  return kind == o.kind && distinct == o.distinct && select == o.select && table == o.table &&
         joins == o.joins && where == o.where && insert_columns == o.insert_columns &&
         insert_rows == o.insert_rows && semicolon == o.semicolon;
}

}  // namespace icdb::sql
