#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "icdb/error.hpp"

namespace icdb::sql {

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : Error("syntax error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnsupportedConstruct : public Error {
 public:
  UnsupportedConstruct(std::size_t offset, const std::string& construct)
      : Error("unsupported construct at byte " + std::to_string(offset) + ": " + construct),
        offset_(offset), construct_(construct) {}
  std::size_t offset() const { return offset_; }
  const std::string& construct() const { return construct_; }

 private:
  std::size_t offset_;
  std::string construct_;
};

struct Identifier {
  std::string name;
  bool quoted = false;  // written with backticks

  bool operator==(const Identifier&) const = default;
};

struct ColumnRef {
  std::optional<Identifier> table;
  Identifier column;

  bool operator==(const ColumnRef&) const = default;
};

struct Literal {
  enum class Kind { String, Number, Null };
  Kind kind = Kind::String;
  std::string value;

  bool operator==(const Literal&) const = default;
};

enum class CompareOp { Eq, Ne, Lt, Gt, Le, Ge };

using Operand = std::variant<ColumnRef, Literal>;

struct Expr {
  enum class Kind { Compare, And, Or };
  Kind kind = Kind::Compare;
  Operand lhs;
  CompareOp op = CompareOp::Eq;
  Operand rhs;
  std::vector<Expr> children;  // And / Or: two operands
  bool parenthesized = false;

  bool operator==(const Expr&) const = default;
};

struct SelectItem {
  bool star = false;
  ColumnRef column;

  bool operator==(const SelectItem&) const = default;
};

struct JoinClause {
  enum class Kind { Comma, Inner };
  Kind kind = Kind::Comma;
  Identifier table;
  std::optional<Expr> on;

  bool operator==(const JoinClause&) const = default;
};

enum class StatementKind { Select, Delete, Insert };

struct ParsedQuery {
  StatementKind kind = StatementKind::Select;
  bool distinct = false;
  std::vector<SelectItem> select;
  Identifier table;  // first FROM table, DELETE or INSERT target
  std::vector<JoinClause> joins;
  std::optional<Expr> where;
  std::vector<Identifier> insert_columns;
  std::vector<std::vector<Literal>> insert_rows;
  bool semicolon = false;

  // Verbatim source slices. Rewrites splice these back unchanged.
  std::string source;
  std::string from_text;   // "FROM ..." through the last join
  std::string where_text;  // "WHERE ..." through the end of the condition

  bool is_star() const { return select.size() == 1 && select[0].star; }
  std::vector<Identifier> tables() const;
  // Column references in WHERE, in order of appearance (duplicates kept).
  std::vector<ColumnRef> where_columns() const;

  // Structural equality; ignores the source slices.
  bool same_ast(const ParsedQuery& other) const;
};

void collect_columns(const Expr& e, std::vector<ColumnRef>& out);

}  // namespace icdb::sql
