#pragma once

#include <string>
#include <string_view>

#include "icdb/sql/ast.hpp"

namespace icdb::sql {

// Grammar:
//   SELECT [DISTINCT] (* | col {, col}) FROM t {, t | [INNER] JOIN t ON expr} [WHERE expr]
//   DELETE FROM t [WHERE expr]
//   INSERT INTO t (col {, col}) VALUES (lit {, lit}) {, (...)}
//   expr: comparisons (= != <> < > <= >=) combined with AND / OR and parentheses
// Keywords are case-insensitive. Throws SyntaxError or UnsupportedConstruct.
ParsedQuery parse(std::string_view sql);

std::string render(const ParsedQuery& q);
std::string render(const Expr& e);
std::string render(const Identifier& id);
std::string render(const ColumnRef& c);
std::string render(const Literal& l);

}  // namespace icdb::sql
