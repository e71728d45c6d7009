#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icdb/codec.hpp"
#include "icdb/crypto_schemes.hpp"
#include "icdb/sql/ast.hpp"
#include "icdb/sql/schema.hpp"

namespace icdb {
class Icrl;
}

namespace icdb::sql {

// One OCF check: the value in column `value_col` against the code in `ic_col`,
// keyed by the entity key read from `key_cols`. Indices refer to result columns.
struct FieldCheck {
  std::string table;      // schema spelling
  std::string attribute;  // schema spelling
  std::size_t value_col = 0;
  std::size_t ic_col = 0;
  std::vector<std::size_t> key_cols;
};

// One OCT check per returned row and table. `value_cols[i]` locates
// `attributes[i]` in the result, or is empty when the projection left it out.
struct TupleCheck {
  std::string table;
  std::vector<std::string> attributes;  // all data columns, schema order
  std::vector<std::optional<std::size_t>> value_cols;
  std::size_t serial_col = 0;
  std::size_t ic_col = 0;

  bool complete() const;
};

enum class PostAction { RevokeObservedSerials };

struct RewritePlan {
  StatementKind kind = StatementKind::Select;
  Model model = Model::Ocf;
  std::string icdb_sql;              // SELECT to run; phase-1 SELECT for DELETE; INSERT text
  std::vector<std::string> columns;  // rendered select list of icdb_sql
  std::vector<FieldCheck> fields;
  std::vector<TupleCheck> tuples;
  // Key columns returned only to supply entity keys; covered through the
  // field codes that embed them.
  std::vector<std::size_t> bound_columns;
  // DISTINCT was kept; injected key columns can change which rows collapse.
  bool distinct = false;

  // OCT projections that omit attributes. Signature and MAC codes need the
  // full tuple, fetched by this follow-up plan; AES codes open directly.
  std::vector<RewritePlan> second_fetch;

  std::string delete_sql;  // DELETE phase 2, verbatim
  std::vector<PostAction> post_actions;
  std::vector<std::uint64_t> allocated_serials;  // INSERT

  bool needs_second_fetch(SchemeId scheme) const {
    return !second_fetch.empty() && scheme != SchemeId::AesCipher;
  }
};

RewritePlan rewrite_select_ocf(const ParsedQuery& q, const Catalog& schemas);
RewritePlan rewrite_select_oct(const ParsedQuery& q, const Catalog& schemas);
// Dispatches on the model of the referenced tables, which must agree.
RewritePlan rewrite_select(const ParsedQuery& q, const Catalog& schemas);

// Phase 1: verified fetch of the doomed rows; phase 2: the DELETE itself;
// phase 3: revoke every serial observed in phase 1.
RewritePlan plan_delete(const ParsedQuery& q, const Catalog& schemas);

// Allocates serials from `icrl` and computes codes for every supplied value.
RewritePlan plan_insert(const ParsedQuery& q, const Catalog& schemas, const KeyMaterial& key,
                        Icrl& icrl, const CodecOptions& options = {});

// OCF code cell: "<base64>:<serial>".
std::string encode_ic_cell(const IntegrityCode& ic);
// Throws StructuralError when the cell is malformed.
IntegrityCode decode_ic_cell(std::string_view cell, SchemeId scheme);

}  // namespace icdb::sql
