#pragma once

#include <string_view>

#include "icdb/sql/rewrite.hpp"
#include "icdb/store/connector.hpp"
#include "icdb/verify_engine.hpp"

namespace icdb {

struct QueryOutcome {
  sql::RewritePlan plan;
  store::ResultSet result;
  std::optional<store::ResultSet> supplement;
  VerificationReport report;
  double rewrite_ms = 0;
};

struct WorkflowOptions {
  int workers = 1;
  CodecOptions codec;
};

// Rewrites, executes (plus the follow-up fetch when the scheme needs one) and
// verifies a SELECT.
QueryOutcome run_select(store::Connector& conn, std::string_view sql, const sql::Catalog& catalog,
                        const KeyMaterial& key, const Icrl& icrl, const WorkflowOptions& options = {});

// Fetches and verifies the doomed rows, runs the DELETE, then revokes each
// serial whose code verified VALID.
QueryOutcome run_delete(store::Connector& conn, std::string_view sql, const sql::Catalog& catalog,
                        const KeyMaterial& key, Icrl& icrl, const WorkflowOptions& options = {});

// Codes and runs an INSERT. Serials allocated for a statement the server
// rejects are revoked before the error propagates.
sql::RewritePlan run_insert(store::Connector& conn, std::string_view sql,
                            const sql::Catalog& catalog, const KeyMaterial& key, Icrl& icrl,
                            const WorkflowOptions& options = {});

// Dispatches on the statement kind.
QueryOutcome run_statement(store::Connector& conn, std::string_view sql,
                           const sql::Catalog& catalog, const KeyMaterial& key, Icrl& icrl,
                           const WorkflowOptions& options = {});

}  // namespace icdb
