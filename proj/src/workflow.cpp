#include "icdb/workflow.hpp"

#include <chrono>

#include "icdb/error.hpp"
#include "icdb/sql/parser.hpp"

namespace icdb {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void fetch_and_verify(store::Connector& conn, QueryOutcome& out, const KeyMaterial& key,
                      const Icrl& icrl, const WorkflowOptions& options) {
  const auto fetch_start = Clock::now();
  out.result = conn.execute(out.plan.icdb_sql);
  if (out.plan.needs_second_fetch(key.scheme())) {
    out.supplement = conn.execute(out.plan.second_fetch.at(0).icdb_sql);
  }
  const double fetch_ms = ms_since(fetch_start);
  VerifyOptions vopts{options.codec, out.supplement ? &*out.supplement : nullptr};
  out.report = options.workers == 1
                   ? verify_result_set(out.result, out.plan, key, icrl, vopts)
                   : verify_parallel(out.result, out.plan, key, icrl, options.workers, vopts);
  out.report.fetch_ms = fetch_ms;
}

}  // namespace

QueryOutcome run_select(store::Connector& conn, std::string_view sql, const sql::Catalog& catalog,
                        const KeyMaterial& key, const Icrl& icrl, const WorkflowOptions& options) {
  QueryOutcome out;
  const auto start = Clock::now();
  out.plan = sql::rewrite_select(sql::parse(sql), catalog);
  out.rewrite_ms = ms_since(start);
  fetch_and_verify(conn, out, key, icrl, options);
  return out;
}

QueryOutcome run_delete(store::Connector& conn, std::string_view sql, const sql::Catalog& catalog,
                        const KeyMaterial& key, Icrl& icrl, const WorkflowOptions& options) {
  QueryOutcome out;
  const auto start = Clock::now();
  out.plan = sql::plan_delete(sql::parse(sql), catalog);
  out.rewrite_ms = ms_since(start);
  fetch_and_verify(conn, out, key, icrl, options);
  const auto affected = conn.execute(out.plan.delete_sql).affected_rows;
  out.result.affected_rows = affected;
  icrl.revoke(out.report.valid_serials);
  return out;
}

sql::RewritePlan run_insert(store::Connector& conn, std::string_view sql,
                            const sql::Catalog& catalog, const KeyMaterial& key, Icrl& icrl,
                            const WorkflowOptions& options) {
  sql::RewritePlan plan = sql::plan_insert(sql::parse(sql), catalog, key, icrl, options.codec);
  try {
    conn.execute(plan.icdb_sql);
  } catch (...) {
    icrl.revoke(plan.allocated_serials);
    throw;
  }
  return plan;
}

QueryOutcome run_statement(store::Connector& conn, std::string_view sql,
                           const sql::Catalog& catalog, const KeyMaterial& key, Icrl& icrl,
                           const WorkflowOptions& options) {
  const sql::ParsedQuery q = sql::parse(sql);
  switch (q.kind) {
    case sql::StatementKind::Select: return run_select(conn, sql, catalog, key, icrl, options);
    case sql::StatementKind::Delete: return run_delete(conn, sql, catalog, key, icrl, options);
    case sql::StatementKind::Insert: {
      QueryOutcome out;
      out.plan = run_insert(conn, sql, catalog, key, icrl, options);
      out.result.affected_rows = q.insert_rows.size();
      return out;
    }
  }
  throw UnsupportedOperation("statement kind");
}

}  // namespace icdb
