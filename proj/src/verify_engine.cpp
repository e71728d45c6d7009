#include "icdb/verify_engine.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <map>

#include "json.hpp"

#include "icdb/error.hpp"
#include "icdb/parallel.hpp"

namespace icdb {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Outcome {
  std::size_t column = 0;
  std::string coordinate;
  Verdict verdict;
  std::optional<std::vector<std::string>> diffs;
  std::uint64_t serial = 0;  // set when VALID
};

std::optional<std::uint64_t> parse_serial(const Cell& cell) {
  if (!cell || cell->empty() || (*cell)[0] == '0') return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(cell->data(), cell->data() + cell->size(), v);
  if (ec != std::errc() || ptr != cell->data() + cell->size()) return std::nullopt;
  return v;
}

std::string field_coordinate(const sql::FieldCheck& f, const std::vector<Cell>& row) {
  std::string out = f.table + "." + f.attribute + "[";
  for (std::size_t i = 0; i < f.key_cols.size(); ++i) {
    if (i) out += ",";
    const std::size_t k = f.key_cols[i];
    out += k < row.size() && row[k] ? *row[k] : "?";
  }
  return out + "]";
}

std::string tuple_coordinate(const sql::TupleCheck& t, const std::vector<Cell>& row) {
  const bool ok = t.serial_col < row.size() && row[t.serial_col];
  return t.table + "[" + (ok ? *row[t.serial_col] : std::string("?")) + "]";
}

// serial text -> supplement row, one map per table of the plan.
using SupplementIndex = std::vector<std::map<std::string, std::size_t>>;

struct Context {
  const sql::RewritePlan& plan;
  const KeyMaterial& key;
  const Icrl& icrl;
  const VerifyOptions& options;
  SupplementIndex supplement;
};

Outcome check_field(const Context& ctx, const sql::FieldCheck& f, const std::vector<Cell>& row) {
  Outcome out;
  out.column = f.ic_col;
  auto fail = [&](Status s, std::string detail) {
    out.verdict = {s, std::move(detail)};
    out.coordinate = field_coordinate(f, row);
    return out;
  };
  const Cell& code_cell = row[f.ic_col];
  if (!code_cell) return fail(Status::Structural, "code cell is NULL");
  IntegrityCode ic;
  try {
    ic = sql::decode_ic_cell(*code_cell, ctx.key.scheme());
  } catch (const StructuralError& e) {
    return fail(Status::Structural, e.what());
  }
  FieldCoordinates coords{f.table, f.attribute, {}};
  coords.entity_key.reserve(f.key_cols.size());
  for (std::size_t k : f.key_cols) {
    if (!row[k]) return fail(Status::Structural, "entity key cell is NULL");
    coords.entity_key.push_back(*row[k]);
  }
  const Verdict v = verify_field_code(ctx.key, coords, row[f.value_col], ic, ctx.icrl,
                                      ctx.options.codec);
  if (v.status != Status::Valid) return fail(v.status, v.detail);
  out.serial = ic.serial;
  return out;
}

Outcome check_tuple(const Context& ctx, std::size_t t, const std::vector<Cell>& row) {
  const sql::TupleCheck& check = ctx.plan.tuples[t];
  Outcome out;
  out.column = check.ic_col;
  auto fail = [&](Status s, std::string detail) {
    out.verdict = {s, std::move(detail)};
    out.coordinate = tuple_coordinate(check, row);
    return out;
  };
  const auto serial = parse_serial(row[check.serial_col]);
  if (!serial) return fail(Status::Structural, "serial cell is missing or malformed");
  if (!row[check.ic_col]) return fail(Status::Structural, "code cell is NULL");
  IntegrityCode ic{{}, *serial, ctx.key.scheme()};
  try {
    ic.code = base64_decode(*row[check.ic_col]);
  } catch (const StructuralError& e) {
    return fail(Status::Structural, e.what());
  }

  TupleImage tuple{check.table, {}};
  tuple.values.reserve(check.attributes.size());
  if (check.complete()) {
    for (std::size_t i = 0; i < check.attributes.size(); ++i) {
      tuple.values.emplace_back(check.attributes[i], row[*check.value_cols[i]]);
    }
  } else if (ctx.key.scheme() == SchemeId::AesCipher) {
    // Open the ciphertext and compare only what was projected.
    std::vector<Cell> recovered;
    std::uint64_t inner_serial = 0;
    try {
      auto parsed = parse_tuple_message(recover_plaintext(ctx.key, ic.code),
                                        check.attributes.size(), ctx.options.codec, check.table);
      recovered = std::move(parsed.first);
      inner_serial = parsed.second;
    } catch (const StructuralError& e) {
      return fail(Status::Structural, std::string("recovered plaintext: ") + e.what());
    }
    std::vector<std::string> diffs;
    for (std::size_t i = 0; i < check.attributes.size(); ++i) {
      if (check.value_cols[i] && row[*check.value_cols[i]] != recovered[i]) {
        diffs.push_back(check.attributes[i]);
      }
    }
    if (!diffs.empty()) {
      out.diffs = std::move(diffs);
      return fail(Status::Forged, "code does not match");
    }
    if (inner_serial != *serial) {
      return fail(Status::Forged, "serial mismatch: code carries " + std::to_string(inner_serial));
    }
    if (!ctx.icrl.is_valid(*serial)) {
      return fail(Status::Stale, "serial " + std::to_string(*serial) +
                                     (*serial >= ctx.icrl.next_serial() ? " was never allocated"
                                                                        : " is revoked"));
    }
    out.serial = *serial;
    return out;
  } else {
    const auto& index = ctx.supplement.at(t);
    auto it = index.find(*row[check.serial_col]);
    if (it == index.end()) return fail(Status::Structural, "tuple absent from the follow-up fetch");
    const auto& full_row = ctx.options.supplement->rows[it->second];
    const sql::TupleCheck& full = ctx.plan.second_fetch[0].tuples[t];
    for (std::size_t i = 0; i < check.attributes.size(); ++i) {
      const Cell& v = check.value_cols[i] ? row[*check.value_cols[i]] : full_row[*full.value_cols[i]];
      tuple.values.emplace_back(check.attributes[i], v);
    }
  }
  TupleVerdict tv = verify_tuple_code(ctx.key, tuple, ic, ctx.icrl, ctx.options.codec);
  if (tv.verdict.status != Status::Valid) {
    out.diffs = std::move(tv.diffs);
    return fail(tv.verdict.status, tv.verdict.detail);
  }
  out.serial = *serial;
  return out;
}

std::size_t checks_per_row(const sql::RewritePlan& plan) {
  return plan.model == sql::Model::Ocf ? plan.fields.size() : plan.tuples.size();
}

std::vector<Outcome> verify_row(const Context& ctx, const std::vector<Cell>& row) {
  std::vector<Outcome> out;
  const auto& plan = ctx.plan;
  if (row.size() != plan.columns.size()) {
    const std::string detail = "row has " + std::to_string(row.size()) + " cells, expected " +
                               std::to_string(plan.columns.size());
    if (plan.model == sql::Model::Ocf) {
      for (const auto& f : plan.fields) {
        out.push_back({f.ic_col, f.table + "." + f.attribute + "[?]",
                       {Status::Structural, detail}, std::nullopt, 0});
      }
    } else {
      for (const auto& t : plan.tuples) {
        out.push_back({t.ic_col, t.table + "[?]", {Status::Structural, detail}, std::nullopt, 0});
      }
    }
    return out;
  }
  out.reserve(checks_per_row(plan));
  if (plan.model == sql::Model::Ocf) {
    for (const auto& f : plan.fields) out.push_back(check_field(ctx, f, row));
  } else {
    for (std::size_t t = 0; t < plan.tuples.size(); ++t) out.push_back(check_tuple(ctx, t, row));
  }
  return out;
}

Context make_context(const sql::RewritePlan& plan, const KeyMaterial& key, const Icrl& icrl,
                     const VerifyOptions& options) {
  Context ctx{plan, key, icrl, options, {}};
  if (plan.model != sql::Model::Oct || !plan.needs_second_fetch(key.scheme())) return ctx;
  if (!options.supplement) {
    throw DomainError("projection omits tuple attributes; the follow-up fetch is required");
  }
  const auto& second = plan.second_fetch.at(0);
  ctx.supplement.resize(plan.tuples.size());
  for (std::size_t r = 0; r < options.supplement->rows.size(); ++r) {
    const auto& row = options.supplement->rows[r];
    if (row.size() != second.columns.size()) continue;
    for (std::size_t t = 0; t < second.tuples.size(); ++t) {
      if (const Cell& s = row[second.tuples[t].serial_col]) ctx.supplement[t].emplace(*s, r);
    }
  }
  return ctx;
}

VerificationReport merge(std::vector<std::vector<Outcome>>& per_row) {
  VerificationReport report;
  for (std::size_t r = 0; r < per_row.size(); ++r) {
    for (auto& o : per_row[r]) {
      ++report.total;
      switch (o.verdict.status) {
        case Status::Valid:
          ++report.valid;
          report.valid_serials.push_back(o.serial);
          continue;
        case Status::Forged: ++report.forged; break;
        case Status::Stale: ++report.stale; break;
        case Status::Structural: ++report.structural; break;
      }
      report.failures.push_back(
          {r, o.column, std::move(o.coordinate), std::move(o.verdict), std::move(o.diffs)});
    }
  }
  std::stable_sort(report.failures.begin(), report.failures.end(),
                   [](const Failure& a, const Failure& b) {
                     return std::tie(a.row, a.column) < std::tie(b.row, b.column);
                   });
  std::sort(report.valid_serials.begin(), report.valid_serials.end());
  report.valid_serials.erase(std::unique(report.valid_serials.begin(), report.valid_serials.end()),
                             report.valid_serials.end());
  return report;
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

VerificationReport verify_result_set(const store::ResultSet& rows, const sql::RewritePlan& plan,
                                     const KeyMaterial& key, const Icrl& icrl,
                                     const VerifyOptions& options) {
  const auto start = Clock::now();
  const Context ctx = make_context(plan, key, icrl, options);
  std::vector<std::vector<Outcome>> per_row;
  per_row.reserve(rows.rows.size());
  for (const auto& row : rows.rows) per_row.push_back(verify_row(ctx, row));
  VerificationReport report = merge(per_row);
  report.verify_ms = ms_since(start);
  return report;
}

VerificationReport verify_parallel(const store::ResultSet& rows, const sql::RewritePlan& plan,
                                   const KeyMaterial& key, const Icrl& icrl, int workers,
                                   const VerifyOptions& options) {
  if (workers < 1) throw DomainError("worker count must be at least 1");
  const auto start = Clock::now();
  const Context ctx = make_context(plan, key, icrl, options);
  std::vector<std::vector<Outcome>> per_row(rows.rows.size());
  parallel_for(rows.rows.size(), workers,
               [&](std::size_t r) { per_row[r] = verify_row(ctx, rows.rows[r]); });
  VerificationReport report = merge(per_row);
  report.verify_ms = ms_since(start);
  return report;
}

std::string VerificationReport::to_text(bool with_timings) const {
  std::string out = "total=" + std::to_string(total) + " valid=" + std::to_string(valid) +
                    " forged=" + std::to_string(forged) + " stale=" + std::to_string(stale) +
                    " structural=" + std::to_string(structural) + "\n";
  for (const auto& f : failures) {
    out += "row " + std::to_string(f.row) + " " + f.coordinate + " " +
           std::string(status_name(f.verdict.status));
    if (!f.verdict.detail.empty()) out += ": " + f.verdict.detail;
    if (f.diffs && !f.diffs->empty()) {
      out += " (differs:";
      for (const auto& d : *f.diffs) out += " " + d;
      out += ")";
    }
    out += "\n";
  }
  if (with_timings) out += "fetch_ms=" + fixed3(fetch_ms) + " verify_ms=" + fixed3(verify_ms) + "\n";
  return out;
}

std::string VerificationReport::to_json(bool with_timings) const {
  nlohmann::ordered_json j;
  j["total"] = total;
  j["valid"] = valid;
  j["forged"] = forged;
  j["stale"] = stale;
  j["structural"] = structural;
  j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : failures) {
    nlohmann::ordered_json e;
    e["row"] = f.row;
    e["column"] = f.column;
    e["coordinate"] = f.coordinate;
    e["status"] = std::string(status_name(f.verdict.status));
    e["detail"] = f.verdict.detail;
    if (f.diffs) e["diffs"] = *f.diffs;
    j["failures"].push_back(std::move(e));
  }
  if (with_timings) j["timings"] = {{"fetch_ms", fetch_ms}, {"verify_ms", verify_ms}};
  return j.dump();
}

}  // namespace icdb
