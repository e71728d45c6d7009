#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "icdb/bench/attack_suite.hpp"
#include "icdb/bench/harness.hpp"
#include "icdb/convert.hpp"
#include "icdb/error.hpp"
#include "icdb/schema_io.hpp"
#include "icdb/sql/parser.hpp"
#include "icdb/store/attacks.hpp"
#include "icdb/store/embedded.hpp"
#include "icdb/workflow.hpp"

namespace fs = std::filesystem;
using namespace icdb;

namespace {

constexpr int kOk = 0;
constexpr int kIntegrityFailure = 1;
constexpr int kUsage = 2;

struct Options {
  std::string scheme = "pbkdf2";
  std::string model = "ocf";
  std::string suffix = "_IC";
  std::string keys;
  std::string icrl;
  std::string schema = "builtin:all";
  std::string dsn;
  std::string embedded;
  std::string out = "text";
  int workers = 1;
  bool bind_table = false;

  std::optional<std::uint64_t> seed;
  std::string sql;
  std::string table;
  std::vector<std::string> tables;
  std::string in_path, out_path, in_dir, out_dir, result_path;
  std::string key_text, column, value;
  bool set_null = false;
  std::optional<std::uint64_t> salt_seed;
  std::string profile = "world";
  std::size_t rows = 1000;
  std::size_t iterations = 30;
  std::vector<std::string> combos;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("failed writing " + path);
}

KeyMaterial require_keys(const Options& o) {
  if (o.keys.empty()) throw Error("--keys is required");
  return load_key_file(o.keys);
}

Icrl open_icrl(const Options& o) {
  if (o.icrl.empty()) throw Error("--icrl is required");
  return fs::exists(o.icrl) ? Icrl::load(o.icrl) : Icrl{};
}

sql::Catalog catalog_of(const Options& o) {
  return sql::make_catalog(load_schema(o.schema), sql::parse_model(o.model), o.suffix);
}

std::string table_file(const std::string& dir, const std::string& table) {
  return (fs::path(dir) / (table + ".txt")).string();
}

store::EmbeddedStore open_embedded(const Options& o, const sql::Catalog& catalog) {
  store::EmbeddedStore s;
  for (const auto& t : catalog.tables()) {
    s.create_table(t);
    const std::string path = table_file(o.embedded, t.name());
    if (fs::exists(path)) s.load_rows(t.name(), read_data_file(path, t.columns().size()));
  }
  return s;
}

void persist_embedded(const Options& o, const store::EmbeddedStore& s) {
  for (const auto& name : s.table_names()) {
    const std::string path = table_file(o.embedded, name);
    if (fs::exists(path) || !s.table(name).rows.empty()) write_data_file(path, s.dump(name));
  }
}

std::unique_ptr<store::Connector> external(const Options& o) {
  std::string dsn = o.dsn;
  if (dsn.empty()) {
    if (const char* env = std::getenv("ICDB_DSN")) dsn = env;
  }
  if (dsn.empty()) throw Error("no database: pass --embedded DIR, --dsn or set ICDB_DSN");
  return store::connect(dsn);
}

void print_rows(const store::ResultSet& rs) {
  for (std::size_t i = 0; i < rs.columns.size(); ++i) std::cout << (i ? "\t" : "") << rs.columns[i];
  if (!rs.columns.empty()) std::cout << "\n";
  for (const auto& row : rs.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "\t" : "") << row[i].value_or("NULL");
    std::cout << "\n";
  }
}

int report_exit(const VerificationReport& r) { return r.all_valid() ? kOk : kIntegrityFailure; }

void print_report(const Options& o, const VerificationReport& r) {
  std::cout << (o.out == "json" ? r.to_json() + "\n" : r.to_text());
}

std::vector<bench::Combo> combos_of(const Options& o) {
  if (o.combos.empty()) return bench::all_combos();
  std::vector<bench::Combo> out;
  for (const auto& c : o.combos) out.push_back(bench::parse_combo(c));
  return out;
}

void print_results(const Options& o, const std::vector<bench::BenchResult>& results,
                   const std::string& text) {
  if (o.out == "csv") {
    std::cout << bench::results_to_csv(results);
  } else if (o.out == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : results) {
      j.push_back({{"dataset", r.dataset}, {"query", r.query}, {"combo", r.combo},
                   {"metric", r.metric}, {"iterations", r.stats.iterations},
                   {"mean", r.stats.mean}, {"stddev", r.stats.stddev}, {"cv", r.stats.cv()}});
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

void warn_if_ecb(SchemeId s) {
  if (s == SchemeId::AesCipher) {
    std::cerr << "warning: AES_CIPHER uses ECB mode; equal blocks leak equality and the codes "
                 "carry no authentication beyond padding checks\n";
  }
}

// ---- subcommands ----

int cmd_keygen(const Options& o) {
  const SchemeId scheme = parse_scheme(o.scheme);
  warn_if_ecb(scheme);
  if (o.keys.empty()) throw Error("--keys is required");
  save_key_file(generate_keys(scheme, o.seed), o.keys);
  std::cout << "wrote " << scheme_name(scheme) << " key to " << o.keys << "\n";
  return kOk;
}

int cmd_convert_schema(const Options& o) {
  const sql::Model model = sql::parse_model(o.model);
  for (const auto& t : load_schema(o.schema)) {
    if (!o.table.empty() && !sql::iequals(t.name, o.table)) continue;
    for (const auto& stmt : emit_schema_ddl(t, model, o.suffix)) std::cout << stmt << "\n";
  }
  return kOk;
}

int cmd_convert_data(const Options& o) {
  const sql::Catalog catalog = catalog_of(o);
  const KeyMaterial key = require_keys(o);
  warn_if_ecb(key.scheme());
  Icrl icrl = open_icrl(o);
  ConvertOptions copts{o.workers, {o.bind_table}, o.salt_seed};
  std::vector<std::pair<std::string, std::string>> jobs;  // (in, out) per table
  std::vector<const sql::TableSchema*> schemas;
  if (!o.table.empty()) {
    if (o.in_path.empty() || o.out_path.empty()) throw Error("--table needs --in and --out");
    schemas.push_back(&catalog.at(o.table));
    jobs.emplace_back(o.in_path, o.out_path);
  } else {
    if (o.in_dir.empty() || o.out_dir.empty()) {
      throw Error("pass --table with --in/--out, or --in-dir and --out-dir");
    }
    fs::create_directories(o.out_dir);
    for (const auto& t : catalog.tables()) {
      const std::string in = table_file(o.in_dir, t.name());
      if (!fs::exists(in)) continue;
      schemas.push_back(&t);
      jobs.emplace_back(in, table_file(o.out_dir, t.name()));
    }
  }
  std::vector<std::pair<std::string, std::string>> loads;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& schema = *schemas[i];
    const DataFile in = read_data_file(jobs[i].first, schema.base().columns.size());
    write_data_file(jobs[i].second, convert_data_file(in, schema, key, icrl, copts));
    loads.emplace_back(schema.name(), fs::absolute(jobs[i].second).string());
    std::cerr << schema.name() << ": " << in.rows.size() << " rows converted\n";
  }
  icrl.save(o.icrl);
  std::cout << emit_load_statements(loads);
  return kOk;
}

int cmd_rewrite(const Options& o) {
  const sql::Catalog catalog = catalog_of(o);
  const sql::ParsedQuery q = sql::parse(o.sql);
  switch (q.kind) {
    case sql::StatementKind::Select: {
      const auto plan = sql::rewrite_select(q, catalog);
      std::cout << plan.icdb_sql << "\n";
      if (!plan.second_fetch.empty()) {
        std::cout << "-- follow-up fetch for MAC/signature schemes:\n"
                  << plan.second_fetch[0].icdb_sql << "\n";
      }
      return kOk;
    }
    case sql::StatementKind::Delete: {
      const auto plan = sql::plan_delete(q, catalog);
      std::cout << plan.icdb_sql << "\n" << plan.delete_sql << "\n";
      return kOk;
    }
    case sql::StatementKind::Insert: {
      const KeyMaterial key = require_keys(o);
      Icrl icrl = open_icrl(o);
      const auto plan = sql::plan_insert(q, catalog, key, icrl, {o.bind_table});
      icrl.save(o.icrl);
      std::cout << plan.icdb_sql << "\n";
      return kOk;
    }
  }
  return kUsage;
}

int cmd_query(const Options& o) {
  const sql::Catalog catalog = catalog_of(o);
  const KeyMaterial key = require_keys(o);
  Icrl icrl = open_icrl(o);
  const WorkflowOptions wopts{o.workers, {o.bind_table}};
  std::optional<store::EmbeddedStore> embedded;
  std::unique_ptr<store::Connector> ext;
  store::Connector* conn = nullptr;
  if (!o.embedded.empty()) {
    embedded = open_embedded(o, catalog);
    conn = &*embedded;
  } else {
    ext = external(o);
    conn = ext.get();
  }
  const QueryOutcome out = run_statement(*conn, o.sql, catalog, key, icrl, wopts);
  if (out.plan.kind != sql::StatementKind::Select) {
    icrl.save(o.icrl);
    if (embedded) persist_embedded(o, *embedded);
  }
  if (out.plan.kind == sql::StatementKind::Insert) {
    std::cout << "inserted " << out.result.affected_rows << " row(s), "
              << out.plan.allocated_serials.size() << " serial(s) allocated\n";
    return kOk;
  }
  if (o.out == "json") {
    nlohmann::ordered_json j;
    j["columns"] = out.result.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : out.result.rows) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (const auto& c : row) r.push_back(c ? nlohmann::ordered_json(*c) : nlohmann::ordered_json());
      j["rows"].push_back(std::move(r));
    }
    j["report"] = nlohmann::ordered_json::parse(out.report.to_json());
    std::cout << j.dump() << "\n";
  } else {
    print_rows(out.result);
    if (out.plan.kind == sql::StatementKind::Delete) {
      std::cout << "deleted " << out.result.affected_rows << " row(s), revoked "
                << out.report.valid_serials.size() << " serial(s)\n";
    }
    std::cout << out.report.to_text();
  }
  return report_exit(out.report);
}

int cmd_verify(const Options& o) {
  const sql::Catalog catalog = catalog_of(o);
  const KeyMaterial key = require_keys(o);
  const Icrl icrl = open_icrl(o);
  const VerifyOptions vopts{{o.bind_table}, nullptr};

  if (!o.result_path.empty()) {
    if (o.sql.empty()) throw Error("--result needs the SELECT that produced it (--sql)");
    const auto plan = sql::rewrite_select(sql::parse(o.sql), catalog);
    if (plan.needs_second_fetch(key.scheme())) {
      throw Error("this projection needs a follow-up fetch; verify through `icdb query` instead");
    }
    const auto rs = store::parse_batch_output(read_file(o.result_path));
    const auto report = verify_parallel(rs, plan, key, icrl, o.workers, vopts);
    print_report(o, report);
    return report_exit(report);
  }

  std::optional<store::EmbeddedStore> embedded;
  std::unique_ptr<store::Connector> ext;
  store::Connector* conn = nullptr;
  if (!o.embedded.empty()) {
    embedded = open_embedded(o, catalog);
    conn = &*embedded;
  } else {
    ext = external(o);
    conn = ext.get();
  }
  std::vector<std::string> tables = o.tables;
  if (tables.empty()) {
    for (const auto& t : catalog.tables()) {
      if (!embedded || fs::exists(table_file(o.embedded, t.name()))) tables.push_back(t.name());
    }
  }
  VerificationReport total;
  int code = kOk;
  for (const auto& t : tables) {
    const auto out = run_select(*conn, "SELECT * FROM " + t + ";", catalog, key, icrl,
                                {o.workers, {o.bind_table}});
    if (o.out != "json") std::cout << "== " << t << "\n";
    print_report(o, out.report);
    if (!out.report.all_valid()) code = kIntegrityFailure;
  }
  return code;
}

int cmd_tamper(const Options& o) {
  if (o.embedded.empty()) throw Error("tamper works on an --embedded directory");
  const sql::Catalog catalog = catalog_of(o);
  store::EmbeddedStore s = open_embedded(o, catalog);
  store::RowKey key;
  std::stringstream ss(o.key_text);
  for (std::string part; std::getline(ss, part, ',');) key.push_back(part);
  store::attack_forge(s, o.table, key, o.column, o.set_null ? Cell() : Cell(o.value));
  persist_embedded(o, s);
  std::cout << "forged " << o.table << "." << o.column << "\n";
  return kOk;
}

int cmd_bench_size(const Options& o) {
  const auto d = bench::generate_dataset(o.profile, o.rows, o.seed.value_or(1));
  const auto combos = combos_of(o);
  const auto rows = bench::measure_sizes(d, combos);
  print_results(o, bench::bench_size(d, combos), bench::size_table(rows));
  for (const auto& r : rows) {
    if (r.icdb_bytes != r.predicted_bytes) return kIntegrityFailure;
  }
  return kOk;
}

int cmd_bench_time(const Options& o) {
  const auto d = bench::generate_dataset(o.profile, o.rows, o.seed.value_or(1));
  bench::TimeOptions topts;
  topts.iterations = o.iterations;
  topts.workers = o.workers;
  const auto results = bench::bench_time(d, combos_of(o), topts);
  std::ostringstream text;
  for (const auto& r : results) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-4s %-16s %-18s mean=%-12.6g sd=%-10.4g cv=%.3f n=%zu\n",
                  r.query.c_str(), r.combo.c_str(), r.metric.c_str(), r.stats.mean,
                  r.stats.stddev, r.stats.cv(), r.stats.iterations);
    text << buf;
  }
  print_results(o, results, text.str());
  return kOk;
}

int cmd_attack(const Options& o) {
  bench::AttackSuiteOptions aopts;
  aopts.profile = o.profile;
  aopts.rows = o.rows;
  aopts.seed = o.seed.value_or(7);
  aopts.combos = combos_of(o);
  const auto matrix = bench::run_attack_suite(aopts);
  std::cout << matrix.to_text();
  return matrix.matches_expected() ? kOk : kIntegrityFailure;
}

int cmd_gen_dataset(const Options& o) {
  if (o.out_dir.empty()) throw Error("--out-dir is required");
  const auto d = bench::generate_dataset(o.profile, o.rows, o.seed.value_or(1));
  fs::create_directories(o.out_dir);
  for (std::size_t t = 0; t < d.tables.size(); ++t) {
    write_data_file(table_file(o.out_dir, d.tables[t].name), d.data[t]);
  }
  write_file((fs::path(o.out_dir) / "schema.json").string(), schema_to_json(d.tables));
  std::cout << "wrote " << d.total_rows() << " rows in " << d.tables.size() << " tables to "
            << o.out_dir << " (mean field width " << bench::mean_field_width(d) << " bytes)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrity coded database toolchain"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c, bool keys, bool icrl, bool db) {
    c->add_option("--model", o.model, "ocf or oct")->capture_default_str();
    c->add_option("--suffix", o.suffix, "IC column suffix under OCF")->capture_default_str();
    c->add_option("--schema", o.schema, "schema JSON or builtin:world|company|all")
        ->capture_default_str();
    c->add_flag("--bind-table", o.bind_table, "include the table name in code messages");
    if (keys) c->add_option("--keys", o.keys, "key file");
    if (icrl) c->add_option("--icrl", o.icrl, "ICRL file (created when missing)");
    if (db) {
      c->add_option("--dsn", o.dsn, "exec:<command> or mysql://user:pw@host:port/db (or ICDB_DSN)");
      c->add_option("--embedded", o.embedded, "directory of converted <Table>.txt files");
      c->add_option("--workers", o.workers, "verification workers")->check(CLI::PositiveNumber);
      c->add_option("--out", o.out, "text or json")->check(CLI::IsMember({"text", "json"}));
    }
  };
  auto bench_opts = [&](CLI::App* c) {
    c->add_option("--profile", o.profile, "world or company")->capture_default_str();
    c->add_option("--rows", o.rows, "total rows")->capture_default_str();
    c->add_option("--seed", o.seed, "generator seed");
    c->add_option("--combo", o.combos, "scheme-model pairs such as rsa-ocf (default: all six)");
    c->add_option("--out", o.out, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
  };

  auto* keygen = app.add_subcommand("keygen", "generate a key file");
  keygen->add_option("--scheme", o.scheme, "rsa, pbkdf2 or aes")->capture_default_str();
  keygen->add_option("--keys", o.keys, "output key file")->required();
  keygen->add_option("--seed", o.seed, "deterministic test key (not for real use)");

  auto* cschema = app.add_subcommand("convert-schema", "emit ALTER TABLE statements");
  common(cschema, false, false, false);
  cschema->add_option("--table", o.table, "only this table");

  auto* cdata = app.add_subcommand("convert-data", "add integrity codes to data files");
  common(cdata, true, true, false);
  cdata->add_option("--table", o.table, "table of the single input file");
  cdata->add_option("--in", o.in_path, "input data file");
  cdata->add_option("--out", o.out_path, "output data file");
  cdata->add_option("--in-dir", o.in_dir, "directory of <Table>.txt inputs");
  cdata->add_option("--out-dir", o.out_dir, "directory for converted files");
  cdata->add_option("--workers", o.workers, "conversion workers")->check(CLI::PositiveNumber);
  cdata->add_option("--salt-seed", o.salt_seed, "derive PBKDF2 salts for reproducible output");

  auto* rewrite = app.add_subcommand("rewrite", "print the ICDB form of a statement");
  common(rewrite, true, true, false);
  rewrite->add_option("sql", o.sql, "statement")->required();

  auto* query = app.add_subcommand("query", "run a statement and verify the response");
  common(query, true, true, true);
  query->add_option("sql", o.sql, "statement")->required();

  auto* verify = app.add_subcommand("verify", "verify whole tables or a saved result");
  common(verify, true, true, true);
  verify->add_option("--table", o.tables, "tables to verify (default: all)");
  verify->add_option("--result", o.result_path, "mysql --batch output to verify");
  verify->add_option("--sql", o.sql, "SELECT whose ICDB form produced --result");

  auto* tamper = app.add_subcommand("tamper", "overwrite one cell of an embedded table");
  common(tamper, false, false, false);
  tamper->add_option("--embedded", o.embedded, "directory of converted files")->required();
  tamper->add_option("--table", o.table)->required();
  tamper->add_option("--key", o.key_text, "key values, comma separated")->required();
  tamper->add_option("--column", o.column)->required();
  tamper->add_option("--value", o.value);
  tamper->add_flag("--null", o.set_null, "store NULL");

  auto* bsize = app.add_subcommand("bench-size", "converted vs original size per combination");
  bench_opts(bsize);

  auto* btime = app.add_subcommand("bench-time", "conversion, execution and verification timings");
  bench_opts(btime);
  btime->add_option("--iterations", o.iterations, "measured iterations")->capture_default_str();
  btime->add_option("--workers", o.workers, "verification workers")->check(CLI::PositiveNumber);

  auto* attack = app.add_subcommand("attack", "run the attack suite and print the matrix");
  bench_opts(attack);

  auto* gen = app.add_subcommand("gen-dataset", "write a synthetic dataset");
  bench_opts(gen);
  gen->add_option("--out-dir", o.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*keygen) return cmd_keygen(o);
    if (*cschema) return cmd_convert_schema(o);
    if (*cdata) return cmd_convert_data(o);
    if (*rewrite) return cmd_rewrite(o);
    if (*query) return cmd_query(o);
    if (*verify) return cmd_verify(o);
    if (*tamper) return cmd_tamper(o);
    if (*bsize) return cmd_bench_size(o);
    if (*btime) return cmd_bench_time(o);
    if (*attack) return cmd_attack(o);
    if (*gen) return cmd_gen_dataset(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
