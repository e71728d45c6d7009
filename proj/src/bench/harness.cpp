#include "icdb/bench/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "icdb/bench/size_model.hpp"
#include "icdb/error.hpp"
#include "icdb/sql/parser.hpp"
#include "icdb/workflow.hpp"

namespace icdb::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::size_t warmup_for(std::size_t measured) { return (measured + 8) / 9; }

Stats summarize(const std::vector<double>& samples, std::size_t warmup) {
  Stats s;
  if (samples.size() <= warmup) return s;
  s.iterations = samples.size() - warmup;
  double sum = 0;
  for (std::size_t i = warmup; i < samples.size(); ++i) sum += samples[i];
  s.mean = sum / static_cast<double>(s.iterations);
  if (s.iterations > 1) {
    double sq = 0;
    for (std::size_t i = warmup; i < samples.size(); ++i) sq += (samples[i] - s.mean) * (samples[i] - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.iterations - 1));
  }
  return s;
}

Stats time_ms(const std::function<void()>& fn, std::size_t measured) {
  const std::size_t warmup = warmup_for(measured);
  std::vector<double> samples;
  samples.reserve(measured + warmup);
  for (std::size_t i = 0; i < measured + warmup; ++i) {
    const auto start = Clock::now();
    fn();
    samples.push_back(ms_between(start, Clock::now()));
  }
  return summarize(samples, warmup);
}

bool BenchResult::operator==(const BenchResult& o) const {
  return dataset == o.dataset && query == o.query && combo == o.combo && metric == o.metric &&
         stats.iterations == o.stats.iterations && stats.mean == o.stats.mean &&
         stats.stddev == o.stats.stddev;
}

std::string results_to_csv(const std::vector<BenchResult>& results) {
  std::string out = "dataset,query,combo,metric,iterations,mean,stddev,cv\n";
  for (const auto& r : results) {
    out += csv_field(r.dataset) + "," + csv_field(r.query) + "," + csv_field(r.combo) + "," +
           csv_field(r.metric) + "," + std::to_string(r.stats.iterations) + "," +
           number(r.stats.mean) + "," + number(r.stats.stddev) + "," + number(r.stats.cv()) + "\n";
  }
  return out;
}

std::vector<BenchResult> parse_results_csv(std::string_view csv) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (quoted) {
      if (c == '"' && i + 1 < csv.size() && csv[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c == '\n') {
      records.push_back(std::move(fields));
      fields.assign(1, "");
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) throw FormatError(records.size() + 1, "unterminated quoted CSV field");
  if (fields.size() > 1 || !fields[0].empty()) records.push_back(std::move(fields));
  if (records.empty() || records[0].size() != 8 || records[0][0] != "dataset") {
    throw FormatError(1, "missing benchmark CSV header");
  }
  std::vector<BenchResult> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r];
    if (f.size() != 8) throw FormatError(r + 1, "expected 8 CSV fields");
    BenchResult b{f[0], f[1], f[2], f[3], {}};
    try {
      b.stats.iterations = std::stoull(f[4]);
      b.stats.mean = std::stod(f[5]);
      b.stats.stddev = std::stod(f[6]);
    } catch (const std::exception&) {
      throw FormatError(r + 1, "malformed number");
    }
    out.push_back(std::move(b));
  }
  return out;
}

double SizeRow::ratio() const {
  if (db_bytes == 0) return icdb_bytes == 0 ? 1.0 : INFINITY;
  return static_cast<double>(icdb_bytes) / static_cast<double>(db_bytes);
}

std::vector<SizeRow> measure_sizes(const Dataset& d, const std::vector<Combo>& combos) {
  std::vector<SizeRow> out;
  for (const Combo& combo : combos) {
    const KeyMaterial& key = bench_key(combo.scheme);
    SizeRow row{combo, 0, 0, 0};
    Icrl icrl;
    for (std::size_t t = 0; t < d.tables.size(); ++t) {
      const auto schema = sql::TableSchema::from_base(d.tables[t], combo.model);
      row.db_bytes += encode_data_file(d.data[t]).size();
      row.predicted_bytes += predict_converted_size(d.data[t], d.tables[t], combo.model,
                                                    combo.scheme, icrl.next_serial(), key.config());
      row.icdb_bytes += encode_data_file(convert_data_file(d.data[t], schema, key, icrl)).size();
    }
    out.push_back(row);
  }
  return out;
}

std::vector<BenchResult> bench_size(const Dataset& d, const std::vector<Combo>& combos) {
  std::vector<BenchResult> out;
  auto exact = [](double v) { return Stats{1, v, 0}; };
  for (const auto& row : measure_sizes(d, combos)) {
    const std::string label = row.combo.label();
    out.push_back({d.profile, "", label, "db_size_bytes", exact(static_cast<double>(row.db_bytes))});
    out.push_back({d.profile, "", label, "icdb_size_bytes", exact(static_cast<double>(row.icdb_bytes))});
    out.push_back({d.profile, "", label, "size_ratio", exact(row.ratio())});
  }
  return out;
}

std::string size_table(const std::vector<SizeRow>& rows) {
  std::ostringstream out;
  out << "combination      db_bytes     icdb_bytes   predicted    ratio\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %-12zu %-12zu %-12zu %.3fx\n", r.combo.label().c_str(),
                  r.db_bytes, r.icdb_bytes, r.predicted_bytes, r.ratio());
    out << buf;
  }
  return out.str();
}

std::vector<BenchResult> bench_time(const Dataset& d, const std::vector<Combo>& combos,
                                    const TimeOptions& options) {
  std::vector<BenchResult> out;
  const std::size_t n = options.iterations;
  if (n == 0) throw DomainError("iterations must be at least 1");
  const std::size_t warmup = warmup_for(n);

  if (options.conversion) {
    for (const Combo& combo : combos) {
      const KeyMaterial& key = bench_key(combo.scheme);
      std::vector<sql::TableSchema> schemas;
      for (const auto& t : d.tables) schemas.push_back(sql::TableSchema::from_base(t, combo.model));
      const ConvertOptions copts{options.workers, {}, {}};
      Stats s = time_ms(
          [&] {
            Icrl icrl;
            for (std::size_t t = 0; t < d.tables.size(); ++t) {
              convert_data_file(d.data[t], schemas[t], key, icrl, copts);
            }
          },
          n);
      s.mean /= 1000.0;
      s.stddev /= 1000.0;
      out.push_back({d.profile, "", combo.label(), "convert_seconds", s});
    }
  }

  if (options.execution) {
    store::EmbeddedStore plain = build_plain(d);
    const Stats baseline = time_ms(
        [&] {
          for (const auto& t : d.tables) plain.execute("SELECT * FROM " + t.name + ";");
        },
        n);
    out.push_back({d.profile, "", "baseline", "exec_ms", baseline});
    for (const Combo& combo : combos) {
      IcdbFixture fx = build_icdb(d, combo.model, bench_key(combo.scheme));
      std::vector<std::string> rewritten;
      for (const auto& t : d.tables) {
        rewritten.push_back(
            sql::rewrite_select(sql::parse("SELECT * FROM " + t.name + ";"), fx.catalog).icdb_sql);
      }
      const Stats s = time_ms(
          [&] {
            for (const auto& q : rewritten) fx.store.execute(q);
          },
          n);
      out.push_back({d.profile, "", combo.label(), "exec_ms", s});
      const double ratio = baseline.mean > 0 ? s.mean / baseline.mean : 0.0;
      out.push_back({d.profile, "", combo.label(), "ratio_vs_baseline", {s.iterations, ratio, 0}});
    }
  }

  if (options.queries) {
    const auto corpus = corpus_for(d.profile);
    for (const Combo& combo : combos) {
      const KeyMaterial& key = bench_key(combo.scheme);
      IcdbFixture fx = build_icdb(d, combo.model, key);
      for (std::size_t qi = 0; qi < corpus.size(); ++qi) {
        std::vector<double> rewrite, exec, verify;
        for (std::size_t i = 0; i < n + warmup; ++i) {
          const auto outcome =
              run_select(fx.store, corpus[qi], fx.catalog, key, fx.icrl, {options.workers, {}});
          rewrite.push_back(outcome.rewrite_ms);
          exec.push_back(outcome.report.fetch_ms);
          verify.push_back(outcome.report.verify_ms);
          if (!outcome.report.all_valid()) {
            throw Error("benchmark fixture failed verification on " + corpus[qi]);
          }
        }
        const std::string label = "Q" + std::to_string(qi + 1);
        out.push_back({d.profile, label, combo.label(), "rewrite_ms", summarize(rewrite, warmup)});
        out.push_back({d.profile, label, combo.label(), "exec_ms", summarize(exec, warmup)});
        out.push_back({d.profile, label, combo.label(), "verify_ms", summarize(verify, warmup)});
      }
    }
  }
  return out;
}

const BenchResult* find_result(const std::vector<BenchResult>& results, std::string_view combo,
                               std::string_view metric, std::string_view query) {
  for (const auto& r : results) {
    if (r.combo == combo && r.metric == metric && r.query == query) return &r;
  }
  return nullptr;
}

}  // namespace icdb::bench
