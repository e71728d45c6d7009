#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "icdb/bench/dataset.hpp"
#include "icdb/bench/fixture.hpp"

namespace icdb::bench {

struct Stats {
  std::size_t iterations = 0;
  double mean = 0;
  double stddev = 0;  // sample standard deviation

  double cv() const { return mean != 0 ? stddev / mean : 0.0; }
};

// Warm-up runs preceding `measured` runs so they make up the first 10%.
std::size_t warmup_for(std::size_t measured);

// Drops the first `warmup` samples.
Stats summarize(const std::vector<double>& samples, std::size_t warmup);

// Runs fn warmup_for(measured) + measured times and returns elapsed
// milliseconds over the measured runs (monotonic clock).
Stats time_ms(const std::function<void()>& fn, std::size_t measured);

struct BenchResult {
  std::string dataset;
  std::string query;  // empty unless the metric is per query
  std::string combo;  // Combo::label(), or "baseline"
  std::string metric;
  Stats stats;

  bool operator==(const BenchResult& o) const;
};

std::string results_to_csv(const std::vector<BenchResult>& results);
std::vector<BenchResult> parse_results_csv(std::string_view csv);

struct SizeRow {
  Combo combo;
  std::size_t db_bytes = 0;
  std::size_t icdb_bytes = 0;
  std::size_t predicted_bytes = 0;

  double ratio() const;
};

std::vector<SizeRow> measure_sizes(const Dataset& d, const std::vector<Combo>& combos);
std::vector<BenchResult> bench_size(const Dataset& d, const std::vector<Combo>& combos);
// Human-readable table, one line per combination.
std::string size_table(const std::vector<SizeRow>& rows);

struct TimeOptions {
  std::size_t iterations = 30;
  int workers = 1;
  bool conversion = true;
  bool execution = true;
  bool queries = true;
};

// convert_seconds per combination; exec_ms for baseline and each combination
// over SELECT * of every table, with ratio_vs_baseline; and per query of the
// profile corpus, rewrite_ms, exec_ms and verify_ms.
std::vector<BenchResult> bench_time(const Dataset& d, const std::vector<Combo>& combos,
                                    const TimeOptions& options = {});

const BenchResult* find_result(const std::vector<BenchResult>& results, std::string_view combo,
                               std::string_view metric, std::string_view query = "");

}  // namespace icdb::bench
