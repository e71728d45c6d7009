#pragma once

#include <map>
#include <string>
#include <vector>

#include "icdb/bench/dataset.hpp"
#include "icdb/convert.hpp"
#include "icdb/icrl.hpp"
#include "icdb/sql/schema.hpp"
#include "icdb/store/embedded.hpp"

namespace icdb::bench {

struct Combo {
  SchemeId scheme;
  sql::Model model;

  std::string label() const;  // e.g. "RSA_SIGN-OCF"
  bool operator==(const Combo&) const = default;
};

std::vector<Combo> all_combos();
Combo parse_combo(std::string_view text);  // "rsa-ocf", "AES_CIPHER-OCT", ...

// A converted dataset loaded into an embedded store.
struct IcdbFixture {
  sql::Catalog catalog;
  store::EmbeddedStore store;
  std::vector<DataFile> converted;  // index-aligned with the dataset tables
  Icrl icrl;
};

IcdbFixture build_icdb(const Dataset& d, sql::Model model, const KeyMaterial& key,
                       const ConvertOptions& options = {}, const std::string& ic_suffix = "_IC");

// The unconverted dataset in a store, for baseline timings.
store::EmbeddedStore build_plain(const Dataset& d);

// Deterministic per-scheme keys for benchmarks and tests.
const KeyMaterial& bench_key(SchemeId scheme, std::uint64_t seed = 1);

// The eight SELECT statements run against the world tables.
std::vector<std::string> world_select_corpus();
std::vector<std::string> world_delete_corpus();
std::vector<std::string> company_corpus();
std::vector<std::string> corpus_for(std::string_view profile);

}  // namespace icdb::bench
