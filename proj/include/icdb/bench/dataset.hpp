#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "icdb/data_file.hpp"
#include "icdb/sql/schema.hpp"

namespace icdb::bench {

// Tables and their rows, index-aligned.
struct Dataset {
  std::string profile;
  std::vector<sql::BaseTable> tables;
  std::vector<DataFile> data;

  std::size_t total_rows() const;
  const DataFile& rows_of(std::string_view table) const;
};

// Country (15 columns, key Code), City (ID), CountryLanguage (CountryCode, Language).
std::vector<sql::BaseTable> world_schema();
// employee (key ssn) and department (key dnumber).
std::vector<sql::BaseTable> company_schema();
// "world", "company", or "all" for both.
std::vector<sql::BaseTable> builtin_schema(std::string_view profile);

std::vector<std::string> profiles();  // "world", "company"

// Deterministic in (profile, rows, seed). Exactly `rows` rows in total,
// split across the profile's tables roughly like the real databases.
Dataset generate_dataset(std::string_view profile, std::size_t rows, std::uint64_t seed);

double mean_field_width(const Dataset& d);

}  // namespace icdb::bench
