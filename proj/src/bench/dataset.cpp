#include "icdb/bench/dataset.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>

#include "icdb/error.hpp"

namespace icdb::bench {

std::size_t Dataset::total_rows() const {
  std::size_t n = 0;
  for (const auto& d : data) n += d.rows.size();
  return n;
}

const DataFile& Dataset::rows_of(std::string_view table) const {
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (sql::iequals(tables[i].name, table)) return data[i];
  }
  throw SchemaError("dataset has no table " + std::string(table));
}

std::vector<sql::BaseTable> world_schema() {
  return {
      {"Country",
       {{"Code", true}, {"Name"}, {"Continent"}, {"Region"}, {"SurfaceArea"}, {"IndepYear"},
        {"Population"}, {"LifeExpectancy"}, {"GNP"}, {"GNPOld"}, {"LocalName"},
        {"GovernmentForm"}, {"HeadOfState"}, {"Capital"}, {"Code2"}}},
      {"City", {{"ID", true}, {"Name"}, {"CountryCode"}, {"District"}, {"Population"}}},
      {"CountryLanguage",
       {{"CountryCode", true}, {"Language", true}, {"IsOfficial"}, {"Percentage"}}},
  };
}

std::vector<sql::BaseTable> company_schema() {
  return {
      {"employee",
       {{"fname"}, {"minit"}, {"lname"}, {"ssn", true}, {"bdate"}, {"address"}, {"sex"},
        {"salary"}, {"superssn"}, {"dno"}}},
      {"department", {{"dname"}, {"dnumber", true}, {"mgrssn"}, {"mgrstartdate"}}},
  };
}

std::vector<sql::BaseTable> builtin_schema(std::string_view profile) {
  if (sql::iequals(profile, "world")) return world_schema();
  if (sql::iequals(profile, "company")) return company_schema();
  if (sql::iequals(profile, "all")) {
    auto out = world_schema();
    for (auto& t : company_schema()) out.push_back(std::move(t));
    return out;
  }
  throw SchemaError("unknown profile '" + std::string(profile) + "' (expected world, company or all)");
}

std::vector<std::string> profiles() { return {"world", "company"}; }

namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <std::size_t N>
  std::string pick(const std::array<const char*, N>& options) {
    return options[uniform(0, N - 1)];
  }

  std::string word(std::size_t min_syllables, std::size_t max_syllables) {
    static constexpr std::array<const char*, 24> kSyllables = {
        "ka", "lo", "mer", "sa", "ti", "ven", "dor", "an", "bel", "ri", "os", "tu",
        "gra", "ne", "vi", "lan", "mo", "ru", "sel", "ta", "por", "in", "ca", "ze"};
    std::string out;
    const std::size_t n = uniform(min_syllables, max_syllables);
    for (std::size_t i = 0; i < n; ++i) out += pick(kSyllables);
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
  }

  std::string words(std::size_t count, std::size_t min_syllables, std::size_t max_syllables) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) out += (i ? " " : "") + word(min_syllables, max_syllables);
    return out;
  }

  std::string decimal(std::uint64_t lo, std::uint64_t hi, int places) {
    std::string out = std::to_string(uniform(lo, hi));
    if (places > 0) {
      out += ".";
      for (int i = 0; i < places; ++i) out += static_cast<char>('0' + uniform(0, 9));
    }
    return out;
  }

  std::string date() {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", static_cast<int>(uniform(1940, 1999)),
                  static_cast<int>(uniform(1, 12)), static_cast<int>(uniform(1, 28)));
    return buf;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

std::string letters(std::size_t index, std::size_t width) {
  std::string out(width, 'A');
  for (std::size_t i = width; i-- > 0;) {
    out[i] = static_cast<char>('A' + index % 26);
    index /= 26;
  }
  return out;
}

// Distinct three-letter codes drawn from a seeded permutation.
std::vector<std::string> country_codes(Gen& g, std::size_t n) {
  constexpr std::size_t kSpace = 26 * 26 * 26;
  if (n > kSpace) throw DomainError("world profile supports at most 17576 countries");
  std::vector<std::size_t> idx(kSpace);
  for (std::size_t i = 0; i < kSpace; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), g.rng());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(letters(idx[i], 3));
  return out;
}

constexpr std::array<const char*, 7> kContinents = {
    "Asia", "Europe", "North America", "Africa", "Oceania", "Antarctica", "South America"};
constexpr std::array<const char*, 10> kRegions = {
    "Caribbean", "Southern Europe", "Western Africa", "Middle East", "Polynesia",
    "Eastern Asia", "Nordic Countries", "South America", "Melanesia", "Baltic Countries"};
constexpr std::array<const char*, 6> kGovernments = {
    "Republic", "Constitutional Monarchy", "Federal Republic", "Monarchy",
    "Dependent Territory", "Emirate Federation"};
constexpr std::array<const char*, 40> kLanguages = {
    "English", "Spanish", "French", "German", "Arabic", "Chinese", "Hindi", "Bengali",
    "Russian", "Portuguese", "Japanese", "Korean", "Turkish", "Italian", "Dutch", "Polish",
    "Swedish", "Greek", "Czech", "Hungarian", "Finnish", "Danish", "Thai", "Malay",
    "Swahili", "Zulu", "Tamil", "Urdu", "Persian", "Pashto", "Nepali", "Hebrew",
    "Vietnamese", "Romanian", "Serbian", "Croatian", "Slovak", "Latvian", "Estonian", "Maori"};

Dataset world(std::size_t rows, Gen& g) {
  Dataset d{"world", world_schema(), std::vector<DataFile>(3)};
  if (rows == 0) return d;
  std::size_t countries = std::max<std::size_t>(1, rows / 20);
  std::size_t languages = rows >= 3 ? std::max<std::size_t>(1, rows * 18 / 100) : 0;
  languages = std::min(languages, countries * kLanguages.size());
  const std::size_t cities = rows - countries - languages;

  const auto codes = country_codes(g, countries);
  for (std::size_t i = 0; i < countries; ++i) {
    const bool independent = g.chance(0.8);
    d.data[0].rows.push_back({
        codes[i], g.words(2, 2, 4), g.pick(kContinents), g.pick(kRegions), g.decimal(10, 999999, 2),
        independent ? Cell(std::to_string(g.uniform(1800, 1995))) : std::nullopt,
        std::to_string(g.uniform(1000, 99999999)), g.decimal(40, 84, 1),
        g.decimal(10, 99999, 2), g.chance(0.7) ? Cell(g.decimal(10, 99999, 2)) : std::nullopt,
        g.words(2, 2, 4), g.pick(kGovernments), g.words(2, 2, 4),
        std::to_string(g.uniform(1, std::max<std::size_t>(1, cities))), codes[i].substr(0, 2)});
  }
  for (std::size_t i = 0; i < cities; ++i) {
    d.data[1].rows.push_back({std::to_string(i + 1), g.words(2, 2, 4),
                              codes[g.uniform(0, countries - 1)], g.words(2, 2, 5),
                              std::to_string(g.uniform(1000, 99999999))});
  }
  // Pairs are unique: row i takes language (offset + i / countries) of country i % countries.
  const std::size_t offset = g.uniform(0, kLanguages.size() - 1);
  for (std::size_t i = 0; i < languages; ++i) {
    const std::size_t c = i % countries;
    const std::size_t l = (offset + c + i / countries) % kLanguages.size();
    d.data[2].rows.push_back({codes[c], std::string(kLanguages[l]), g.chance(0.3) ? "T" : "F",
                              g.decimal(0, 99, 1)});
  }
  return d;
}

Dataset company(std::size_t rows, Gen& g) {
  Dataset d{"company", company_schema(), std::vector<DataFile>(2)};
  if (rows == 0) return d;
  const std::size_t departments = rows == 1 ? 1 : std::max<std::size_t>(1, rows / 20);
  const std::size_t employees = rows - departments;
  std::vector<std::string> ssns;
  for (std::size_t i = 0; i < employees; ++i) {
    ssns.push_back(std::to_string(100000000 + i * 7919 % 899999999));
  }
  constexpr std::array<const char*, 4> kStreets = {"Fondren", "Voss", "Rice", "Stone"};
  for (std::size_t i = 0; i < employees; ++i) {
    const bool has_super = i > 0 && g.chance(0.9);
    d.data[0].rows.push_back({
        g.word(3, 6), std::string(1, static_cast<char>('A' + g.uniform(0, 25))), g.word(3, 6),
        ssns[i], g.date(),
        std::to_string(g.uniform(100, 9999)) + " " + g.pick(kStreets) + ", " + g.word(2, 4) + " TX",
        g.chance(0.5) ? "M" : "F", std::to_string(g.uniform(20, 99) * 1000) + ".00",
        has_super ? Cell(ssns[g.uniform(0, i - 1)]) : std::nullopt,
        std::to_string(g.uniform(1, departments))});
  }
  for (std::size_t i = 0; i < departments; ++i) {
    d.data[1].rows.push_back({g.words(2, 2, 4), std::to_string(i + 1),
                              employees ? Cell(ssns[g.uniform(0, employees - 1)]) : std::nullopt,
                              g.date()});
  }
  return d;
}

}  // namespace

Dataset generate_dataset(std::string_view profile, std::size_t rows, std::uint64_t seed) {
  Gen g(seed);
  if (sql::iequals(profile, "world")) return world(rows, g);
  if (sql::iequals(profile, "company")) return company(rows, g);
  throw SchemaError("unknown profile '" + std::string(profile) + "' (expected world or company)");
}

double mean_field_width(const Dataset& d) {
  std::size_t bytes = 0, fields = 0;
  for (const auto& f : d.data) {
    for (const auto& row : f.rows) {
      for (const auto& c : row) {
        bytes += encoded_field_size(c);
        ++fields;
      }
    }
  }
  return fields ? static_cast<double>(bytes) / static_cast<double>(fields) : 0.0;
}

}  // namespace icdb::bench
