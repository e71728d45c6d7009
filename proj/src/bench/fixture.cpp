#include "icdb/bench/fixture.hpp"

#include <map>
#include <mutex>

#include "icdb/error.hpp"

namespace icdb::bench {

std::string Combo::label() const {
  std::string m(sql::model_name(model));
  for (char& c : m) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return std::string(scheme_name(scheme)) + "-" + m;
}

std::vector<Combo> all_combos() {
  std::vector<Combo> out;
  for (SchemeId s : {SchemeId::RsaSign, SchemeId::Pbkdf2Mac, SchemeId::AesCipher}) {
    for (sql::Model m : {sql::Model::Ocf, sql::Model::Oct}) out.push_back({s, m});
  }
  return out;
}

Combo parse_combo(std::string_view text) {
  const std::size_t dash = text.rfind('-');
  if (dash == std::string_view::npos) {
    throw SchemeError("combination '" + std::string(text) + "' should look like rsa-ocf");
  }
  return {parse_scheme(text.substr(0, dash)), sql::parse_model(text.substr(dash + 1))};
}

IcdbFixture build_icdb(const Dataset& d, sql::Model model, const KeyMaterial& key,
                       const ConvertOptions& options, const std::string& ic_suffix) {
  IcdbFixture fx;
  for (std::size_t t = 0; t < d.tables.size(); ++t) {
    const auto schema = sql::TableSchema::from_base(d.tables[t], model, ic_suffix);
    fx.converted.push_back(convert_data_file(d.data[t], schema, key, fx.icrl, options));
    fx.store.create_table(schema);
    fx.store.load_rows(schema.name(), fx.converted.back());
    fx.catalog.add(schema);
  }
  return fx;
}

store::EmbeddedStore build_plain(const Dataset& d) {
  store::EmbeddedStore s;
  for (std::size_t t = 0; t < d.tables.size(); ++t) {
    s.create_table(d.tables[t]);
    s.load_rows(d.tables[t].name, d.data[t]);
  }
  return s;
}

const KeyMaterial& bench_key(SchemeId scheme, std::uint64_t seed) {
  static std::mutex mu;
  static std::map<std::pair<SchemeId, std::uint64_t>, KeyMaterial> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({scheme, seed});
  if (it == cache.end()) it = cache.emplace(std::pair{scheme, seed}, generate_keys(scheme, seed)).first;
  return it->second;
}

std::vector<std::string> world_select_corpus() {
  return {
      "SELECT * FROM City;",
      "SELECT DISTINCT ID, Name, Population FROM City WHERE `CountryCode`='NLD';",
      "SELECT Code, Name, Region FROM Country;",
      "SELECT ID, Name, District FROM City WHERE `ID`<'250';",
      "SELECT * FROM CountryLanguage WHERE `Language`='English' OR (`Language`='Spanish' AND "
      "`IsOfficial`='T');",
      "SELECT * FROM Country;",
      "SELECT * FROM CountryLanguage;",
      "SELECT Country.Name, Country.Continent, Country.Population, City.Name, City.Population "
      "FROM Country INNER JOIN City ON Country.Code=City.CountryCode;",
  };
}

std::vector<std::string> world_delete_corpus() {
  return {
      "DELETE FROM `Country` WHERE `Continent`='Asia' OR `Continent`='Europe';",
      "DELETE FROM `Country` WHERE `IndepYear`<'1950';",
      "DELETE FROM `City` WHERE `CountryCode`='ESP';",
      "DELETE FROM `CountryLanguage` WHERE `IsOfficial`='T' AND `Percentage`<'50';",
      "DELETE FROM `Country`;",
      "DELETE FROM `City` WHERE `Population`<'10000';",
      "DELETE FROM `CountryLanguage`;",
      "DELETE FROM `CountryLanguage` WHERE `CountryCode`!='ABW' AND `CountryCode`!='AFG' AND "
      "`CountryCode`!='AGO';",
      "DELETE FROM `City`;",
  };
}

std::vector<std::string> company_corpus() {
  return {
      "SELECT lname FROM employee WHERE dno = 5;",
      "SELECT * FROM employee;",
      "SELECT fname, lname, salary FROM employee WHERE salary > 50000 AND sex = 'F';",
      "SELECT employee.lname, department.dname FROM employee INNER JOIN department ON "
      "employee.dno = department.dnumber;",
      "SELECT * FROM department;",
  };
}

std::vector<std::string> corpus_for(std::string_view profile) {
  if (sql::iequals(profile, "world")) return world_select_corpus();
  if (sql::iequals(profile, "company")) return company_corpus();
  throw SchemaError("unknown profile '" + std::string(profile) + "'");
}

}  // namespace icdb::bench
