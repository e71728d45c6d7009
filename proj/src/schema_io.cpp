#include "icdb/schema_io.hpp"

#include <fstream>
#include <sstream>

#include "icdb/bench/dataset.hpp"
#include "icdb/error.hpp"
#include "json.hpp"

namespace icdb {

std::string schema_to_json(const std::vector<sql::BaseTable>& tables) {
  nlohmann::ordered_json j;
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : tables) {
    nlohmann::ordered_json jt;
    jt["name"] = t.name;
    jt["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : t.columns) {
      nlohmann::ordered_json jc;
      jc["name"] = c.name;
      if (c.is_key) jc["key"] = true;
      jt["columns"].push_back(std::move(jc));
    }
    j["tables"].push_back(std::move(jt));
  }
  return j.dump(2) + "\n";
}

std::vector<sql::BaseTable> schema_from_json(std::string_view text) {
  std::vector<sql::BaseTable> out;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& jt : j.at("tables")) {
      sql::BaseTable t{jt.at("name").get<std::string>(), {}};
      for (const auto& jc : jt.at("columns")) {
        t.columns.push_back({jc.at("name").get<std::string>(), jc.value("key", false)});
      }
      // Validates names and keys.
      sql::TableSchema::from_base(t, sql::Model::Oct);
      out.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema JSON: ") + e.what());
  }
  return out;
}

std::vector<sql::BaseTable> load_schema(const std::string& source) {
  if (source.starts_with("builtin:")) return bench::builtin_schema(source.substr(8));
  std::ifstream f(source, std::ios::binary);
  if (!f) throw Error("cannot open schema file: " + source);
  std::ostringstream ss;
  ss << f.rdbuf();
  return schema_from_json(ss.str());
}

}  // namespace icdb
