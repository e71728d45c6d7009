#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "icdb/sql/schema.hpp"

namespace icdb {

// {"tables":[{"name":"City","columns":[{"name":"ID","key":true},{"name":"Name"}]}]}
std::string schema_to_json(const std::vector<sql::BaseTable>& tables);
std::vector<sql::BaseTable> schema_from_json(std::string_view text);

// "builtin:world", "builtin:company", or a path to a JSON schema file.
std::vector<sql::BaseTable> load_schema(const std::string& source);

}  // namespace icdb
