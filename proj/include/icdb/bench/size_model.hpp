#pragma once

#include <cstdint>

#include "icdb/codec.hpp"
#include "icdb/crypto_schemes.hpp"
#include "icdb/data_file.hpp"
#include "icdb/sql/schema.hpp"

namespace icdb::bench {

std::size_t data_file_size(const DataFile& file);

// Exact byte size of convert_data_file's output once encoded, computed from
// the input text and the scheme's code-length formula alone. `first_serial`
// is the ICRL watermark before conversion.
std::size_t predict_converted_size(const DataFile& in, const sql::BaseTable& table,
                                   sql::Model model, SchemeId scheme, std::uint64_t first_serial,
                                   const SchemeConfig& config = {}, const CodecOptions& codec = {});

}  // namespace icdb::bench
