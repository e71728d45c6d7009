#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icdb/codec.hpp"
#include "icdb/crypto_schemes.hpp"
#include "icdb/icrl.hpp"
#include "icdb/sql/rewrite.hpp"
#include "icdb/store/connector.hpp"

namespace icdb {

struct Failure {
  std::size_t row = 0;
  std::size_t column = 0;   // result column of the code being checked
  std::string coordinate;   // "Table.Attr[key]" (OCF) or "Table[serial]" (OCT)
  Verdict verdict;
  std::optional<std::vector<std::string>> diffs;

  bool operator==(const Failure&) const = default;
};

struct VerificationReport {
  std::uint64_t total = 0;
  std::uint64_t valid = 0;
  std::uint64_t forged = 0;
  std::uint64_t stale = 0;
  std::uint64_t structural = 0;
  std::vector<Failure> failures;  // ordered by (row, column)
  double fetch_ms = 0;
  double verify_ms = 0;

  bool all_valid() const { return failures.empty(); }
  // Serials of checks that came back VALID, ascending and unique.
  std::vector<std::uint64_t> valid_serials;

  std::string to_text(bool with_timings = true) const;
  std::string to_json(bool with_timings = true) const;
  // Everything except timings; equal across worker counts.
  std::string canonical() const { return to_json(false); }
};

struct VerifyOptions {
  CodecOptions codec;
  // Rows of plan.second_fetch[0], used to complete OCT tuples the primary
  // projection left partial.
  const store::ResultSet* supplement = nullptr;
};

// Serial reference implementation.
VerificationReport verify_result_set(const store::ResultSet& rows, const sql::RewritePlan& plan,
                                     const KeyMaterial& key, const Icrl& icrl,
                                     const VerifyOptions& options = {});

// Same report for any worker count. Throws DomainError when workers < 1.
VerificationReport verify_parallel(const store::ResultSet& rows, const sql::RewritePlan& plan,
                                   const KeyMaterial& key, const Icrl& icrl, int workers,
                                   const VerifyOptions& options = {});

}  // namespace icdb
