#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icdb/bench/fixture.hpp"

namespace icdb::bench {

enum class AttackClass { Forgery, Substitution, OldData, Insertion, Deletion };

std::string_view attack_class_name(AttackClass c);

struct AttackCell {
  Combo combo;
  AttackClass cls;
  std::string variant;
  std::size_t attempts = 0;
  std::size_t detected = 0;
  std::size_t stale = 0;  // detections whose verdict was STALE
};

struct AttackMatrix {
  std::vector<AttackCell> cells;

  // Every attempt detected except deletions, none of which are.
  bool matches_expected() const;
  std::string to_text() const;
};

struct AttackSuiteOptions {
  std::string profile = "world";
  std::size_t rows = 300;
  std::uint64_t seed = 7;
  std::vector<Combo> combos = all_combos();
  // Attacks per table for insertion and deletion.
  std::size_t samples_per_table = 5;
};

// Forgery (value and code), substitution (value only and value with code,
// within a row and within a column), replay of deleted rows, insertion
// without the key, and deletion, swept over every coordinate of the fixture.
AttackMatrix run_attack_suite(const AttackSuiteOptions& options = {});

}  // namespace icdb::bench
