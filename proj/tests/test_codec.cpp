#include <gtest/gtest.h>

#include <random>
#include <set>

#include "icdb/codec.hpp"
#include "icdb/error.hpp"
#include "icdb/icrl.hpp"

using namespace icdb;

namespace {

const KeyMaterial& key_for(SchemeId s) {
  static const KeyMaterial rsa = generate_keys(SchemeId::RsaSign, 3);
  static const KeyMaterial mac = generate_keys(SchemeId::Pbkdf2Mac, 3);
  static const KeyMaterial aes = generate_keys(SchemeId::AesCipher, 3);
  return s == SchemeId::RsaSign ? rsa : s == SchemeId::Pbkdf2Mac ? mac : aes;
}

const SchemeId kSchemes[] = {SchemeId::RsaSign, SchemeId::Pbkdf2Mac, SchemeId::AesCipher};

std::string msg(const Bytes& b) { return to_string(b); }

Icrl icrl_with(std::uint64_t n) {
  Icrl icrl;
  icrl.allocate(n);
  return icrl;
}

FieldCoordinates coords(std::string attr, std::vector<std::string> key) {
  return {"Person", std::move(attr), std::move(key)};
}

}  // namespace

TEST(FieldMessage, Layout) {
  EXPECT_EQ(msg(canonical_field_message(coords("First_Name", {"2"}), "Ben", 2)),
            "2\x1f" "First_Name\x1f" "Ben\x1f" "2");
  EXPECT_EQ(msg(canonical_field_message(coords("A", {"k1", "k2"}), "v", 10)),
            std::string("10\x1f" "A\x1fv\x1fk1\x1ek2"));
  CodecOptions bind{true};
  EXPECT_EQ(msg(canonical_field_message(coords("A", {"k"}), "v", 1, bind)),
            std::string("Person\x1f" "1\x1f" "A\x1fv\x1fk"));
}

TEST(FieldMessage, EveryPartMatters) {
  const std::string base = msg(canonical_field_message(coords("First_Name", {"2"}), "Ben", 2));
  EXPECT_NE(base, msg(canonical_field_message(coords("Last_Name", {"2"}), "Ben", 2)));
  EXPECT_NE(base, msg(canonical_field_message(coords("First_Name", {"3"}), "Ben", 2)));
  EXPECT_NE(base, msg(canonical_field_message(coords("First_Name", {"2"}), "Bob", 2)));
  EXPECT_NE(base, msg(canonical_field_message(coords("First_Name", {"2"}), "Ben", 3)));
}

TEST(FieldMessage, EmptyAndNullAreDistinct) {
  const auto empty = canonical_field_message(coords("A", {"1"}), std::string(), 1);
  const auto null = canonical_field_message(coords("A", {"1"}), std::nullopt, 1);
  const auto nul_byte = canonical_field_message(coords("A", {"1"}), std::string(1, '\0'), 1);
  EXPECT_EQ(msg(empty), std::string("1\x1f" "A\x1f\x1f" "1"));
  EXPECT_NE(empty, null);
  EXPECT_NE(null, nul_byte);
}

TEST(FieldMessage, RejectsEmptyCoordinates) {
  EXPECT_THROW(canonical_field_message(coords("A", {}), "v", 1), DomainError);
  EXPECT_THROW(canonical_field_message(coords("", {"1"}), "v", 1), DomainError);
}

TEST(Escape, FuzzRoundTrip) {
  std::mt19937 rng(4);
  const std::string alphabet = std::string("ab|\\\n") + '\x1f' + '\x1e' + '\x10' + '\0';
  for (int i = 0; i < 10000; ++i) {
    std::string s(rng() % 12, ' ');
    for (auto& c : s) c = alphabet[rng() % alphabet.size()];
    const std::string e = escape_value(s);
    ASSERT_EQ(unescape_value(e), s);
    // No bare delimiter survives escaping.
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == '\x10') {
        ++j;
        continue;
      }
      ASSERT_NE(e[j], '\x1f');
      ASSERT_NE(e[j], '\x1e');
    }
  }
  EXPECT_THROW(unescape_value(std::string("a\x10")), StructuralError);
}

TEST(FieldMessage, InjectiveOverSmallAlphabet) {
  // Every (attr, value, key) over a tiny alphabet, lengths 0..2, serial 1..2.
  const std::string alphabet = std::string("a") + '\x1f' + '\x1e' + '\x10';
  std::vector<std::string> words{""};
  for (char c : alphabet) words.emplace_back(1, c);
  for (char c : alphabet)
    for (char d : alphabet) words.push_back(std::string{c, d});
  std::set<Bytes> seen;
  std::size_t count = 0;
  for (const auto& attr : words) {
    if (attr.empty()) continue;
    for (const auto& value : words) {
      for (const auto& k1 : words) {
        for (std::uint64_t s = 1; s <= 2; ++s) {
          seen.insert(canonical_field_message(coords(attr, {k1}), value, s));
          seen.insert(canonical_field_message(coords(attr, {k1, "a"}), value, s));
          count += 2;
        }
      }
    }
    seen.insert(canonical_field_message(coords(attr, {"a"}), std::nullopt, 1));
    ++count;
  }
  EXPECT_EQ(seen.size(), count);
}

TEST(FieldMessage, RandomCollisionTrials) {
  std::mt19937_64 rng(8);
  const std::string alphabet = std::string("ab") + '\x1f' + '\x1e' + '\x10' + '\0';
  auto word = [&](std::size_t max) {
    std::string s(rng() % (max + 1), ' ');
    for (auto& c : s) c = alphabet[rng() % alphabet.size()];
    return s;
  };
  std::map<Bytes, std::tuple<std::string, Cell, std::vector<std::string>, std::uint64_t>> seen;
  for (int i = 0; i < 100000; ++i) {
    const std::string attr = "x" + word(2);
    const Cell value = rng() % 10 == 0 ? Cell() : Cell(word(3));
    std::vector<std::string> key(1 + rng() % 2);
    for (auto& k : key) k = word(2);
    const std::uint64_t serial = 1 + rng() % 20;
    const auto m = canonical_field_message(coords(attr, key), value, serial);
    const auto entry = std::make_tuple(attr, value, key, serial);
    auto [it, fresh] = seen.emplace(m, entry);
    ASSERT_TRUE(fresh || it->second == entry);
  }
}

TEST(TupleMessage, Layout) {
  const TupleImage t{"Person", {{"First_Name", "George"}, {"Last_Name", "Smith"}}};
  EXPECT_EQ(msg(canonical_tuple_message(t, 1234)), "George\x1fSmith\x1f" "1234");
  const TupleImage one{"T", {{"A", "v"}}};
  EXPECT_EQ(msg(canonical_tuple_message(one, 5)), "v\x1f" "5");
}

TEST(TupleMessage, PermutationChangesMessage) {
  const TupleImage a{"T", {{"A", "x"}, {"B", "y"}, {"C", "z"}}};
  const TupleImage b{"T", {{"A", "y"}, {"B", "x"}, {"C", "z"}}};
  EXPECT_NE(canonical_tuple_message(a, 1), canonical_tuple_message(b, 1));
}

TEST(TupleMessage, ParseInvertsCanonical) {
  std::mt19937 rng(12);
  const std::string alphabet = std::string("ab") + '\x1f' + '\x10' + '\0';
  for (int i = 0; i < 2000; ++i) {
    TupleImage t{"T", {}};
    const std::size_t arity = 1 + rng() % 4;
    for (std::size_t c = 0; c < arity; ++c) {
      if (rng() % 5 == 0) {
        t.values.emplace_back("c", std::nullopt);
      } else {
        std::string s(rng() % 4, ' ');
        for (auto& ch : s) ch = alphabet[rng() % alphabet.size()];
        t.values.emplace_back("c", s);
      }
    }
    const std::uint64_t serial = 1 + rng();
    const auto [values, s] = parse_tuple_message(canonical_tuple_message(t, serial), arity);
    ASSERT_EQ(s, serial);
    for (std::size_t c = 0; c < arity; ++c) ASSERT_EQ(values[c], t.values[c].second);
  }
  EXPECT_THROW(parse_tuple_message(to_bytes("a\x1f" "1"), 2), StructuralError);
  EXPECT_THROW(parse_tuple_message(to_bytes("a\x1f" "0"), 1), StructuralError);
}

TEST(FieldCode, OnePerFieldAndDistinct) {
  for (SchemeId s : kSchemes) {
    const KeyMaterial& key = key_for(s);
    const auto george = generate_field_code(key, coords("First_Name", {"1"}), "George", 1);
    const auto ben = generate_field_code(key, coords("First_Name", {"2"}), "Ben", 2);
    const auto bob = generate_field_code(key, coords("First_Name", {"3"}), "Bob", 3);
    EXPECT_NE(george.code, ben.code);
    EXPECT_NE(ben.code, bob.code);
    EXPECT_EQ(george.scheme, s);
    const auto smith1 = generate_field_code(key, coords("Last", {"1"}), "Smith", 7);
    const auto smith2 = generate_field_code(key, coords("Last", {"2"}), "Smith", 7);
    const auto smith3 = generate_field_code(key, coords("Last", {"1"}), "Smith", 8);
    EXPECT_NE(smith1.code, smith2.code);
    EXPECT_NE(smith1.code, smith3.code);
    EXPECT_THROW(generate_field_code(key, coords("Last", {"1"}), "Smith", 0), DomainError);
  }
}

TEST(FieldCode, Verdicts) {
  for (SchemeId s : kSchemes) {
    const KeyMaterial& key = key_for(s);
    Icrl icrl = icrl_with(10);
    const auto c = coords("Name", {"4"});
    const auto ic = generate_field_code(key, c, "Ben", 4);
    EXPECT_EQ(verify_field_code(key, c, "Ben", ic, icrl).status, Status::Valid);
    EXPECT_EQ(verify_field_code(key, c, "Bem", ic, icrl).status, Status::Forged);
    EXPECT_EQ(verify_field_code(key, coords("Name", {"5"}), "Ben", ic, icrl).status, Status::Forged);
    EXPECT_EQ(verify_field_code(key, c, std::nullopt, ic, icrl).status, Status::Forged);

    IntegrityCode short_code = ic;
    short_code.code.resize(5);
    EXPECT_EQ(verify_field_code(key, c, "Ben", short_code, icrl).status, Status::Structural);
    IntegrityCode zero = ic;
    zero.serial = 0;
    EXPECT_EQ(verify_field_code(key, c, "Ben", zero, icrl).status, Status::Structural);

    const std::uint64_t serial = 4;
    icrl.revoke(std::span(&serial, 1));
    EXPECT_EQ(verify_field_code(key, c, "Ben", ic, icrl).status, Status::Stale);
    // A forged value stays FORGED after revocation.
    EXPECT_EQ(verify_field_code(key, c, "Bem", ic, icrl).status, Status::Forged);

    const auto future = generate_field_code(key, c, "Ben", 50);
    EXPECT_EQ(verify_field_code(key, c, "Ben", future, icrl).status, Status::Stale);
  }
}

TEST(FieldCode, SchemeMismatchIsAnError) {
  const auto ic = generate_field_code(key_for(SchemeId::AesCipher), coords("A", {"1"}), "v", 1);
  EXPECT_THROW(verify_field_code(key_for(SchemeId::Pbkdf2Mac), coords("A", {"1"}), "v", ic,
                                 icrl_with(2)),
               SchemeError);
}

TEST(FieldCode, BindTableSeparatesTables) {
  const KeyMaterial& key = key_for(SchemeId::Pbkdf2Mac);
  const Icrl icrl = icrl_with(3);
  FieldCoordinates a{"A", "Name", {"1"}}, b{"B", "Name", {"1"}};
  const auto unbound = generate_field_code(key, a, "v", 1);
  EXPECT_EQ(verify_field_code(key, b, "v", unbound, icrl).status, Status::Valid);
  const auto bound = generate_field_code(key, a, "v", 1, {true});
  EXPECT_EQ(verify_field_code(key, a, "v", bound, icrl, {true}).status, Status::Valid);
  EXPECT_EQ(verify_field_code(key, b, "v", bound, icrl, {true}).status, Status::Forged);
}

TEST(TupleCode, RoundTripAndDistinctSerials) {
  const TupleImage t{"Person", {{"First_Name", "George"}, {"Last_Name", "Smith"}}};
  for (SchemeId s : kSchemes) {
    const KeyMaterial& key = key_for(s);
    const Icrl icrl = icrl_with(10);
    const auto a = generate_tuple_code(key, t, 1);
    const auto b = generate_tuple_code(key, t, 2);
    EXPECT_NE(a.code, b.code);
    const auto v = verify_tuple_code(key, t, a, icrl);
    EXPECT_EQ(v.verdict.status, Status::Valid);
    EXPECT_FALSE(v.diffs);
  }
}

TEST(TupleCode, AesRecoversOriginalTuple) {
  const KeyMaterial& key = key_for(SchemeId::AesCipher);
  const TupleImage t{"Person", {{"First_Name", "George"}, {"Last_Name", std::nullopt}}};
  const auto ic = generate_tuple_code(key, t, 1234);
  const auto [values, serial] = parse_tuple_message(recover_plaintext(key, ic.code), 2);
  EXPECT_EQ(serial, 1234u);
  EXPECT_EQ(values[0], Cell("George"));
  EXPECT_EQ(values[1], std::nullopt);
}

TEST(TupleCode, AesReportsChangedAttributes) {
  const KeyMaterial& key = key_for(SchemeId::AesCipher);
  const Icrl icrl = icrl_with(5);
  const TupleImage t{"Person", {{"First_Name", "George"}, {"Last_Name", "Smith"}}};
  const auto ic = generate_tuple_code(key, t, 1);
  TupleImage edited = t;
  edited.values[1].second = "Smyth";
  const auto v = verify_tuple_code(key, edited, ic, icrl);
  EXPECT_EQ(v.verdict.status, Status::Forged);
  ASSERT_TRUE(v.diffs);
  EXPECT_EQ(*v.diffs, std::vector<std::string>{"Last_Name"});
}

TEST(TupleCode, MacReportsNoDiffs) {
  const KeyMaterial& key = key_for(SchemeId::Pbkdf2Mac);
  const Icrl icrl = icrl_with(5);
  const TupleImage t{"Person", {{"First_Name", "George"}, {"Last_Name", "Smith"}}};
  const auto ic = generate_tuple_code(key, t, 1);
  TupleImage edited = t;
  edited.values[1].second = "Smyth";
  const auto v = verify_tuple_code(key, edited, ic, icrl);
  EXPECT_EQ(v.verdict.status, Status::Forged);
  EXPECT_FALSE(v.diffs);
}

TEST(TupleCode, RevokedSerialIsStale) {
  for (SchemeId s : kSchemes) {
    const KeyMaterial& key = key_for(s);
    Icrl icrl = icrl_with(3);
    const TupleImage t{"T", {{"A", "1"}}};
    const auto ic = generate_tuple_code(key, t, 2);
    icrl.revoke_range(2, 2);
    EXPECT_EQ(verify_tuple_code(key, t, ic, icrl).verdict.status, Status::Stale);
  }
}

// 3x3 OCF grid: each single-field edit flags exactly its own coordinate.
TEST(TamperOracle, OcfGridFlagsExactlyTheEditedField) {
  for (SchemeId s : kSchemes) {
    const KeyMaterial& key = key_for(s);
    const Icrl icrl = icrl_with(9);
    const std::vector<std::string> attrs{"Id", "First", "Last"};
    std::vector<std::vector<std::string>> grid{{"1", "George", "Smith"},
                                               {"2", "Ben", "Jones"},
                                               {"3", "Bob", "Smith"}};
    std::vector<std::vector<IntegrityCode>> codes(3);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        codes[r].push_back(generate_field_code(key, coords(attrs[c], {grid[r][0]}), grid[r][c],
                                               r * 3 + c + 1));
      }
    }
    for (std::size_t er = 0; er < 3; ++er) {
      for (std::size_t ec = 1; ec < 3; ++ec) {
        auto edited = grid;
        edited[er][ec] += "!";
        for (std::size_t r = 0; r < 3; ++r) {
          for (std::size_t c = 0; c < 3; ++c) {
            const auto v = verify_field_code(key, coords(attrs[c], {edited[r][0]}), edited[r][c],
                                             codes[r][c], icrl);
            EXPECT_EQ(v.status, (r == er && c == ec) ? Status::Forged : Status::Valid);
          }
        }
      }
    }
  }
}

TEST(TamperOracle, OctFlagsExactlyTheEditedRow) {
  for (SchemeId s : kSchemes) {
    const KeyMaterial& key = key_for(s);
    const Icrl icrl = icrl_with(3);
    std::vector<TupleImage> rows;
    for (int r = 0; r < 3; ++r) {
      rows.push_back({"T", {{"Id", std::to_string(r)}, {"A", "a" + std::to_string(r)}, {"B", "b"}}});
    }
    std::vector<IntegrityCode> codes;
    for (std::size_t r = 0; r < 3; ++r) codes.push_back(generate_tuple_code(key, rows[r], r + 1));
    for (std::size_t er = 0; er < 3; ++er) {
      for (std::size_t ec = 0; ec < 3; ++ec) {
        auto edited = rows;
        *edited[er].values[ec].second += "!";
        for (std::size_t r = 0; r < 3; ++r) {
          EXPECT_EQ(verify_tuple_code(key, edited[r], codes[r], icrl).verdict.status,
                    r == er ? Status::Forged : Status::Valid);
        }
      }
    }
  }
}

TEST(Swap, ValuesAcrossRowsAndColumnsAreForged) {
  for (SchemeId s : kSchemes) {
    const KeyMaterial& key = key_for(s);
    const Icrl icrl = icrl_with(4);
    const auto c1 = coords("Continent", {"1"}), r1 = coords("Region", {"1"});
    const auto c2 = coords("Continent", {"2"});
    const auto ic_c1 = generate_field_code(key, c1, "Asia", 1);
    const auto ic_r1 = generate_field_code(key, r1, "Southern Asia", 2);
    const auto ic_c2 = generate_field_code(key, c2, "Europe", 3);
    // Values only, within a row.
    EXPECT_EQ(verify_field_code(key, c1, "Southern Asia", ic_c1, icrl).status, Status::Forged);
    EXPECT_EQ(verify_field_code(key, r1, "Asia", ic_r1, icrl).status, Status::Forged);
    // Values with codes, within a row: the attribute name binds.
    EXPECT_EQ(verify_field_code(key, c1, "Southern Asia", ic_r1, icrl).status, Status::Forged);
    EXPECT_EQ(verify_field_code(key, r1, "Asia", ic_c1, icrl).status, Status::Forged);
    // Values with codes, within a column: the entity key binds.
    EXPECT_EQ(verify_field_code(key, c1, "Europe", ic_c2, icrl).status, Status::Forged);
    EXPECT_EQ(verify_field_code(key, c2, "Asia", ic_c1, icrl).status, Status::Forged);
  }
}
