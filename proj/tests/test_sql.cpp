#include <gtest/gtest.h>

#include "published_forms.hpp"
#include "icdb/bench/dataset.hpp"
#include "icdb/bench/fixture.hpp"
#include "icdb/codec.hpp"
#include "icdb/error.hpp"
#include "icdb/icrl.hpp"
#include "icdb/sql/parser.hpp"
#include "icdb/sql/rewrite.hpp"

using namespace icdb;
using namespace icdb::sql;

namespace {

Catalog company(Model m) { return make_catalog(bench::company_schema(), m); }
Catalog world(Model m, const std::string& suffix = "_IC") {
  return make_catalog(bench::world_schema(), m, suffix);
}

std::string squash(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  return s;
}

std::vector<std::string> all_corpus() {
  auto out = bench::world_select_corpus();
  for (const auto& q : bench::world_delete_corpus()) out.push_back(q);
  for (const auto& q : bench::company_corpus()) out.push_back(q);
  out.push_back("INSERT INTO `City` (ID, Name, CountryCode, District, Population) VALUES "
                "(4080, 'Boise', 'USA', 'Idaho', 185787);");
  return out;
}

}  // namespace

TEST(Parse, QueryOne) {
  const ParsedQuery q = parse("SELECT lname FROM employee WHERE dno = 5;");
  EXPECT_EQ(q.kind, StatementKind::Select);
  ASSERT_EQ(q.select.size(), 1u);
  EXPECT_EQ(q.select[0].column.column.name, "lname");
  EXPECT_EQ(q.table.name, "employee");
  ASSERT_EQ(q.where_columns().size(), 1u);
  EXPECT_EQ(q.where_columns()[0].column.name, "dno");
  EXPECT_TRUE(q.semicolon);
}

TEST(Parse, StarSelect) {
  const ParsedQuery q = parse("SELECT * FROM City;");
  EXPECT_TRUE(q.is_star());
  EXPECT_TRUE(q.where_columns().empty());
}

TEST(Parse, KeywordsCaseInsensitiveIdentifiersPreserved) {
  const ParsedQuery q = parse("select distinct `Name` from City where `ID`<'250' and Population >= 3");
  EXPECT_TRUE(q.distinct);
  EXPECT_TRUE(q.select[0].column.column.quoted);
  EXPECT_EQ(q.select[0].column.column.name, "Name");
  EXPECT_FALSE(q.semicolon);
  ASSERT_TRUE(q.where);
  EXPECT_EQ(q.where->kind, Expr::Kind::And);
}

TEST(Parse, PrecedenceAndParentheses) {
  const ParsedQuery q = parse("SELECT * FROM t WHERE a = 1 OR (b = 2 AND c = 3);");
  ASSERT_TRUE(q.where);
  EXPECT_EQ(q.where->kind, Expr::Kind::Or);
  EXPECT_EQ(q.where->children[1].kind, Expr::Kind::And);
  EXPECT_TRUE(q.where->children[1].parenthesized);
  const ParsedQuery r = parse("SELECT * FROM t WHERE a = 1 OR b = 2 AND c = 3;");
  EXPECT_EQ(r.where->kind, Expr::Kind::Or);
}

TEST(Parse, Joins) {
  const ParsedQuery q =
      parse("SELECT a.x FROM a INNER JOIN b ON a.k = b.k, c WHERE c.z != 'q' AND a.x <> 2;");
  ASSERT_EQ(q.joins.size(), 2u);
  EXPECT_EQ(q.joins[0].kind, JoinClause::Kind::Inner);
  EXPECT_TRUE(q.joins[0].on);
  EXPECT_EQ(q.joins[1].kind, JoinClause::Kind::Comma);
  EXPECT_EQ(q.tables().size(), 3u);
}

TEST(Parse, DeleteAndInsert) {
  const ParsedQuery d = parse("DELETE FROM `City`;");
  EXPECT_EQ(d.kind, StatementKind::Delete);
  EXPECT_FALSE(d.where);
  const ParsedQuery i = parse("INSERT INTO t (a, b) VALUES ('x', NULL), (2, 'it''s');");
  EXPECT_EQ(i.kind, StatementKind::Insert);
  ASSERT_EQ(i.insert_rows.size(), 2u);
  EXPECT_EQ(i.insert_rows[0][1].kind, Literal::Kind::Null);
  EXPECT_EQ(i.insert_rows[1][0].kind, Literal::Kind::Number);
  EXPECT_EQ(i.insert_rows[1][1].value, "it's");
}

TEST(Parse, UnsupportedConstructs) {
  for (const char* sql : {"SELECT a FROM t GROUP BY a;", "SELECT a FROM t ORDER BY a;",
                          "SELECT a FROM t LIMIT 3;", "SELECT a FROM t WHERE a IN (SELECT b FROM u);",
                          "UPDATE t SET a = 1;", "SELECT COUNT(a) FROM t;"}) {
    EXPECT_THROW(parse(sql), UnsupportedConstruct) << sql;
  }
}

TEST(Parse, SyntaxErrorsCarryOffsets) {
  try {
    parse("SELECT FROM t;");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 7u);
  }
  for (const char* sql : {"", "SELECT a FROM", "SELECT a FROM t WHERE", "SELECT a FROM t WHERE a = 'x",
                          "SELECT a FROM t; SELECT b FROM t;", "INSERT INTO t (a) VALUES (1, 2);",
                          "SELECT a, FROM t;", "SELECT a FROM t WHERE (a = 1;"}) {
    EXPECT_THROW(parse(sql), Error) << sql;
  }
}

TEST(Parse, RenderRoundTripsCorpus) {
  for (const auto& sql : all_corpus()) {
    const ParsedQuery q = parse(sql);
    EXPECT_TRUE(parse(render(q)).same_ast(q)) << sql << "\n" << render(q);
  }
}

TEST(Rewrite, QueryOneOcf) {
  const auto plan = rewrite_select(parse("SELECT lname FROM employee WHERE dno = 5;"),
                                   company(Model::Ocf));
  EXPECT_EQ(plan.icdb_sql, "SELECT lname, ssn, dno, lname_IC, dno_IC FROM employee WHERE dno = 5;");
  EXPECT_EQ(plan.fields.size(), 2u);
  EXPECT_EQ(plan.bound_columns, (std::vector<std::size_t>{1}));
}

TEST(Rewrite, QueryOneOct) {
  const auto plan = rewrite_select(parse("SELECT lname FROM employee WHERE dno = 5;"),
                                   company(Model::Oct));
  EXPECT_EQ(plan.icdb_sql, "SELECT lname, dno, Serial, IC FROM employee WHERE dno = 5;");
  ASSERT_EQ(plan.tuples.size(), 1u);
  EXPECT_FALSE(plan.tuples[0].complete());
  EXPECT_TRUE(plan.needs_second_fetch(SchemeId::Pbkdf2Mac));
  EXPECT_TRUE(plan.needs_second_fetch(SchemeId::RsaSign));
  EXPECT_FALSE(plan.needs_second_fetch(SchemeId::AesCipher));
  ASSERT_EQ(plan.second_fetch.size(), 1u);
  EXPECT_TRUE(plan.second_fetch[0].tuples[0].complete());
}

TEST(Rewrite, OctStarAddsOnlySerialAndIc) {
  const auto plan = rewrite_select(parse("SELECT * FROM City;"), world(Model::Oct));
  EXPECT_EQ(plan.icdb_sql, "SELECT ID, Name, CountryCode, District, Population, Serial, IC FROM City;");
  EXPECT_TRUE(plan.second_fetch.empty());
}

TEST(Rewrite, OctJoinHasOnePairPerTable) {
  const auto plan = rewrite_select(
      parse("SELECT Country.Name, City.Name FROM Country INNER JOIN City ON Country.Code=City.CountryCode;"),
      world(Model::Oct));
  EXPECT_EQ(plan.tuples.size(), 2u);
  const auto cols = fixture::column_set(plan.columns);
  for (const char* c : {"COUNTRY.SERIAL", "COUNTRY.IC", "CITY.SERIAL", "CITY.IC"}) {
    EXPECT_TRUE(cols.count(c)) << c;
  }
}

TEST(Rewrite, OcfJoinAddsBothKeys) {
  const auto plan = rewrite_select(parse(bench::world_select_corpus()[7]), world(Model::Ocf, "_SVC"));
  const auto cols = fixture::column_set(plan.columns);
  EXPECT_TRUE(cols.count("COUNTRY.CODE"));
  EXPECT_TRUE(cols.count("CITY.ID"));
  EXPECT_FALSE(cols.count("COUNTRY.CODE_SVC"));
}

TEST(Rewrite, WorldCorpusMatchesPublishedColumnSets) {
  const auto corpus = bench::world_select_corpus();
  const auto& published = fixture::icdb_select_lists();
  ASSERT_EQ(corpus.size(), published.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto plan = rewrite_select(parse(corpus[i]), world(Model::Ocf, "_SVC"));
    auto got = fixture::column_set(plan.columns);
    auto want = fixture::column_set(published[i]);
    for (const auto& extra : fixture::expected_extra(i + 1)) {
      EXPECT_TRUE(got.erase(extra)) << "Q" << i + 1 << " lacks expected extra " << extra;
    }
    EXPECT_EQ(got, want) << "Q" << i + 1 << ": " << plan.icdb_sql;
  }
}

TEST(Rewrite, DistinctIsKeptAndFlagged) {
  const auto plan = rewrite_select(parse(bench::world_select_corpus()[1]), world(Model::Ocf, "_SVC"));
  EXPECT_TRUE(plan.distinct);
  EXPECT_EQ(plan.icdb_sql.rfind("SELECT DISTINCT ", 0), 0u);
}

TEST(Rewrite, FromAndWherePassThroughVerbatim) {
  for (Model m : {Model::Ocf, Model::Oct}) {
    for (const auto& sql : bench::world_select_corpus()) {
      const ParsedQuery q = parse(sql);
      const ParsedQuery r = parse(rewrite_select(q, world(m)).icdb_sql);
      EXPECT_EQ(squash(r.from_text), squash(q.from_text)) << sql;
      EXPECT_EQ(squash(r.where_text), squash(q.where_text)) << sql;
      EXPECT_EQ(r.semicolon, q.semicolon);
    }
  }
}

TEST(Rewrite, NoDuplicateColumns) {
  const char* queries[] = {
      "SELECT dno, lname, dno FROM employee WHERE dno = 5 AND ssn > 3 OR dno < 9;",
      "SELECT ssn FROM employee WHERE ssn = '1';",
      "SELECT * FROM employee WHERE salary > 100;",
  };
  for (Model m : {Model::Ocf, Model::Oct}) {
    for (const char* sql : queries) {
      const auto plan = rewrite_select(parse(sql), company(m));
      const auto set = fixture::column_set(plan.columns);
      EXPECT_EQ(set.size(), plan.columns.size()) << plan.icdb_sql;
    }
  }
}

TEST(Rewrite, ChecksCoverEveryReturnedDataColumnOnce) {
  for (const auto& sql : bench::world_select_corpus()) {
    const auto plan = rewrite_select(parse(sql), world(Model::Ocf));
    std::vector<int> hits(plan.columns.size(), 0);
    for (const auto& f : plan.fields) {
      hits[f.value_col]++;
      hits[f.ic_col]++;
    }
    for (auto b : plan.bound_columns) hits[b]++;
    for (std::size_t i = 0; i < hits.size(); ++i) EXPECT_EQ(hits[i], 1) << sql << " col " << i;
  }
}

TEST(Rewrite, SchemaErrors) {
  const Catalog cat = world(Model::Ocf);
  EXPECT_THROW(rewrite_select(parse("SELECT Name FROM Country, City;"), cat), SchemaError);
  EXPECT_THROW(rewrite_select(parse("SELECT Nope FROM City;"), cat), SchemaError);
  EXPECT_THROW(rewrite_select(parse("SELECT Name_IC FROM City;"), cat), SchemaError);
  EXPECT_THROW(rewrite_select(parse("SELECT Name FROM Nowhere;"), cat), SchemaError);
  EXPECT_THROW(rewrite_select(parse("SELECT Country.Name FROM City;"), cat), SchemaError);
  EXPECT_THROW(rewrite_select(parse("SELECT *, Name FROM City;"), cat), Error);
  Catalog mixed;
  mixed.add(TableSchema::from_base(bench::world_schema()[0], Model::Ocf));
  mixed.add(TableSchema::from_base(bench::world_schema()[1], Model::Oct));
  EXPECT_THROW(rewrite_select(parse("SELECT Country.Name FROM Country, City;"), mixed), SchemaError);
}

TEST(Schema, LayoutInvariants) {
  const auto base = bench::world_schema()[1];
  const TableSchema ocf = TableSchema::from_base(base, Model::Ocf);
  EXPECT_EQ(ocf.columns().size(), 10u);
  EXPECT_EQ(ocf.columns()[ocf.ic_for(0)].name, "ID_IC");
  const TableSchema oct = TableSchema::from_base(base, Model::Oct);
  EXPECT_EQ(oct.columns().size(), 7u);
  EXPECT_EQ(oct.columns()[oct.serial_column()].name, "Serial");
  EXPECT_THROW(TableSchema::from_base(BaseTable{"t", {{"a", false}}}, Model::Ocf), SchemaError);
  EXPECT_THROW(TableSchema("t", {{"a", true}, {"b", false, true}}, Model::Ocf), SchemaError);
  EXPECT_THROW(TableSchema("t", {{"a", true}, {"Serial", false, false, true}}, Model::Oct),
               SchemaError);
}

TEST(PlanDelete, ThreePhases) {
  const auto corpus = bench::world_delete_corpus();
  const auto plan = plan_delete(parse(corpus[2]), world(Model::Ocf, "_SVC"));
  EXPECT_EQ(plan.delete_sql, corpus[2]);
  EXPECT_EQ(fixture::column_set(plan.columns),
            fixture::column_set("ID, ID_SVC, NAME, NAME_SVC, COUNTRYCODE, COUNTRYCODE_SVC, DISTRICT, "
                                "DISTRICT_SVC, POPULATION, POPULATION_SVC"));
  EXPECT_NE(plan.icdb_sql.find("WHERE `CountryCode`='ESP'"), std::string::npos);
  EXPECT_EQ(plan.post_actions, std::vector<PostAction>{PostAction::RevokeObservedSerials});

  const auto full = plan_delete(parse("DELETE FROM `City`;"), world(Model::Ocf));
  EXPECT_EQ(parse(full.icdb_sql).where, std::nullopt);
  const auto oct = plan_delete(parse(corpus[2]), world(Model::Oct));
  EXPECT_TRUE(oct.tuples[0].complete());
}

TEST(PlanInsert, OcfCodesEverySuppliedColumn) {
  const KeyMaterial key = generate_keys(SchemeId::Pbkdf2Mac, 1);
  Icrl icrl;
  const auto plan = plan_insert(parse(all_corpus().back()), world(Model::Ocf), key, icrl);
  EXPECT_EQ(plan.allocated_serials.size(), 5u);
  EXPECT_EQ(icrl.next_serial(), 6u);
  const ParsedQuery out = parse(plan.icdb_sql);
  EXPECT_EQ(out.insert_columns.size(), 10u);
  EXPECT_EQ(out.insert_columns[1].name, "ID_IC");
  const auto ic = decode_ic_cell(out.insert_rows[0][3].value, SchemeId::Pbkdf2Mac);
  EXPECT_EQ(ic.serial, 2u);
  EXPECT_EQ(verify_field_code(key, {"City", "Name", {"4080"}}, "Boise", ic, icrl).status,
            Status::Valid);
}

TEST(PlanInsert, OctAddsSerialAndIc) {
  const KeyMaterial key = generate_keys(SchemeId::AesCipher, 1);
  Icrl icrl;
  const auto plan = plan_insert(parse(all_corpus().back()), world(Model::Oct), key, icrl);
  const ParsedQuery out = parse(plan.icdb_sql);
  EXPECT_EQ(out.insert_columns.size(), 7u);
  EXPECT_EQ(out.insert_columns[5].name, "Serial");
  EXPECT_EQ(out.insert_columns[6].name, "IC");
  EXPECT_EQ(plan.allocated_serials, std::vector<std::uint64_t>{1});
}

TEST(PlanInsert, OctPartialColumnsCodeNullTokens) {
  const KeyMaterial key = generate_keys(SchemeId::AesCipher, 1);
  Icrl icrl;
  const auto plan = plan_insert(parse("INSERT INTO City (ID, Name) VALUES (7, 'X');"),
                                world(Model::Oct), key, icrl);
  const ParsedQuery out = parse(plan.icdb_sql);
  const Bytes code = base64_decode(out.insert_rows[0].back().value);
  const auto [values, serial] = parse_tuple_message(recover_plaintext(key, code), 5);
  EXPECT_EQ(values, (std::vector<Cell>{"7", "X", std::nullopt, std::nullopt, std::nullopt}));
  EXPECT_EQ(serial, 1u);
}

TEST(PlanInsert, Errors) {
  const KeyMaterial key = generate_keys(SchemeId::Pbkdf2Mac, 1);
  Icrl icrl;
  const Catalog cat = world(Model::Ocf);
  EXPECT_THROW(plan_insert(parse("INSERT INTO City (Name) VALUES ('x');"), cat, key, icrl), SchemaError);
  EXPECT_THROW(plan_insert(parse("INSERT INTO City (ID) VALUES (NULL);"), cat, key, icrl), SchemaError);
  EXPECT_THROW(plan_insert(parse("INSERT INTO City (ID, ID_IC) VALUES (1, 'x');"), cat, key, icrl),
               SchemaError);
  EXPECT_THROW(plan_insert(parse("INSERT INTO City (ID, ID) VALUES (1, 1);"), cat, key, icrl),
               SchemaError);
  EXPECT_EQ(icrl.next_serial(), 1u);
}

TEST(IcCell, EncodeDecode) {
  const IntegrityCode ic{Bytes{1, 2, 3}, 42, SchemeId::AesCipher};
  EXPECT_EQ(encode_ic_cell(ic), "AQID:42");
  const auto back = decode_ic_cell("AQID:42", SchemeId::AesCipher);
  EXPECT_EQ(back.code, ic.code);
  EXPECT_EQ(back.serial, 42u);
  for (const char* bad : {"AQID", "AQID:", "AQID:0", "AQID:x1", "AQI:4", "AQID:01"}) {
    EXPECT_THROW(decode_ic_cell(bad, SchemeId::AesCipher), StructuralError) << bad;
  }
}
