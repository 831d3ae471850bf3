#include "catch_amalgamated.hpp"

#include <random>

#include "fixtures.hpp"
#include "nsql/checker.hpp"
#include "nsql/error.hpp"
#include "nsql/normalize.hpp"
#include "nsql/render.hpp"
#include "nsql/repair.hpp"
#include "oracles.hpp"

using namespace nsql;

namespace {

const DatabaseSchema& concert() { return fixtures::corpus().schema("concert_singer"); }

std::size_t column_count(const DatabaseSchema& s) {
  std::size_t n = 0;
  for (const auto& t : s.tables) n += t.columns.size();
  return n;
}

const char* kAvgFrance = "SELECT AVG ( singer.age )\nFROM singer\nWHERE singer.country = 'France'\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n";

ExampleTuple ex(Value v) { return ExampleTuple::from_values({std::move(v)}); }

ResultSet rows_of(std::vector<Row> rows) {
  ResultSet r;
  r.rows = std::move(rows);
  return r;
}

}  // namespace

TEST_CASE("execute returns rows, failures and timeouts as data") {
  auto root = fixtures::make_db("two_singers", R"(
    CREATE TABLE singer (name TEXT, age INTEGER);
    INSERT INTO singer VALUES ('Ali', 30), ('Bo', 25);
  )");
  auto db = TaskDatabase::open(root, "two_singers");
  auto count = execute(db, parse_normalized("SELECT COUNT ( * )\nFROM singer\nWHERE\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n"));
  REQUIRE(std::holds_alternative<ResultSet>(count));
  REQUIRE(std::get<ResultSet>(count).rows.size() == 1);
  CHECK(std::get<ResultSet>(count).rows[0] == Row{std::int64_t{2}});
  CHECK(std::get<ResultSet>(count).column_types[0] == ColumnType::Integer);

  auto missing = execute(db, parse_normalized("SELECT singer.height\nFROM singer\nWHERE\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n"));
  CHECK(std::holds_alternative<RuntimeFailure>(missing));

  auto big = fixtures::make_db("blowup", R"(
    CREATE TABLE a (x INTEGER);
    CREATE TABLE b (y INTEGER);
    CREATE TABLE c (z INTEGER);
    WITH RECURSIVE n(i) AS (SELECT 1 UNION ALL SELECT i + 1 FROM n WHERE i < 2000) INSERT INTO a SELECT i FROM n;
    INSERT INTO b SELECT x FROM a;
    INSERT INTO c SELECT x FROM a;
  )");
  auto slow = TaskDatabase::open(big, "blowup");
  auto cross = parse_normalized("SELECT COUNT ( * )\nFROM a JOIN b JOIN c\nWHERE\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n");
  CHECK(std::holds_alternative<Timeout>(execute(slow, cross, std::chrono::milliseconds(50))));
}

TEST_CASE("example containment") {
  ExecutionResult names = rows_of({{std::string("Ali")}, {std::string("Bo")}});
  CHECK(satisfies_examples(names, {}));
  CHECK(satisfies_examples(names, {ex(std::string("Bo"))}));
  CHECK_FALSE(satisfies_examples(names, {ex(std::string("bo"))}));
  CHECK_FALSE(satisfies_examples(names, {ex(std::string("Bo")), ex(std::string("Cy"))}));
  CHECK_FALSE(satisfies_examples(ExecutionResult{RuntimeFailure{"no such column"}}, {ex(std::string("Bo"))}));
  CHECK_FALSE(satisfies_examples(ExecutionResult{RuntimeFailure{"no such column"}}, {}));
  CHECK_FALSE(satisfies_examples(ExecutionResult{Timeout{}}, {}));
  ExecutionResult numbers = rows_of({{2.0}, {std::int64_t{3}}});
  CHECK(satisfies_examples(numbers, {ex(std::int64_t{2})}));
  CHECK(satisfies_examples(numbers, {ex(3.0)}));
  CHECK_FALSE(satisfies_examples(numbers, {ex(2.5)}));
  CHECK_FALSE(satisfies_examples(numbers, {ExampleTuple::from_values({std::int64_t{2}, std::int64_t{3}})}));
}

TEST_CASE("hamming neighbours of the average-age query") {
  auto q = parse_normalized(kAvgFrance);
  auto variants = hamming_one_queries(q, concert());
  const auto cols = column_count(concert());
  CHECK(variants.size() == 4 + 5 + 2 * (cols - 1));

  auto max = std::find_if(variants.begin(), variants.end(), [](const auto& v) { return v.replacement == "MAX"; });
  REQUIRE(max != variants.end());
  CHECK(max->text == "SELECT MAX ( singer.age )\nFROM singer\nWHERE singer.country = 'France'\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n");
  CHECK(max->cls == SubstitutionClass::Aggregation);
  CHECK(render(max->query) == max->text);

  for (const auto& v : variants) CHECK(v.text != kAvgFrance);
  for (const auto& v : variants) CHECK(v.text.find("'France'") != std::string::npos);

  auto names = hamming_one_queries(parse_normalized("SELECT singer.name\nFROM singer\nWHERE\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n"),
                                   concert());
  CHECK(names.size() == cols - 1);
  for (const auto& v : names) CHECK(v.cls == SubstitutionClass::ColumnRef);
}

TEST_CASE("lazy and eager enumeration agree") {
  auto q = parse_normalized(kAvgFrance);
  HammingOneQueries lazy(q, concert());
  std::vector<std::string> texts;
  while (auto v = lazy.next()) texts.push_back(v->text);
  auto eager = hamming_one_queries(q, concert());
  REQUIRE(texts.size() == eager.size());
  for (std::size_t i = 0; i < texts.size(); ++i) CHECK(texts[i] == eager[i].text);
}

TEST_CASE("test and repair") {
  const auto& schema = concert();
  auto db = fixtures::corpus().db("concert_singer");
  auto gold = parse_normalized(kAvgFrance);
  auto rows = std::get<ResultSet>(execute(db, gold)).rows;
  std::vector<ExampleTuple> o = {ExampleTuple::from_values(rows[0])};
  SymbolicChecker checker(schema, o[0]);

  SECTION("a passing query is accepted as is") {
    auto out = test_and_repair(gold, db, schema, o, &checker);
    CHECK(out.success);
    CHECK_FALSE(out.repaired);
    CHECK(out.text == kAvgFrance);
    CHECK(out.variants_executed == 0);
  }
  SECTION("MAX instead of AVG is repaired") {
    auto corrupted = parse_normalized(
        "SELECT MAX ( singer.age )\nFROM singer\nWHERE singer.country = 'France'\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n");
    auto out = test_and_repair(corrupted, db, schema, o, &checker);
    REQUIRE(out.success);
    CHECK(out.repaired);
    CHECK(satisfies_examples(execute(db, *out.query), o));
    CHECK(out.text == kAvgFrance);

    RepairOptions off;
    off.repair_enabled = false;
    CHECK_FALSE(test_and_repair(corrupted, db, schema, o, &checker, off).success);
  }
  SECTION("no single substitution helps") {
    auto names = parse_normalized("SELECT singer.name\nFROM singer\nWHERE\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n");
    std::vector<ExampleTuple> impossible = {ex(std::string("nobody at all"))};
    SymbolicChecker c(schema, impossible[0]);
    auto out = test_and_repair(names, db, schema, impossible, &c);
    CHECK_FALSE(out.success);
    CHECK(out.variants_generated == column_count(schema) - 1);
    CHECK(out.variants_executed + out.variants_prefiltered == out.variants_generated);

    RepairOptions keep_all;
    keep_all.prefilter = false;
    auto unfiltered = test_and_repair(names, db, schema, impossible, &c, keep_all);
    CHECK_FALSE(unfiltered.success);
    CHECK(unfiltered.variants_prefiltered == 0);
    CHECK(unfiltered.variants_executed == unfiltered.variants_generated);
  }
}

TEST_CASE("repair properties over corpus corruptions") {
  const auto& corpus = fixtures::corpus();
  std::mt19937 rng(5);
  std::size_t tried = 0;
  for (const auto& task : corpus.normalized.tasks) {
    const auto& schema = corpus.schema(task.db_id);
    auto db = corpus.db(task.db_id);
    auto o = task_examples(task, db);
    SymbolicChecker checker(schema, o.front());
    auto gold = parse_normalized(*task.gold_query);
    auto gold_lex = render_clauses(gold);

    // Minimality.
    for (const auto& v : hamming_one_queries(gold, schema)) {
      auto lex = render_clauses(v.query);
      std::size_t diffs = 0;
      for (std::size_t c = 0; c < lex.size(); ++c) {
        REQUIRE(lex[c].size() == gold_lex[c].size());
        for (std::size_t i = 0; i < lex[c].size(); ++i) {
          if (lex[c][i].text == gold_lex[c][i].text) continue;
          ++diffs;
          CHECK(lex[c][i].cls == gold_lex[c][i].cls);
          CHECK(static_cast<std::size_t>(v.clause) == c);
          CHECK(v.position == i);
          CHECK(v.replaced == gold_lex[c][i].text);
          CHECK(v.replacement == lex[c][i].text);
        }
      }
      CHECK(diffs == 1);
    }

    auto corrupt = oracle::corruptions(*task.gold_query, schema);
    std::shuffle(corrupt.begin(), corrupt.end(), rng);
    if (corrupt.size() > 4) corrupt.resize(4);
    for (const auto& c : corrupt) {
      INFO(c.text);
      NormalizedQuery q;
      try {
        q = parse_normalized(c.text);
      } catch (const Error&) {
        continue;
      }
      RepairOptions no_filter;
      no_filter.prefilter = false;
      auto out = test_and_repair(q, db, schema, o, nullptr, no_filter);
      // The gold query is one substitution away.
      REQUIRE(out.success);
      CHECK(satisfies_examples(execute(db, *out.query), o));

      auto again = test_and_repair(q, db, schema, o, nullptr, no_filter);
      CHECK(again.text == out.text);
      RepairOptions parallel = no_filter;
      parallel.workers = 4;
      CHECK(test_and_repair(q, db, schema, o, nullptr, parallel).text == out.text);
      ++tried;
    }
  }
  CHECK(tried > 100);
}

TEST_CASE("the database tester wraps repair") {
  const auto& schema = concert();
  auto db = fixtures::corpus().db("concert_singer");
  auto gold = parse_normalized(kAvgFrance);
  auto rows = std::get<ResultSet>(execute(db, gold)).rows;
  std::vector<ExampleTuple> o = {ExampleTuple::from_values(rows[0])};
  DatabaseTester tester(db, schema, o, nullptr, {});
  auto deadline = Clock::now() + std::chrono::seconds(10);
  auto ok = tester.test(kAvgFrance, deadline);
  CHECK(ok.accepted);
  CHECK_FALSE(ok.repaired);
  auto fixed = tester.test("SELECT MIN ( singer.age )\nFROM singer\nWHERE singer.country = 'France'\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n", deadline);
  CHECK(fixed.accepted);
  CHECK(fixed.repaired);
  CHECK_FALSE(tester.test("SELECT garbage\n", deadline).accepted);
}
