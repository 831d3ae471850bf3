#include "catch_amalgamated.hpp"

#include "fixtures.hpp"
#include "nsql/error.hpp"
#include "nsql/exact_match.hpp"
#include "nsql/normalize.hpp"
#include "nsql/partial.hpp"
#include "nsql/render.hpp"
#include "nsql/rewrite.hpp"
#include "nsql/sql_lexer.hpp"
#include "oracles.hpp"

using namespace nsql;

namespace {

const DatabaseSchema& concert() { return fixtures::corpus().schema("concert_singer"); }

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::ConfigError;
}

const char* kAvgFrance =
    "SELECT AVG ( singer.age )\n"
    "FROM singer\n"
    "WHERE singer.country = 'France'\n"
    "GROUP BY\n"
    "HAVING\n"
    "ORDER BY\n"
    "LIMIT\n";

}  // namespace

TEST_CASE("aliases are replaced by table names") {
  auto q = normalize("SELECT t1.name FROM singer AS t1", concert());
  REQUIRE(q.select.size() == 1);
  CHECK(q.select[0].ref.table == "singer");
  CHECK(q.select[0].ref.column == "name");
  CHECK(q.from_tables == std::vector<std::string>{"singer"});
  CHECK(render(q).substr(0, 19) == "SELECT singer.name\n");
}

TEST_CASE("unqualified columns are resolved against FROM") {
  auto q = normalize("select Name from SINGER where age > 30", concert());
  CHECK(render(q) == "SELECT singer.name\nFROM singer\nWHERE singer.age > 30\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n");
  CHECK(code_of([] { normalize("SELECT name FROM singer JOIN stadium ON singer.singer_id = stadium.stadium_id",
                               concert()); }) == Errc::AmbiguousColumn);
  CHECK(code_of([] { normalize("SELECT nope FROM singer", concert()); }) == Errc::UnknownName);
  CHECK(code_of([] { normalize("SELECT singer.name FROM singr", concert()); }) == Errc::UnknownName);
}

TEST_CASE("unsupported shapes") {
  CHECK(code_of([] { normalize("SELECT a.name FROM singer a JOIN singer b ON a.age = b.age", concert()); }) ==
        Errc::SelfJoinUnsupported);
  CHECK(code_of([] { normalize("SELECT name FROM singer UNION SELECT name FROM stadium", concert()); }) ==
        Errc::SetOperationUnsupported);
  CHECK(code_of([] { normalize("SELECT name FROM singer LEFT JOIN concert", concert()); }) == Errc::ParseError);
  CHECK(code_of([] { normalize("SELECT name FROM singer WHERE age > (SELECT avg(age) FROM singer)", concert()); }) ==
        Errc::ParseError);
  CHECK(code_of([] { normalize("SELECT name FROM singer LIMIT 1 OFFSET 2", concert()); }) == Errc::ParseError);
  CHECK(code_of([] { normalize("SELECT name FROM singer garbage garbage", concert()); }) == Errc::ParseError);
}

TEST_CASE("rendering puts each clause on its own line") {
  auto q = normalize("SELECT avg(age) FROM singer WHERE country = 'France'", concert());
  auto text = render(q);
  CHECK(text == kAvgFrance);
  CHECK(render(q) == text);
  auto partial = parse_partial(text, true);
  CHECK(partial.is_complete);
  CHECK(render(parse_normalized(text)) == text);
  CHECK(executable_sql(text) == "SELECT AVG ( singer.age )\nFROM singer\nWHERE singer.country = 'France'\n");
}

TEST_CASE("render details") {
  auto q = normalize(
      "SELECT DISTINCT T2.name, count(*) FROM concert AS T1 JOIN stadium AS T2 ON T1.stadium_id = T2.stadium_id "
      "WHERE T1.year = 'It''s' OR T1.year > 2013 AND T2.capacity BETWEEN 1 AND 5 "
      "GROUP BY T2.name HAVING count(*) >= 1 ORDER BY T2.name LIMIT 3",
      concert());
  CHECK(render(q) ==
        "SELECT DISTINCT stadium.name , COUNT ( * )\n"
        "FROM concert JOIN stadium ON concert.stadium_id = stadium.stadium_id\n"
        "WHERE concert.year = 'It''s' OR concert.year > 2013 AND stadium.capacity BETWEEN 1 AND 5\n"
        "GROUP BY stadium.name\n"
        "HAVING COUNT ( * ) >= 1\n"
        "ORDER BY stadium.name ASC\n"
        "LIMIT 3\n");
  auto nested = normalize("SELECT name FROM singer WHERE (age < 30 OR age > 40) AND is_male = 1", concert());
  CHECK(render(nested).find("WHERE ( singer.age < 30 OR singer.age > 40 ) AND singer.is_male = 1\n") !=
        std::string::npos);
  auto comma = normalize("SELECT singer.name FROM singer, singer_in_concert WHERE singer.singer_id = singer_in_concert.singer_id",
                         concert());
  CHECK(render(comma).find("FROM singer JOIN singer_in_concert\n") != std::string::npos);
}

TEST_CASE("partial parse of an unfinished SELECT") {
  auto p = parse_partial("SELECT AVG ( sing");
  REQUIRE(p.lines.size() == 1);
  CHECK(p.current_clause() == ClauseKind::Select);
  CHECK(p.lines[0].lexemes == std::vector<std::string>{"AVG", "("});
  CHECK(p.fragment == "sing");
  CHECK_FALSE(p.lines[0].terminated);
  CHECK_FALSE(p.is_complete);
  CHECK_FALSE(p.clause_complete(ClauseKind::Select));
}

TEST_CASE("clause order violations") {
  CHECK(code_of([] { parse_partial("FROM singer\nSELECT singer.name\n"); }) == Errc::ClauseOrderViolation);
  CHECK(code_of([] { parse_partial("SELECT singer.name\nWHERE\n"); }) == Errc::ClauseOrderViolation);
  CHECK(find_order_violation("SELECT singer.name\nFROM singer\nLIMIT\n") == std::size_t{2});
  CHECK_FALSE(find_order_violation(kAvgFrance).has_value());
}

TEST_CASE("layout errors are reported, not thrown") {
  CHECK(parse_partial("SELECT  singer.name").layout_error.has_value());
  CHECK(parse_partial("SELECT singer.name \n").layout_error.has_value());
  CHECK(parse_partial(std::string(kAvgFrance) + "extra").layout_error.has_value());
  CHECK_FALSE(parse_partial(kAvgFrance, false).is_complete);
}

TEST_CASE("parse_normalized requires canonical text") {
  CHECK_NOTHROW(parse_normalized(kAvgFrance));
  CHECK(code_of([] { parse_normalized("SELECT avg ( singer.age )\nFROM singer\nWHERE\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n"); }) ==
        Errc::ParseError);
  CHECK(code_of([] { parse_normalized("SELECT singer.name\nFROM singer\n"); }) == Errc::ParseError);
}

TEST_CASE("exact match ignores constants only") {
  auto a = normalize("SELECT name FROM singer WHERE age > 34", concert());
  auto b = normalize("SELECT name FROM singer WHERE age > 35", concert());
  auto c = normalize("SELECT name FROM singer WHERE age >= 35", concert());
  CHECK(exact_match(a, a));
  CHECK(exact_match(a, b));
  CHECK_FALSE(exact_match(a, c));
  auto d = normalize("SELECT name, age FROM singer", concert());
  auto e = normalize("SELECT age, name FROM singer", concert());
  CHECK(exact_match(d, e));
  auto f = normalize("SELECT name FROM singer ORDER BY age, name", concert());
  auto g = normalize("SELECT name FROM singer ORDER BY name, age", concert());
  CHECK_FALSE(exact_match(f, g));
}

TEST_CASE("lexer") {
  auto toks = lex_sql("SELECT \"a\"\"b\", 'c''d', `x`, [y] FROM t WHERE a <> 1.5 AND b != -2");
  std::vector<std::string> texts;
  for (const auto& t : toks) texts.push_back(t.text);
  CHECK(toks[1].kind == TokenKind::String);
  CHECK(toks[1].text == "a\"b");
  CHECK(toks[3].text == "c'd");
  CHECK(toks[5].kind == TokenKind::QuotedIdentifier);
  CHECK(toks[7].text == "y");
  CHECK(std::find(texts.begin(), texts.end(), "<>") != texts.end());
  CHECK(toks.back().kind == TokenKind::End);
  CHECK_THROWS_AS(lex_sql("SELECT 'open"), Error);
}

TEST_CASE("corpus rewrite keeps normalizable queries") {
  const auto& c = fixtures::corpus();
  auto result = rewrite_dataset(c.raw.tasks, c.raw.schemas);
  CHECK(result.normalized.size() == 41);
  REQUIRE(result.rejected.size() == 3);
  CHECK(result.rejected[0].id == "concert_singer-19");
  CHECK(result.rejected[0].reason.rfind("SelfJoinUnsupported", 0) == 0);
  CHECK(result.rejected[1].reason.rfind("SetOperationUnsupported", 0) == 0);
  CHECK(result.rejected[2].reason.rfind("SelfJoinUnsupported", 0) == 0);

  auto empty = rewrite_dataset({}, c.raw.schemas);
  CHECK(empty.normalized.empty());
  CHECK(empty.rejected.empty());
}

TEST_CASE("corpus properties") {
  const auto& c = fixtures::corpus();
  std::vector<NormalizedQuery> asts;
  for (const auto& raw : c.raw.tasks) {
    const auto& schema = c.schema(raw.db_id);
    NormalizedQuery q;
    try {
      q = normalize(*raw.gold_query, schema);
    } catch (const Error&) {
      continue;
    }
    INFO(raw.id << "\n" << render(q));
    const std::string text = render(q);

    // Idempotence.
    CHECK(normalize(text, schema) == q);
    CHECK(parse_normalized(text) == q);

    // Execution equivalence.
    auto db = c.db(raw.db_id);
    auto original = db.run(*raw.gold_query);
    auto rewritten = db.run(executable_sql(text));
    REQUIRE(std::holds_alternative<ResultSet>(original));
    REQUIRE(std::holds_alternative<ResultSet>(rewritten));
    CHECK(same_rows(std::get<ResultSet>(original).rows, std::get<ResultSet>(rewritten).rows, !q.order_by.empty()));

    // Round trip.
    auto partial = parse_partial(text, true);
    CHECK(partial.is_complete);
    CHECK(render(parse_normalized(text)) == text);

    // Prefix monotonicity.
    for (const auto& prefix : oracle::token_prefixes(text)) CHECK_NOTHROW(parse_partial(prefix));
    for (std::size_t n = 0; n <= text.size(); ++n) CHECK_NOTHROW(parse_partial(text.substr(0, n)));

    // Surface tokens reassemble the text.
    std::string joined;
    for (const auto& t : split_surface_tokens(text)) joined += t;
    CHECK(joined == text);
    asts.push_back(q);
  }
  CHECK(asts.size() == 41);

  // exact_match is an equivalence relation.
  for (const auto& a : asts) {
    CHECK(exact_match(a, a));
    for (const auto& b : asts) {
      CHECK(exact_match(a, b) == exact_match(b, a));
      if (!exact_match(a, b)) continue;
      for (const auto& x : asts)
        if (exact_match(b, x)) CHECK(exact_match(a, x));
    }
  }
}
