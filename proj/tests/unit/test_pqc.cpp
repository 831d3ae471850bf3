#include "catch_amalgamated.hpp"

#include <random>

#include "fixtures.hpp"
#include "nsql/checker.hpp"
#include "nsql/classify.hpp"
#include "nsql/error.hpp"
#include "nsql/normalize.hpp"
#include "nsql/partial.hpp"
#include "nsql/render.hpp"
#include "nsql/scripted_suite.hpp"
#include "oracles.hpp"

using namespace nsql;

namespace {

const DatabaseSchema& concert() { return fixtures::corpus().schema("concert_singer"); }

ExampleTuple ex(Value v) { return ExampleTuple::from_values({std::move(v)}); }

std::string layout(const std::string& select, const std::string& from, const std::string& where = "") {
  return "SELECT " + select + "\nFROM " + from + "\nWHERE" + (where.empty() ? "" : " " + where) +
         "\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n";
}

CheckVerdict check(const std::string& text, std::optional<ExampleTuple> example = std::nullopt) {
  return SymbolicChecker(concert(), std::move(example)).check(text, false);
}

bool at_or_before(const CheckVerdict& a, const CheckVerdict& b) {
  return a.line < b.line || (a.line == b.line && a.lexeme <= b.lexeme);
}

}  // namespace

TEST_CASE("unknown table-column combinations are runtime errors") {
  auto v = check("SELECT nonexistent.col ");
  CHECK_FALSE(v.pass);
  CHECK(v.kind == ErrorKind::Runtime);
  CHECK(v.clause == ClauseKind::Select);
  CHECK(check("SELECT nonexistent.col").pass == false);
  CHECK(check("SELECT singer.agee ").kind == ErrorKind::Runtime);
  CHECK_FALSE(check("SELECT singer.agee ").pass);
}

TEST_CASE("a text column against an integer example is an example error") {
  auto v = check(layout("singer.name", "singer"), ex(std::int64_t{1962}));
  CHECK_FALSE(v.pass);
  CHECK(v.kind == ErrorKind::Example);
  CHECK(check(layout("singer.age", "singer"), ex(std::int64_t{1962})).pass);
  CHECK(check("SELECT singer.name\n", ex(std::int64_t{1962})).kind == ErrorKind::Example);
  CHECK(check("SELECT singer.name\n").pass);
}

TEST_CASE("vocabulary per clause") {
  auto v = check_vocabulary(ClauseKind::Select, {"WHERE"}, std::nullopt, concert());
  CHECK_FALSE(v.pass);
  CHECK(v.kind == ErrorKind::Syntax);
  CHECK(check_vocabulary(ClauseKind::Select, {}, std::string("sing"), concert()).pass);
  CHECK(check_vocabulary(ClauseKind::Select, {"AVG", "("}, std::string("singer.a"), concert()).pass);
  CHECK_FALSE(check_vocabulary(ClauseKind::Select, {}, std::string("zzz"), concert()).pass);
  CHECK(check_vocabulary(ClauseKind::Select, {"singer.agee"}, std::nullopt, concert()).kind == ErrorKind::Runtime);
  CHECK_FALSE(check_vocabulary(ClauseKind::Select, {"'x'"}, std::nullopt, concert()).pass);
  CHECK(check_vocabulary(ClauseKind::Where, {"singer.age", ">"}, std::string("3"), concert()).pass);
  CHECK(check_vocabulary(ClauseKind::Where, {"singer.country", "="}, std::string("'Fra"), concert()).pass);
  CHECK(check_vocabulary(ClauseKind::Select, {"DISTINCT", "singer.name", ",", "COUNT", "(", "*", ")"}, std::nullopt,
                         concert()).pass);
  CHECK_FALSE(check_vocabulary(ClauseKind::From, {"singr"}, std::nullopt, concert()).pass);
  CHECK(check_vocabulary(ClauseKind::Limit, {"3"}, std::nullopt, concert()).pass);
  CHECK_FALSE(check_vocabulary(ClauseKind::Limit, {"singer.age"}, std::nullopt, concert()).pass);
}

TEST_CASE("scope waits for a complete FROM line") {
  auto out = check(layout("singer.name", "concert"));
  CHECK_FALSE(out.pass);
  CHECK(out.kind == ErrorKind::Runtime);
  CHECK(check("SELECT singer.name\nFROM conc").pass);
  CHECK(check("SELECT singer.name\nFROM concert").pass);
  CHECK_FALSE(check("SELECT singer.name\nFROM concert\n").pass);
  CHECK(check(layout("concert.concert_name", "concert", "concert.year > 2000")).pass);
  CHECK(check("SELECT concert.concert_name\nFROM concert\nWHERE singer.age ").kind == ErrorKind::Runtime);
  CHECK_FALSE(check("SELECT concert.concert_name\nFROM concert\nWHERE singer.age ").pass);
}

TEST_CASE("subqueries bring their own FROM tables") {
  auto inside = [](const std::string& sub) {
    return "SELECT singer.name\nFROM singer\nWHERE singer.singer_id IN ( SELECT " + sub;
  };
  CHECK(check(inside("singer_in_concert.singer_id FROM singer_in_concert )\n")).pass);
  CHECK(check(inside("singer_in_concert.singer_id FROM singer_in_concert WHERE singer.age > 3 )\n")).pass);
  // Deferred until the inner FROM list is closed.
  CHECK(check(inside("concert.concert_id FROM singer_in_concert ")).pass);
  auto v = check(inside("concert.concert_id FROM singer_in_concert )\n"));
  CHECK_FALSE(v.pass);
  CHECK(v.kind == ErrorKind::Runtime);
  CHECK(v.clause == ClauseKind::Where);
  CHECK_FALSE(check(inside("concert.concert_id FROM singer_in_concert WHERE ")).pass);
  CHECK_FALSE(check(inside("singer_in_concert.singer_id FROM singer_in_concert ) AND concert.year ")).pass);
}

TEST_CASE("output types against the example") {
  const auto& s = concert();
  auto items = [](std::vector<std::string> lexemes) { return *parse_select_items(lexemes); };
  CHECK(check_types(items({"singer.name"}), {"singer"}, true, s, ex(std::int64_t{1962})).kind == ErrorKind::Example);
  CHECK_FALSE(check_types(items({"singer.name"}), {"singer"}, true, s, ex(std::int64_t{1962})).pass);
  CHECK(check_types(items({"COUNT", "(", "*", ")"}), {"singer"}, true, s, ex(std::int64_t{5})).pass);
  CHECK(check_types(items({"AVG", "(", "singer.age", ")"}), {"singer"}, true, s, ex(29.5)).pass);
  CHECK_FALSE(check_types(items({"AVG", "(", "singer.age", ")"}), {"singer"}, true, s, ex(std::string("x"))).pass);
  CHECK(check_types(items({"MAX", "(", "singer.name", ")"}), {"singer"}, true, s, ex(std::string("x"))).pass);
  CHECK(check_types(items({"singer.age"}), {"singer"}, true, s, ex(Null{})).pass);

  auto two = ExampleTuple::from_values({std::string("Joe"), std::int64_t{52}});
  CHECK(check_types(items({"singer.name", ",", "singer.age"}), {"singer"}, true, s, two).pass);
  CHECK_FALSE(check_types(items({"singer.name"}), {"singer"}, true, s, two).pass);
  CHECK_FALSE(check_types(items({"singer.age", ",", "singer.name"}), {"singer"}, true, s, two).pass);

  // The star expands only once FROM is known.
  CHECK(check_types(items({"*"}), {}, false, s, two).pass);
  CHECK_FALSE(check_types(items({"*"}), {"singer_in_concert"}, true, s, two).pass);
  CHECK(check_types(items({"*"}), {"singer_in_concert"}, true, s,
                    ExampleTuple::from_values({std::int64_t{1}, std::int64_t{2}})).pass);

  CHECK(types_compatible(ColumnType::Real, ColumnType::Integer));
  CHECK(types_compatible(ColumnType::Integer, ColumnType::Real));
  CHECK(types_compatible(ColumnType::Text, ColumnType::Other));
  CHECK_FALSE(types_compatible(ColumnType::Text, ColumnType::Integer));
}

TEST_CASE("static prediction and execution labels") {
  auto db = fixtures::corpus().db("concert_singer");
  auto gold = layout("COUNT ( * )", "singer");
  auto gold_rows = std::get<ResultSet>(db.run(executable_sql(gold))).rows;
  ExpectedResult expected{gold_rows, false, {}};
  auto example = ex(std::int64_t{6});

  auto unknown = layout("COUNT ( singer.agee )", "singer");
  CHECK(predict_label(unknown, concert(), example) == QueryLabel::RuntimeError);
  CHECK(label_by_execution(unknown, db, expected) == QueryLabel::RuntimeError);

  auto constant = layout("COUNT ( * )", "singer", "singer.age > 1000");
  CHECK(predict_label(constant, concert(), example) == QueryLabel::Correct);
  CHECK(label_by_execution(constant, db, expected) == QueryLabel::ExampleError);

  auto disorder = "FROM singer\nSELECT COUNT ( * )\nWHERE\nGROUP BY\nHAVING\nORDER BY\nLIMIT\n";
  CHECK(predict_label(disorder, concert(), example) == QueryLabel::SyntaxError);
  CHECK(label_by_execution(disorder, db, expected) == QueryLabel::SyntaxError);

  CHECK(predict_label(gold, concert(), example) == QueryLabel::Correct);
  CHECK(label_by_execution(gold, db, expected) == QueryLabel::Correct);

  ExpectedResult by_example{std::nullopt, false, {example}};
  CHECK(label_by_execution(gold, db, by_example) == QueryLabel::Correct);
  CHECK(label_by_execution(constant, db, by_example) == QueryLabel::ExampleError);
}

TEST_CASE("every token prefix of every gold query passes") {
  const auto& corpus = fixtures::corpus();
  for (const auto& task : corpus.normalized.tasks) {
    INFO(task.id);
    const auto& schema = corpus.schema(task.db_id);
    auto db = corpus.db(task.db_id);
    SymbolicChecker checker(schema, task_examples(task, db).front());
    SymbolicChecker bare(schema, std::nullopt);
    for (const auto& prefix : oracle::token_prefixes(*task.gold_query)) {
      INFO(prefix);
      CHECK(checker.check(prefix, false).pass);
      CHECK(bare.check(prefix, false).pass);
    }
    CHECK(checker.check(*task.gold_query, true).pass);
    for (std::size_t n = 0; n <= task.gold_query->size(); ++n) CHECK(bare.check(task.gold_query->substr(0, n), false).pass);
  }
}

TEST_CASE("rejection persists along extensions") {
  const auto& corpus = fixtures::corpus();
  std::mt19937 rng(11);
  std::size_t rejected_prefixes = 0;
  for (const auto& task : corpus.normalized.tasks) {
    const auto& schema = corpus.schema(task.db_id);
    auto db = corpus.db(task.db_id);
    SymbolicChecker checker(schema, task_examples(task, db).front());
    auto variants = oracle::corruptions(*task.gold_query, schema);
    for (const auto& seeded : seeded_errors(task, schema, db)) variants.push_back({seeded.text, "seeded", "", ""});
    std::shuffle(variants.begin(), variants.end(), rng);
    if (variants.size() > 25) variants.resize(25);
    for (const auto& v : variants) {
      INFO(v.text);
      std::optional<CheckVerdict> first;
      for (const auto& prefix : oracle::token_prefixes(v.text)) {
        auto verdict = checker.check(prefix, false);
        if (first) {
          CHECK_FALSE(verdict.pass);
          CHECK(at_or_before(verdict, *first));
        } else if (!verdict.pass) {
          first = verdict;
          ++rejected_prefixes;
        }
      }
    }
  }
  CHECK(rejected_prefixes > 100);
}

TEST_CASE("each check emits only its own error kinds") {
  const auto& schema = concert();
  std::vector<std::string> pool = {"singer.name", "singer.age", "concert.year", "stadium.capacity", "singer.agee",
                                   "nope.x",      "COUNT",      "AVG",          "SUM",              "(",
                                   ")",           "*",          ",",            "DISTINCT",         "=",
                                   ">",           "AND",        "OR",           "'x'",              "3",
                                   "WHERE",       "singer",     "JOIN",         "ON",               "BETWEEN",
                                   "ASC",         "DESC",       "LIKE",         "NOT",              "-"};
  std::vector<ClauseKind> clauses = {ClauseKind::Select, ClauseKind::From,    ClauseKind::Where, ClauseKind::GroupBy,
                                     ClauseKind::Having, ClauseKind::OrderBy, ClauseKind::Limit};
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1), len(0, 6);
  std::size_t vocab_rejects = 0, scope_rejects = 0, type_rejects = 0;
  for (int round = 0; round < 3000; ++round) {
    std::vector<std::string> lexemes;
    for (std::size_t i = len(rng); i > 0; --i) lexemes.push_back(pool[pick(rng)]);
    auto clause = clauses[static_cast<std::size_t>(round) % clauses.size()];
    auto v = check_vocabulary(clause, lexemes, std::nullopt, schema);
    if (!v.pass) {
      ++vocab_rejects;
      CHECK(v.kind != ErrorKind::Example);
    }

    std::string select, where;
    for (const auto& l : lexemes) select += (select.empty() ? "" : " ") + l;
    auto text = "SELECT " + (select.empty() ? std::string("singer.name") : select) + "\nFROM singer\nWHERE";
    try {
      auto partial = parse_partial(text);
      auto s = check_scope(partial);
      if (!s.pass) {
        ++scope_rejects;
        CHECK(s.kind == ErrorKind::Runtime);
      }
    } catch (const Error&) {
    }

    if (auto items = parse_select_items(lexemes)) {
      auto t = check_types(*items, {"singer", "concert"}, true, schema, ex(std::int64_t{1}));
      if (!t.pass) {
        ++type_rejects;
        CHECK(t.kind == ErrorKind::Example);
      }
    }
  }
  CHECK(vocab_rejects > 0);
  CHECK(scope_rejects > 0);
  CHECK(type_rejects > 0);
}

TEST_CASE("schema violations are runtime errors statically and when executed") {
  const auto& corpus = fixtures::corpus();
  std::size_t checked = 0;
  for (const auto& task : corpus.normalized.tasks) {
    const auto& schema = corpus.schema(task.db_id);
    auto db = corpus.db(task.db_id);
    auto example = task_examples(task, db).front();
    auto lex = render_clauses(parse_normalized(*task.gold_query));
    auto text_of = [&] {
      std::string out;
      for (std::size_t c = 0; c < lex.size(); ++c) out += render_line(static_cast<ClauseKind>(c), lex[c]) + "\n";
      return out;
    };
    for (auto& body : lex) {
      for (auto& lexeme : body) {
        if (lexeme.cls != LexemeClass::Column || lexeme.text == "*") continue;
        auto original = lexeme.text;
        auto dot = original.find('.');
        for (const std::string& bad : {original + "_x", "ghost" + original.substr(dot)}) {
          lexeme.text = bad;
          auto text = text_of();
          INFO(text);
          CHECK(predict_label(text, schema, example) == QueryLabel::RuntimeError);
          CHECK(label_by_execution(text, db, {std::nullopt, false, {example}}) == QueryLabel::RuntimeError);
          ++checked;
        }
        lexeme.text = original;
      }
    }
  }
  CHECK(checked > 100);
}
