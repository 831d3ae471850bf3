#include "nsql/scripted_suite.hpp"

#include <algorithm>
#include <random>

#include "nsql/checker.hpp"
#include "nsql/error.hpp"
#include "nsql/normalize.hpp"
#include "nsql/partial.hpp"
#include "nsql/render.hpp"
#include "nsql/repair.hpp"

namespace nsql {

std::string route_key(const TaskInstance& task) { return "question: " + task.question + "\n"; }

std::uint64_t seed_for(std::string_view task_id) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : task_id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string gold_text(const TaskInstance& task, const DatabaseSchema& schema) {
  if (!task.gold_query) throw Error(Errc::ConfigError, "task '" + task.id + "' has no gold query");
  return render(normalize(*task.gold_query, schema));
}

std::string render_lexemes(const ClauseLexemes& clauses) {
  std::string text;
  for (auto kind : kClauseOrder) {
    text += render_line(kind, clauses[index_of(kind)]);
    text += '\n';
  }
  return text;
}

std::optional<ExampleTuple> first_example(const std::vector<ExampleTuple>& examples) {
  if (examples.empty()) return std::nullopt;
  return examples.front();
}

bool rows_differ(const TaskDatabase& db, const NormalizedQuery& gold, const std::string& text) {
  auto want = execute(db, gold);
  auto got = db.run(executable_sql(text));
  const auto* a = std::get_if<ResultSet>(&want);
  const auto* b = std::get_if<ResultSet>(&got);
  return a && b && !same_rows(a->rows, b->rows, !gold.order_by.empty());
}

}  // namespace

ScriptedRoute clean_route(const TaskInstance& task, const DatabaseSchema& schema) {
  return ScriptedRoute{route_key(task), {{split_surface_tokens(gold_text(task, schema)), 1.0}}, {}};
}

ScriptedRoute noisy_route(const TaskInstance& task, const DatabaseSchema& schema, std::uint64_t seed) {
  ScriptedRoute route = clean_route(task, schema);
  const std::size_t length = route.paths.front().tokens.size();
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> steps(length);
  for (std::size_t i = 0; i < length; ++i) steps[i] = i;
  std::shuffle(steps.begin(), steps.end(), rng);
  steps.resize(std::min<std::size_t>(3, length));
  std::sort(steps.begin(), steps.end());
  std::uniform_real_distribution<double> mass(0.55, 0.8);
  const char* surfaces[] = {"zzz ", "yyy ", "xxx "};
  for (std::size_t i = 0; i < steps.size(); ++i)
    route.noise.push_back({surfaces[i], mass(rng), false, i < 2, {steps[i]}});
  return route;
}

std::optional<ScriptedRoute> corrupted_route(const TaskInstance& task, const DatabaseSchema& schema,
                                             const TaskDatabase& db) {
  NormalizedQuery gold = normalize(gold_text(task, schema), schema);
  auto examples = task_examples(task, db);
  if (examples.empty()) return std::nullopt;
  SymbolicChecker checker(schema, examples.front());
  HammingOneQueries variants(gold, schema);
  while (auto v = variants.next()) {
    if (!checker.check(v->text, true).pass) continue;
    if (satisfies_examples(execute(db, v->query), examples)) continue;
    return ScriptedRoute{route_key(task), {{split_surface_tokens(v->text), 1.0}}, {}};
  }
  return std::nullopt;
}

std::vector<SeededQuery> seeded_errors(const TaskInstance& task, const DatabaseSchema& schema, const TaskDatabase& db) {
  NormalizedQuery gold = normalize(gold_text(task, schema), schema);
  const ClauseLexemes clauses = render_clauses(gold);
  std::vector<SeededQuery> out;

  // Unknown column: the first column reference gains a suffix.
  for (auto kind : kClauseOrder) {
    auto body = clauses[index_of(kind)];
    auto it = std::find_if(body.begin(), body.end(), [](const Lexeme& l) { return l.cls == LexemeClass::Column; });
    if (it == body.end()) continue;
    it->text += "_x";
    ClauseLexemes changed = clauses;
    changed[index_of(kind)] = body;
    out.push_back({SeededError::UnknownColumn, render_lexemes(changed)});
    break;
  }

  // Syntax: a dangling comma closes the SELECT line.
  {
    ClauseLexemes changed = clauses;
    changed[index_of(ClauseKind::Select)].push_back({",", LexemeClass::Punctuation});
    out.push_back({SeededError::Syntax, render_lexemes(changed)});
  }

  // Wrong constant.
  for (auto kind : kClauseOrder) {
    auto body = clauses[index_of(kind)];
    auto it = std::find_if(body.begin(), body.end(), [](const Lexeme& l) { return l.cls == LexemeClass::Constant; });
    if (it == body.end()) continue;
    if (it->text.front() == '\'') {
      it->text = quote_string("zz no match zz");
    } else {
      it->text = std::to_string(std::stoll(it->text) + 100000);
    }
    ClauseLexemes changed = clauses;
    changed[index_of(kind)] = body;
    std::string text = render_lexemes(changed);
    if (rows_differ(db, gold, text)) out.push_back({SeededError::WrongConstant, text});
    break;
  }

  // Type mismatch: a bare SELECT column replaced by a FROM column of incompatible type.
  auto example = first_example(task_examples(task, db));
  if (example) {
    SymbolicChecker checker(schema, example);
    const auto& select = clauses[index_of(ClauseKind::Select)];
    std::size_t item = 0;
    bool done = false;
    for (std::size_t p = 0; p < select.size() && !done; ++p) {
      if (select[p].text == ",") ++item;
      if (select[p].cls != LexemeClass::Column || (p > 0 && select[p - 1].text == "(")) continue;
      if (item >= example->arity()) break;
      for (const auto& name : gold.from_tables) {
        const Table* table = schema.find_table(name);
        if (!table) continue;
        for (const auto& col : table->columns) {
          if (types_compatible(col.type, example->types[item])) continue;
          ClauseLexemes changed = clauses;
          changed[index_of(ClauseKind::Select)][p].text = table->name + "." + col.name;
          std::string text = render_lexemes(changed);
          if (checker.check(text, true).kind != ErrorKind::Example || checker.check(text, true).pass) continue;
          if (!rows_differ(db, gold, text)) continue;
          out.push_back({SeededError::TypeMismatch, text});
          done = true;
          break;
        }
        if (done) break;
      }
    }
  }
  return out;
}

ScriptedRoute seeded_error_route(const TaskInstance& task, const DatabaseSchema& schema, const TaskDatabase& db) {
  auto seeded = seeded_errors(task, schema, db);
  ScriptedRoute route{route_key(task), {}, {}};
  double prob = 0.3;
  for (const auto& q : seeded) {
    route.paths.push_back({split_surface_tokens(q.text), prob});
    prob *= 0.75;
  }
  route.paths.push_back({split_surface_tokens(gold_text(task, schema)), prob});
  return route;
}

ScriptedModel build_suite(const Dataset& dataset, SuiteKind kind) {
  std::vector<ScriptedRoute> routes;
  for (const auto& task : dataset.tasks) {
    auto it = dataset.schemas.find(task.db_id);
    if (it == dataset.schemas.end() || !task.gold_query) continue;
    const DatabaseSchema& schema = it->second;
    try {
      switch (kind) {
        case SuiteKind::Clean:
          routes.push_back(clean_route(task, schema));
          break;
        case SuiteKind::Noisy:
          routes.push_back(noisy_route(task, schema, seed_for(task.id)));
          break;
        case SuiteKind::Corrupted: {
          auto db = TaskDatabase::open(dataset.db_root, task.db_id);
          if (auto route = corrupted_route(task, schema, db)) routes.push_back(std::move(*route));
          else routes.push_back(clean_route(task, schema));
          break;
        }
        case SuiteKind::SeededErrors: {
          auto db = TaskDatabase::open(dataset.db_root, task.db_id);
          routes.push_back(seeded_error_route(task, schema, db));
          break;
        }
      }
    } catch (const Error&) {
    }
  }
  return ScriptedModel(std::move(routes));
}

}  // namespace nsql
