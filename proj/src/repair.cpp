#include "nsql/repair.hpp"

#include <atomic>
#include <thread>

#include "nsql/error.hpp"
#include "nsql/normalize.hpp"

namespace nsql {

ExecutionResult execute(const TaskDatabase& db, const NormalizedQuery& query, std::chrono::milliseconds timeout) {
  return db.run(executable_sql(render(query)), timeout);
}

bool satisfies_examples(const ExecutionResult& result, const std::vector<ExampleTuple>& examples) {
  const auto* rows = std::get_if<ResultSet>(&result);
  if (!rows) return false;
  for (const auto& example : examples) {
    bool found = std::any_of(rows->rows.begin(), rows->rows.end(), [&](const Row& r) { return row_matches(r, example); });
    if (!found) return false;
  }
  return true;
}

std::string_view to_string(SubstitutionClass cls) {
  switch (cls) {
    case SubstitutionClass::Aggregation: return "Aggregation";
    case SubstitutionClass::Connective: return "Connective";
    case SubstitutionClass::Comparison: return "Comparison";
    case SubstitutionClass::ColumnRef: return "ColumnRef";
  }
  return "";
}

namespace {

const std::vector<std::string> kAggregationMembers = {"COUNT", "SUM", "AVG", "MIN", "MAX"};
const std::vector<std::string> kConnectiveMembers = {"AND", "OR"};
const std::vector<std::string> kComparisonMembers = {"=", "!=", "<", "<=", ">", ">="};

std::optional<SubstitutionClass> class_of(LexemeClass cls) {
  switch (cls) {
    case LexemeClass::Aggregation: return SubstitutionClass::Aggregation;
    case LexemeClass::Connective: return SubstitutionClass::Connective;
    case LexemeClass::Comparison: return SubstitutionClass::Comparison;
    case LexemeClass::Column: return SubstitutionClass::ColumnRef;
    default: return std::nullopt;
  }
}

}  // namespace

HammingOneQueries::HammingOneQueries(const NormalizedQuery& query, const DatabaseSchema& schema)
    : lexemes_(render_clauses(query)) {
  for (const auto& col : schema.all_columns()) columns_.push_back(col.qualified());
  for (auto kind : kClauseOrder) {
    const auto& body = lexemes_[index_of(kind)];
    for (std::size_t i = 0; i < body.size(); ++i)
      if (auto cls = class_of(body[i].cls)) sites_.push_back({kind, i, *cls});
  }
}

const std::vector<std::string>& HammingOneQueries::members(SubstitutionClass cls) const {
  switch (cls) {
    case SubstitutionClass::Aggregation: return kAggregationMembers;
    case SubstitutionClass::Connective: return kConnectiveMembers;
    case SubstitutionClass::Comparison: return kComparisonMembers;
    case SubstitutionClass::ColumnRef: return columns_;
  }
  return columns_;
}

std::optional<HammingVariant> HammingOneQueries::next() {
  while (site_ < sites_.size()) {
    const Site& site = sites_[site_];
    const auto& options = members(site.cls);
    if (member_ >= options.size()) {
      ++site_;
      member_ = 0;
      continue;
    }
    const std::string& replacement = options[member_++];
    const std::string& original = lexemes_[index_of(site.clause)][site.position].text;
    if (iequals(replacement, original)) continue;

    std::string text;
    for (auto kind : kClauseOrder) {
      auto body = lexemes_[index_of(kind)];
      if (kind == site.clause) body[site.position].text = replacement;
      text += render_line(kind, body);
      text += '\n';
    }
    try {
      auto parsed = parse_normalized(text);
      return HammingVariant{std::move(text), std::move(parsed), site.clause, site.position, site.cls, original,
                            replacement};
    } catch (const Error&) {
      continue;
    }
  }
  return std::nullopt;
}

std::vector<HammingVariant> hamming_one_queries(const NormalizedQuery& query, const DatabaseSchema& schema) {
  std::vector<HammingVariant> out;
  HammingOneQueries gen(query, schema);
  while (auto v = gen.next()) out.push_back(std::move(*v));
  return out;
}

namespace {

constexpr std::size_t kChunk = 64;

bool past(const std::optional<Clock::time_point>& deadline) { return deadline && Clock::now() >= *deadline; }

}  // namespace

RepairOutcome test_and_repair(const NormalizedQuery& query, const TaskDatabase& db, const DatabaseSchema& schema,
                              const std::vector<ExampleTuple>& examples, const PartialQueryChecker* checker,
                              const RepairOptions& options) {
  RepairOutcome out;
  if (satisfies_examples(execute(db, query, options.per_query_timeout), examples)) {
    out.success = true;
    out.query = query;
    out.text = render(query);
    return out;
  }
  if (!options.repair_enabled) return out;

  std::vector<TaskDatabase> extra;
  for (std::size_t w = 1; w < options.workers; ++w) extra.push_back(db.reopen());

  HammingOneQueries gen(query, schema);
  bool exhausted = false;
  while (!exhausted && !past(options.deadline)) {
    std::vector<HammingVariant> chunk;
    while (chunk.size() < kChunk) {
      auto v = gen.next();
      if (!v) {
        exhausted = true;
        break;
      }
      ++out.variants_generated;
      if (options.prefilter && checker && !checker->check(v->text, true).pass) {
        ++out.variants_prefiltered;
        continue;
      }
      chunk.push_back(std::move(*v));
    }
    if (chunk.empty()) continue;

    std::vector<char> ok(chunk.size(), 0);
    std::atomic<std::size_t> cursor{0};
    std::atomic<std::size_t> found{chunk.size()};
    auto work = [&](const TaskDatabase& handle) {
      while (true) {
        std::size_t i = cursor.fetch_add(1);
        // Later indices cannot beat an earlier success.
        if (i >= chunk.size() || i > found.load() || past(options.deadline)) return;
        if (satisfies_examples(execute(handle, chunk[i].query, options.per_query_timeout), examples)) {
          ok[i] = 1;
          std::size_t cur = found.load();
          while (i < cur && !found.compare_exchange_weak(cur, i)) {
          }
        }
      }
    };
    if (extra.empty()) {
      work(db);
    } else {
      std::vector<std::thread> threads;
      for (const auto& handle : extra) threads.emplace_back(work, std::cref(handle));
      work(db);
      for (auto& t : threads) t.join();
    }
    out.variants_executed += std::min(cursor.load(), chunk.size());
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (!ok[i]) continue;
      out.success = true;
      out.repaired = true;
      out.text = chunk[i].text;
      out.query = std::move(chunk[i].query);
      return out;
    }
  }
  return out;
}

DatabaseTester::DatabaseTester(const TaskDatabase& db, const DatabaseSchema& schema, std::vector<ExampleTuple> examples,
                               const PartialQueryChecker* checker, RepairOptions options)
    : db_(db), schema_(schema), examples_(std::move(examples)), checker_(checker), options_(options) {}

TestResult DatabaseTester::test(const std::string& text, Clock::time_point deadline) {
  NormalizedQuery query;
  try {
    query = parse_normalized(text);
  } catch (const Error&) {
    return {};
  }
  RepairOptions options = options_;
  options.deadline = options.deadline ? std::min(*options.deadline, deadline) : deadline;
  auto outcome = test_and_repair(query, db_, schema_, examples_, checker_, options);
  if (!outcome.success) return {};
  return {true, outcome.text, outcome.repaired};
}

}  // namespace nsql
