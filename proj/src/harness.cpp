#include "nsql/harness.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <fmt/format.h>

#include "nsql/error.hpp"
#include "nsql/exact_match.hpp"
#include "nsql/normalize.hpp"
#include "nsql/render.hpp"

namespace nsql {

Dataset load_dataset(const std::filesystem::path& tables_file, const std::filesystem::path& tasks_file,
                     const std::filesystem::path& db_root) {
  Dataset dataset;
  dataset.schemas = load_schemas(tables_file);
  dataset.tasks = load_tasks(tasks_file, dataset.schemas);
  dataset.db_root = db_root;
  for (auto& [id, schema] : dataset.schemas) {
    try {
      TaskDatabase::open(db_root, id).refine_types(schema);
    } catch (const Error&) {
    }
  }
  return dataset;
}

Aggregates aggregate(const std::vector<TaskReport>& tasks) {
  Aggregates out;
  if (tasks.empty()) return out;
  double n = static_cast<double>(tasks.size());
  std::size_t exec = 0, exact = 0, solved = 0;
  double seconds = 0;
  for (const auto& t : tasks) {
    exec += t.execution_correct;
    exact += t.exact_match;
    solved += t.status == SearchStatus::Solved;
    seconds += t.elapsed_seconds;
  }
  out.execution_accuracy = 100.0 * static_cast<double>(exec) / n;
  out.exact_match_accuracy = 100.0 * static_cast<double>(exact) / n;
  out.mean_seconds = seconds / n;
  out.solve_rate = 100.0 * static_cast<double>(solved) / n;
  return out;
}

std::vector<ExampleTuple> task_examples(const TaskInstance& task, const TaskDatabase& db) {
  if (!task.examples.empty() || !task.gold_query) return task.examples;
  try {
    return {derive_example(db, executable_sql(*task.gold_query))};
  } catch (const Error& e) {
    if (e.code() == Errc::EmptyResult) return {};
    throw;
  }
}

namespace {

struct Prepared {
  const DatabaseSchema* schema;
  TaskDatabase db;
  std::vector<ExampleTuple> examples;
  std::string prompt;
};

Prepared prepare(const TaskInstance& task, const Dataset& dataset, bool use_examples) {
  auto it = dataset.schemas.find(task.db_id);
  if (it == dataset.schemas.end()) throw Error(Errc::UnknownDbId, task.db_id);
  Prepared p{&it->second, TaskDatabase::open(dataset.db_root, task.db_id), {}, {}};
  p.examples = task_examples(task, p.db);
  TaskInstance shown = task;
  shown.examples = p.examples;
  p.prompt = serialize_task(shown, *p.schema, use_examples);
  return p;
}

}  // namespace

TaskReport run_task(const TaskInstance& task, const Dataset& dataset, const LanguageModel& model,
                    const RunOptions& options) {
  TaskReport report;
  report.id = task.id;
  report.db_id = task.db_id;
  const auto start = Clock::now();
  try {
    Prepared p = prepare(task, dataset, options.search.use_examples);
    std::vector<ExampleTuple> used = options.search.use_examples ? p.examples : std::vector<ExampleTuple>{};
    std::optional<ExampleTuple> first;
    if (!used.empty()) first = used.front();
    SymbolicChecker checker(*p.schema, first);
    RepairOptions repair{options.search.repair_enabled, options.prefilter, kDefaultQueryTimeout, std::nullopt,
                         options.repair_workers};
    DatabaseTester tester(p.db, *p.schema, used, &checker, repair);
    SearchOutcome outcome = run_search(p.prompt, model, &checker, tester, options.search);

    report.status = outcome.status;
    report.query = outcome.query_text;
    report.repaired = outcome.repaired;
    report.nodes_expanded = outcome.stats.nodes_expanded;
    report.candidates_generated = outcome.stats.candidates_generated;
    report.pruned_by_checker = outcome.stats.pruned_by_checker;
    report.complete_queries_tested = outcome.stats.complete_queries_tested;
    report.backtracks = outcome.stats.backtracks;
    if (outcome.stats.adapter_error) report.error = outcome.stats.adapter_error;

    if (outcome.status == SearchStatus::Solved && outcome.query && task.gold_query) {
      NormalizedQuery gold = normalize(*task.gold_query, *p.schema);
      auto gold_result = execute(p.db, gold);
      auto got_result = execute(p.db, *outcome.query);
      const auto* gold_rows = std::get_if<ResultSet>(&gold_result);
      const auto* got_rows = std::get_if<ResultSet>(&got_result);
      report.execution_correct =
          gold_rows && got_rows && same_rows(got_rows->rows, gold_rows->rows, !gold.order_by.empty());
      report.exact_match = exact_match(*outcome.query, gold);
    }
  } catch (const Error& e) {
    report.error = e.what();
  }
  report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

BenchmarkReport run_benchmark(const Dataset& dataset, const LanguageModel& model, const RunOptions& options,
                              std::string label) {
  BenchmarkReport report;
  report.label = std::move(label);
  report.config = options.search;
  report.prefilter = options.prefilter;
  report.tasks.resize(dataset.tasks.size());

  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    for (std::size_t i = cursor.fetch_add(1); i < dataset.tasks.size(); i = cursor.fetch_add(1))
      report.tasks[i] = run_task(dataset.tasks[i], dataset, model, options);
  };
  std::size_t workers = std::max<std::size_t>(1, std::min(options.task_workers, dataset.tasks.size()));
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();

  report.aggregates = aggregate(report.tasks);
  return report;
}

std::string AblationPoint::label() const {
  std::string out(mode == AttemptMode::SingleAttempt ? "single" : "multi");
  if (pqc) out += "+pqc";
  if (repair) out += "+repair";
  if (examples) out += "+examples";
  return out;
}

std::vector<AblationPoint> full_grid() {
  std::vector<AblationPoint> grid;
  for (auto mode : {AttemptMode::SingleAttempt, AttemptMode::MultipleAttempts})
    for (bool pqc : {false, true})
      for (bool repair : {false, true})
        for (bool examples : {false, true}) grid.push_back({mode, pqc, repair, examples});
  return grid;
}

std::vector<AblationPoint> parse_grid(std::string_view spec) {
  if (spec == "full") return full_grid();
  std::vector<AblationPoint> grid;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    auto item = spec.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    AblationPoint point{AttemptMode::MultipleAttempts, false, false, false};
    std::size_t pos = 0;
    bool first = true;
    while (pos <= item.size()) {
      auto plus = item.find('+', pos);
      auto word = item.substr(pos, plus == std::string_view::npos ? std::string_view::npos : plus - pos);
      if (first && word == "single") point.mode = AttemptMode::SingleAttempt;
      else if (first && word == "multi") point.mode = AttemptMode::MultipleAttempts;
      else if (!first && word == "pqc") point.pqc = true;
      else if (!first && word == "repair") point.repair = true;
      else if (!first && word == "examples") point.examples = true;
      else throw Error(Errc::ConfigError, fmt::format("bad grid point '{}'", item));
      first = false;
      if (plus == std::string_view::npos) break;
      pos = plus + 1;
    }
    grid.push_back(point);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return grid;
}

std::vector<BenchmarkReport> run_ablation(const Dataset& dataset, const LanguageModel& model,
                                          const std::vector<AblationPoint>& grid, const RunOptions& base) {
  std::vector<BenchmarkReport> out;
  for (const auto& point : grid) {
    RunOptions options = base;
    options.search.mode = point.mode;
    options.search.pqc_enabled = point.pqc;
    options.search.repair_enabled = point.repair;
    options.search.use_examples = point.examples;
    out.push_back(run_benchmark(dataset, model, options, point.label()));
  }
  return out;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (auto c : row) n += c;
  return n;
}

std::optional<double> ConfusionMatrix::agreement() const {
  std::size_t n = total();
  if (n == 0) return std::nullopt;
  std::size_t diag = 0;
  for (std::size_t i = 0; i < kLabelCount; ++i) diag += counts[i][i];
  return static_cast<double>(diag) / static_cast<double>(n);
}

namespace {

class CollectingTester : public CompleteQueryTester {
 public:
  explicit CollectingTester(std::size_t limit) : limit_(limit) {}

  TestResult test(const std::string& text, Clock::time_point) override {
    collected.push_back(text);
    if (collected.size() >= limit_) return {true, text, false};
    return {};
  }

  std::vector<std::string> collected;

 private:
  std::size_t limit_;
};

}  // namespace

ConfusionMatrix run_checker_experiment(const Dataset& dataset, const LanguageModel& model, std::size_t per_task,
                                       const RunOptions& options) {
  ConfusionMatrix matrix;
  if (per_task == 0) return matrix;
  SearchConfig config = options.search;
  config.pqc_enabled = false;
  config.mode = AttemptMode::MultipleAttempts;
  for (const auto& task : dataset.tasks) {
    Prepared p = prepare(task, dataset, true);
    CollectingTester tester(per_task);
    run_search(p.prompt, model, nullptr, tester, config);

    ExpectedResult expected;
    expected.examples = p.examples;
    if (task.gold_query) {
      NormalizedQuery gold = normalize(*task.gold_query, *p.schema);
      ExecutionResult gold_result = execute(p.db, gold);
      if (auto* rows = std::get_if<ResultSet>(&gold_result)) {
        expected.gold_rows = rows->rows;
        expected.ordered = !gold.order_by.empty();
      }
    }
    std::optional<ExampleTuple> first;
    if (!p.examples.empty()) first = p.examples.front();
    for (const auto& text : tester.collected) {
      LabeledQuery q{task.id, text, label_by_execution(text, p.db, expected), predict_label(text, *p.schema, first)};
      ++matrix.counts[static_cast<std::size_t>(q.truth)][static_cast<std::size_t>(q.predicted)];
      matrix.queries.push_back(std::move(q));
    }
  }
  return matrix;
}

}  // namespace nsql
