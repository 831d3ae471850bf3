#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nsql/classify.hpp"
#include "nsql/lm.hpp"
#include "nsql/repair.hpp"
#include "nsql/schema.hpp"
#include "nsql/search.hpp"
#include "nsql/task.hpp"

namespace nsql {

struct Dataset {
  SchemaMap schemas;
  std::vector<TaskInstance> tasks;
  std::filesystem::path db_root;
};

/// Loads schemas and tasks, refining column types from each database that exists.
Dataset load_dataset(const std::filesystem::path& tables_file, const std::filesystem::path& tasks_file,
                     const std::filesystem::path& db_root);

struct RunOptions {
  SearchConfig search;
  bool prefilter = true;
  std::size_t repair_workers = 1;
  /// Tasks run concurrently, one search loop each.
  std::size_t task_workers = 1;
};

struct TaskReport {
  std::string id;
  std::string db_id;
  SearchStatus status = SearchStatus::Exhausted;
  std::optional<std::string> query;
  bool repaired = false;
  bool execution_correct = false;
  bool exact_match = false;
  double elapsed_seconds = 0;
  std::size_t nodes_expanded = 0;
  std::size_t candidates_generated = 0;
  std::size_t pruned_by_checker = 0;
  std::size_t complete_queries_tested = 0;
  std::size_t backtracks = 0;
  std::optional<std::string> error;

  bool operator==(const TaskReport&) const = default;
};

struct Aggregates {
  std::optional<double> execution_accuracy;
  std::optional<double> exact_match_accuracy;
  std::optional<double> mean_seconds;
  std::optional<double> solve_rate;

  bool operator==(const Aggregates&) const = default;
};

struct BenchmarkReport {
  std::string label;
  SearchConfig config;
  bool prefilter = true;
  std::vector<TaskReport> tasks;
  Aggregates aggregates;
};

/// Percentages in [0, 100] and mean seconds; empty when there are no tasks.
Aggregates aggregate(const std::vector<TaskReport>& tasks);

/// Examples used for a task: its own, or the first row of its gold query.
std::vector<ExampleTuple> task_examples(const TaskInstance& task, const TaskDatabase& db);

TaskReport run_task(const TaskInstance& task, const Dataset& dataset, const LanguageModel& model,
                    const RunOptions& options);

BenchmarkReport run_benchmark(const Dataset& dataset, const LanguageModel& model, const RunOptions& options,
                              std::string label = "");

struct AblationPoint {
  AttemptMode mode = AttemptMode::MultipleAttempts;
  bool pqc = true;
  bool repair = true;
  bool examples = true;

  std::string label() const;
};

/// Every combination of mode, checker, repair and examples.
std::vector<AblationPoint> full_grid();

/// Parses "full" or comma-separated points such as "multi+pqc+repair+examples,single".
std::vector<AblationPoint> parse_grid(std::string_view spec);

std::vector<BenchmarkReport> run_ablation(const Dataset& dataset, const LanguageModel& model,
                                          const std::vector<AblationPoint>& grid, const RunOptions& base);

struct LabeledQuery {
  std::string task_id;
  std::string text;
  QueryLabel truth;
  QueryLabel predicted;
};

struct ConfusionMatrix {
  /// counts[truth][predicted].
  std::array<std::array<std::size_t, kLabelCount>, kLabelCount> counts{};
  std::vector<LabeledQuery> queries;

  std::size_t total() const;
  std::optional<double> agreement() const;
};

/// Labels up to `per_task` complete queries per task, collected with the checker off.
ConfusionMatrix run_checker_experiment(const Dataset& dataset, const LanguageModel& model, std::size_t per_task = 4,
                                       const RunOptions& options = {});

std::string report_to_json(const BenchmarkReport& report);
BenchmarkReport report_from_json(std::string_view json_text);
std::string reports_to_json(const std::vector<BenchmarkReport>& reports);
std::string report_table(const BenchmarkReport& report);
std::string ablation_table(const std::vector<BenchmarkReport>& reports);
std::string matrix_to_json(const ConfusionMatrix& matrix);
std::string matrix_table(const ConfusionMatrix& matrix);

}  // namespace nsql
