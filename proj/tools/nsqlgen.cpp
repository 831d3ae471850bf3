// nsqlgen: generate, benchmark and inspect Normalized SQL synthesis.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "nsql/error.hpp"
#include "nsql/harness.hpp"
#include "nsql/http_model.hpp"
#include "nsql/render.hpp"
#include "nsql/rewrite.hpp"
#include "nsql/scripted_model.hpp"

namespace {

constexpr int kConfigExit = 2;

struct ModelFlags {
  std::string model;
  std::size_t k = 5;
  double time_limit = 60;
  std::string mode = "multiple";
  bool no_pqc = false;
  bool no_repair = false;
  bool no_examples = false;
  bool no_prefilter = false;
  std::size_t max_tokens = 128;
  std::size_t workers = 1;

  void add(CLI::App* app) {
    app->add_option("--model", model, "scripted:<spec.json> or http:<url>")->required();
    app->add_option("--k", k, "candidates per expansion");
    app->add_option("--time-limit", time_limit, "seconds per task");
    app->add_option("--mode", mode, "single or multiple")->check(CLI::IsMember({"single", "multiple"}));
    app->add_flag("--no-pqc", no_pqc, "disable the partial query checker");
    app->add_flag("--no-repair", no_repair, "disable Hamming-1 repair");
    app->add_flag("--no-examples", no_examples, "hide examples from prompt, checker and tester");
    app->add_flag("--no-prefilter", no_prefilter, "execute repair variants without checking them first");
    app->add_option("--max-tokens", max_tokens, "token cap per query");
    app->add_option("--workers", workers, "parallel tasks");
  }

  nsql::RunOptions options() const {
    nsql::RunOptions o;
    o.search.k = k;
    o.search.time_limit_s = time_limit;
    o.search.mode = mode == "single" ? nsql::AttemptMode::SingleAttempt : nsql::AttemptMode::MultipleAttempts;
    o.search.pqc_enabled = !no_pqc;
    o.search.repair_enabled = !no_repair;
    o.search.use_examples = !no_examples;
    o.search.max_tokens = max_tokens;
    o.prefilter = !no_prefilter;
    o.task_workers = std::max<std::size_t>(1, workers);
    o.search.validate();
    return o;
  }
};

std::unique_ptr<nsql::LanguageModel> make_model(const std::string& spec) {
  if (spec.rfind("scripted:", 0) == 0)
    return std::make_unique<nsql::ScriptedModel>(nsql::ScriptedModel::load(spec.substr(9)));
  if (spec.rfind("http:", 0) == 0) {
    std::string url = spec.substr(5);
    if (url.rfind("//", 0) == 0) url = "http:" + url;
    else if (url.rfind("http://", 0) != 0) url = "http://" + url;
    return std::make_unique<nsql::HttpModel>(nsql::http_config_from_env(url));
  }
  throw nsql::Error(nsql::Errc::ConfigError, fmt::format("unknown model '{}'", spec));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw nsql::Error(nsql::Errc::ConfigError, fmt::format("cannot write '{}'", path));
  out << text;
}

void emit(const std::string& json, const std::string& json_out) {
  if (json_out.empty()) return;
  if (json_out == "-") std::cout << json << '\n';
  else write_file(json_out, json + "\n");
}

struct DatasetFlags {
  std::string tables;
  std::string tasks;
  std::string db_root;

  void add(CLI::App* app) {
    app->add_option("--dataset", tasks, "task file (JSON array of {db_id, question, query, examples})")->required();
    app->add_option("--tables", tables, "schema file in tables.json layout")->required();
    app->add_option("--db-root", db_root, "directory holding <db_id>/<db_id>.sqlite")->required();
  }

  /// Loads the dataset and keeps the tasks whose gold query normalizes.
  nsql::Dataset load() const {
    auto dataset = nsql::load_dataset(tables, tasks, db_root);
    auto rewritten = nsql::rewrite_dataset(dataset.tasks, dataset.schemas);
    for (const auto& r : rewritten.rejected) std::cerr << fmt::format("skipped {}: {}\n", r.id, r.reason);
    dataset.tasks = std::move(rewritten.normalized);
    return dataset;
  }
};

bool is_config_error(nsql::Errc code) {
  switch (code) {
    case nsql::Errc::ConfigError:
    case nsql::Errc::ParseError:
    case nsql::Errc::UnknownDbId:
    case nsql::Errc::DuplicateDbId:
    case nsql::Errc::SchemaMismatch:
    case nsql::Errc::DatabaseUnavailable:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalized SQL generation with checked best-first search"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "synthesize one query");
  ModelFlags gen_model;
  std::string gen_tables, gen_root, gen_db, gen_question, gen_json;
  std::vector<std::string> gen_examples;
  gen->add_option("--tables", gen_tables, "schema file")->required();
  gen->add_option("--db-root", gen_root, "database directory")->required();
  gen->add_option("--db-id", gen_db, "database id")->required();
  gen->add_option("--question", gen_question, "natural-language question")->required();
  gen->add_option("--example", gen_examples, "example output row as a JSON array; repeatable")->allow_extra_args(false);
  gen->add_option("--json-out", gen_json, "write the task report as JSON ('-' for stdout)");
  gen_model.add(gen);

  // bench
  auto* bench = app.add_subcommand("bench", "run every task of a dataset");
  ModelFlags bench_model;
  DatasetFlags bench_data;
  std::string bench_json;
  bench_data.add(bench);
  bench_model.add(bench);
  bench->add_option("--json-out", bench_json, "write the report as JSON ('-' for stdout)");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "run a grid of configurations");
  ModelFlags ablate_model;
  DatasetFlags ablate_data;
  std::string grid = "full", ablate_json;
  ablate_data.add(ablate);
  ablate_model.add(ablate);
  ablate->add_option("--grid", grid, "'full' or points like multi+pqc+repair+examples,single");
  ablate->add_option("--json-out", ablate_json, "write the reports as JSON ('-' for stdout)");

  // normalize
  auto* norm = app.add_subcommand("normalize", "rewrite gold queries to Normalized SQL");
  std::string norm_tables, norm_in, norm_out, norm_rejected;
  norm->add_option("--tables", norm_tables, "schema file")->required();
  norm->add_option("--input", norm_in, "task file")->required();
  norm->add_option("--output", norm_out, "normalized task file");
  norm->add_option("--rejected", norm_rejected, "rejected task list");

  // checker-exp
  auto* cexp = app.add_subcommand("checker-exp", "label top complete queries by execution and by the checker");
  ModelFlags cexp_model;
  DatasetFlags cexp_data;
  std::size_t per_task = 4;
  std::string cexp_json;
  cexp_data.add(cexp);
  cexp_model.add(cexp);
  cexp->add_option("--per-task", per_task, "complete queries collected per task");
  cexp->add_option("--json-out", cexp_json, "write the matrix as JSON ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*gen) {
      auto options = gen_model.options();
      auto model = make_model(gen_model.model);
      nsql::Dataset dataset;
      dataset.schemas = nsql::load_schemas(gen_tables);
      dataset.db_root = gen_root;
      auto it = dataset.schemas.find(gen_db);
      if (it == dataset.schemas.end())
        throw nsql::Error(nsql::Errc::UnknownDbId, fmt::format("db_id '{}'", gen_db));
      nsql::TaskDatabase::open(gen_root, gen_db).refine_types(it->second);
      nsql::TaskInstance task;
      task.id = "0";
      task.db_id = gen_db;
      task.question = gen_question;
      for (const auto& ex : gen_examples) task.examples.push_back(nsql::parse_example(ex));
      auto report = nsql::run_task(task, dataset, *model, options);
      nsql::BenchmarkReport wrapped{"generate", options.search, options.prefilter, {report}, {}};
      wrapped.aggregates = nsql::aggregate(wrapped.tasks);
      emit(nsql::report_to_json(wrapped), gen_json);
      if (report.query) std::cout << *report.query;
      std::cerr << fmt::format("status: {}{}\n", nsql::to_string(report.status), report.repaired ? " (repaired)" : "");
      if (report.error) std::cerr << "error: " << *report.error << '\n';
    } else if (*bench) {
      auto options = bench_model.options();
      auto model = make_model(bench_model.model);
      auto report = nsql::run_benchmark(bench_data.load(), *model, options, "bench");
      std::cout << nsql::report_table(report);
      emit(nsql::report_to_json(report), bench_json);
    } else if (*ablate) {
      auto options = ablate_model.options();
      auto model = make_model(ablate_model.model);
      auto reports = nsql::run_ablation(ablate_data.load(), *model, nsql::parse_grid(grid), options);
      std::cout << nsql::ablation_table(reports);
      std::cout << "examples on/off toggles the prompt and the checker/tester example only\n";
      emit(nsql::reports_to_json(reports), ablate_json);
    } else if (*norm) {
      auto schemas = nsql::load_schemas(norm_tables);
      auto tasks = nsql::load_tasks(norm_in, schemas);
      auto result = nsql::rewrite_dataset(tasks, schemas);
      if (!norm_out.empty()) nsql::save_tasks(norm_out, result.normalized);
      if (!norm_rejected.empty()) write_file(norm_rejected, nsql::rejected_to_json(result.rejected));
      std::cout << fmt::format("kept {} of {} queries, rejected {}\n", result.normalized.size(), tasks.size(),
                               result.rejected.size());
    } else if (*cexp) {
      auto options = cexp_model.options();
      auto model = make_model(cexp_model.model);
      auto matrix = nsql::run_checker_experiment(cexp_data.load(), *model, per_task, options);
      std::cout << nsql::matrix_table(matrix);
      emit(nsql::matrix_to_json(matrix), cexp_json);
    }
  } catch (const nsql::Error& e) {
    std::cerr << "nsqlgen: " << e.what() << '\n';
    return is_config_error(e.code()) ? kConfigExit : 1;
  }
  return 0;
}
