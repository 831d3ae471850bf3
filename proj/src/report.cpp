#include <fmt/format.h>

#include "json.hpp"
#include "nsql/error.hpp"
#include "nsql/harness.hpp"

namespace nsql {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

SearchStatus status_from(std::string_view s) {
  for (auto st : {SearchStatus::Solved, SearchStatus::Exhausted, SearchStatus::TimedOut, SearchStatus::AdapterFailure})
    if (to_string(st) == s) return st;
  throw Error(Errc::ParseError, fmt::format("unknown status '{}'", s));
}

json config_json(const SearchConfig& c, bool prefilter) {
  return {{"k", c.k},
          {"time_limit_s", c.time_limit_s},
          {"mode", std::string(to_string(c.mode))},
          {"pqc", c.pqc_enabled},
          {"repair", c.repair_enabled},
          {"examples", c.use_examples},
          {"max_tokens", c.max_tokens},
          {"prefilter", prefilter}};
}

json task_json(const TaskReport& t) {
  return {{"id", t.id},
          {"db_id", t.db_id},
          {"status", std::string(to_string(t.status))},
          {"query", t.query ? json(*t.query) : json(nullptr)},
          {"repaired", t.repaired},
          {"execution_correct", t.execution_correct},
          {"exact_match", t.exact_match},
          {"elapsed_seconds", t.elapsed_seconds},
          {"nodes_expanded", t.nodes_expanded},
          {"candidates_generated", t.candidates_generated},
          {"pruned_by_checker", t.pruned_by_checker},
          {"complete_queries_tested", t.complete_queries_tested},
          {"backtracks", t.backtracks},
          {"error", t.error ? json(*t.error) : json(nullptr)}};
}

json report_json(const BenchmarkReport& r) {
  json tasks = json::array();
  for (const auto& t : r.tasks) tasks.push_back(task_json(t));
  const auto& a = r.aggregates;
  return {{"label", r.label},
          {"config", config_json(r.config, r.prefilter)},
          {"aggregates",
           {{"execution_accuracy", optional_number(a.execution_accuracy)},
            {"exact_match_accuracy", optional_number(a.exact_match_accuracy)},
            {"mean_seconds", optional_number(a.mean_seconds)},
            {"solve_rate", optional_number(a.solve_rate)},
            {"tasks", r.tasks.size()}}},
          {"tasks", tasks}};
}

std::string percent(const std::optional<double>& v) { return v ? fmt::format("{:.1f}", *v) : "n/a"; }
std::string seconds(const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : "n/a"; }

}  // namespace

std::string report_to_json(const BenchmarkReport& report) { return report_json(report).dump(2); }

std::string reports_to_json(const std::vector<BenchmarkReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(2);
}

BenchmarkReport report_from_json(std::string_view json_text) {
  try {
    json j = json::parse(json_text);
    BenchmarkReport r;
    r.label = j.value("label", "");
    const json& c = j.at("config");
    r.config.k = c.at("k").get<std::size_t>();
    r.config.time_limit_s = c.at("time_limit_s").get<double>();
    r.config.mode = c.at("mode").get<std::string>() == "single" ? AttemptMode::SingleAttempt
                                                                 : AttemptMode::MultipleAttempts;
    r.config.pqc_enabled = c.at("pqc").get<bool>();
    r.config.repair_enabled = c.at("repair").get<bool>();
    r.config.use_examples = c.at("examples").get<bool>();
    r.config.max_tokens = c.at("max_tokens").get<std::size_t>();
    r.prefilter = c.at("prefilter").get<bool>();
    for (const json& t : j.at("tasks")) {
      TaskReport tr;
      tr.id = t.at("id").get<std::string>();
      tr.db_id = t.at("db_id").get<std::string>();
      tr.status = status_from(t.at("status").get<std::string>());
      if (!t.at("query").is_null()) tr.query = t.at("query").get<std::string>();
      tr.repaired = t.at("repaired").get<bool>();
      tr.execution_correct = t.at("execution_correct").get<bool>();
      tr.exact_match = t.at("exact_match").get<bool>();
      tr.elapsed_seconds = t.at("elapsed_seconds").get<double>();
      tr.nodes_expanded = t.at("nodes_expanded").get<std::size_t>();
      tr.candidates_generated = t.at("candidates_generated").get<std::size_t>();
      tr.pruned_by_checker = t.at("pruned_by_checker").get<std::size_t>();
      tr.complete_queries_tested = t.at("complete_queries_tested").get<std::size_t>();
      tr.backtracks = t.at("backtracks").get<std::size_t>();
      if (!t.at("error").is_null()) tr.error = t.at("error").get<std::string>();
      r.tasks.push_back(std::move(tr));
    }
    const json& a = j.at("aggregates");
    r.aggregates.execution_accuracy = read_optional(a, "execution_accuracy");
    r.aggregates.exact_match_accuracy = read_optional(a, "exact_match_accuracy");
    r.aggregates.mean_seconds = read_optional(a, "mean_seconds");
    r.aggregates.solve_rate = read_optional(a, "solve_rate");
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

std::string report_table(const BenchmarkReport& report) {
  std::string out;
  if (!report.label.empty()) out += fmt::format("config: {}\n", report.label);
  out += fmt::format("{:<28} {:<26} {:<14} {:>5} {:>5} {:>8} {:>9}\n", "task", "db", "status", "exec", "em",
                     "expanded", "seconds");
  for (const auto& t : report.tasks)
    out += fmt::format("{:<28} {:<26} {:<14} {:>5} {:>5} {:>8} {:>9.3f}\n", t.id, t.db_id, to_string(t.status),
                       t.execution_correct ? "yes" : "no", t.exact_match ? "yes" : "no", t.nodes_expanded,
                       t.elapsed_seconds);
  const auto& a = report.aggregates;
  out += fmt::format("tasks {}  execution accuracy {}%  exact match {}%  solved {}%  mean time {}s\n",
                     report.tasks.size(), percent(a.execution_accuracy), percent(a.exact_match_accuracy),
                     percent(a.solve_rate), seconds(a.mean_seconds));
  return out;
}

std::string ablation_table(const std::vector<BenchmarkReport>& reports) {
  std::string out = fmt::format("{:<32} {:>8} {:>8} {:>8} {:>10}\n", "config", "exec%", "em%", "solved%", "mean s");
  for (const auto& r : reports) {
    const auto& a = r.aggregates;
    out += fmt::format("{:<32} {:>8} {:>8} {:>8} {:>10}\n", r.label, percent(a.execution_accuracy),
                       percent(a.exact_match_accuracy), percent(a.solve_rate), seconds(a.mean_seconds));
  }
  return out;
}

std::string matrix_to_json(const ConfusionMatrix& matrix) {
  json labels = json::array();
  for (std::size_t i = 0; i < kLabelCount; ++i) labels.push_back(std::string(to_string(static_cast<QueryLabel>(i))));
  json counts = json::array();
  for (const auto& row : matrix.counts) counts.push_back(json(row));
  json queries = json::array();
  for (const auto& q : matrix.queries)
    queries.push_back({{"task", q.task_id},
                       {"query", q.text},
                       {"truth", std::string(to_string(q.truth))},
                       {"predicted", std::string(to_string(q.predicted))}});
  auto agreement = matrix.agreement();
  return json{{"labels", labels},
              {"counts", counts},
              {"total", matrix.total()},
              {"agreement", optional_number(agreement)},
              {"queries", queries}}
      .dump(2);
}

std::string matrix_table(const ConfusionMatrix& matrix) {
  std::string out = fmt::format("{:<14}", "truth\\pred");
  for (std::size_t j = 0; j < kLabelCount; ++j) out += fmt::format(" {:>13}", to_string(static_cast<QueryLabel>(j)));
  out += '\n';
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    out += fmt::format("{:<14}", to_string(static_cast<QueryLabel>(i)));
    for (std::size_t j = 0; j < kLabelCount; ++j) out += fmt::format(" {:>13}", matrix.counts[i][j]);
    out += '\n';
  }
  auto agreement = matrix.agreement();
  out += fmt::format("queries {}  agreement {}\n", matrix.total(),
                     agreement ? fmt::format("{:.1f}%", 100 * *agreement) : std::string("n/a"));
  return out;
}

}  // namespace nsql
