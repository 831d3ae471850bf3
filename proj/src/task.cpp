#include "nsql/task.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "nsql/error.hpp"

namespace nsql {

using nlohmann::json;

namespace {

ExampleTuple example_from_json(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw Error(Errc::ParseError, "example must be a non-empty JSON array");
  ExampleTuple tuple;
  for (const auto& v : arr) {
    if (v.is_boolean()) {
      tuple.values.emplace_back(static_cast<std::int64_t>(v.get<bool>() ? 1 : 0));
      tuple.types.push_back(ColumnType::Boolean);
    } else if (v.is_number_integer()) {
      tuple.values.emplace_back(v.get<std::int64_t>());
      tuple.types.push_back(ColumnType::Integer);
    } else if (v.is_number_float()) {
      tuple.values.emplace_back(v.get<double>());
      tuple.types.push_back(ColumnType::Real);
    } else if (v.is_string()) {
      tuple.values.emplace_back(v.get<std::string>());
      tuple.types.push_back(ColumnType::Text);
    } else if (v.is_null()) {
      tuple.values.emplace_back(Null{});
      tuple.types.push_back(ColumnType::Other);
    } else {
      throw Error(Errc::ParseError, "example values must be scalars");
    }
  }
  return tuple;
}

json example_json(const ExampleTuple& tuple) {
  json arr = json::array();
  for (std::size_t i = 0; i < tuple.values.size(); ++i) {
    const auto& v = tuple.values[i];
    switch (v.index()) {
      case 0: arr.push_back(nullptr); break;
      case 1:
        if (tuple.types[i] == ColumnType::Boolean)
          arr.push_back(std::get<1>(v) != 0);
        else
          arr.push_back(std::get<1>(v));
        break;
      case 2: arr.push_back(std::get<2>(v)); break;
      default: arr.push_back(std::get<3>(v)); break;
    }
  }
  return arr;
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::ParseError, fmt::format("cannot open '{}'", file.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::vector<TaskInstance> parse_tasks(std::string_view json_text, const SchemaMap& schemas) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  if (!doc.is_array()) throw Error(Errc::ParseError, "task file must hold a JSON array");

  std::vector<TaskInstance> tasks;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& rec = doc[i];
    TaskInstance task;
    try {
      task.db_id = rec.at("db_id").get<std::string>();
      task.question = rec.at("question").get<std::string>();
      if (rec.contains("query") && !rec.at("query").is_null()) task.gold_query = rec.at("query").get<std::string>();
      if (rec.contains("id")) {
        const auto& id = rec.at("id");
        task.id = id.is_string() ? id.get<std::string>() : id.dump();
      } else {
        task.id = std::to_string(i);
      }
      if (rec.contains("examples"))
        for (const auto& ex : rec.at("examples")) task.examples.push_back(example_from_json(ex));
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, fmt::format("record {}: {}", i, e.what()));
    }
    if (!schemas.count(task.db_id))
      throw Error(Errc::UnknownDbId, fmt::format("record {}: db_id '{}'", i, task.db_id));
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<TaskInstance> load_tasks(const std::filesystem::path& dataset_file, const SchemaMap& schemas) {
  return parse_tasks(read_file(dataset_file), schemas);
}

std::string tasks_to_json(const std::vector<TaskInstance>& tasks) {
  json doc = json::array();
  for (const auto& task : tasks) {
    json rec = {{"id", task.id}, {"db_id", task.db_id}, {"question", task.question}};
    rec["query"] = task.gold_query ? json(*task.gold_query) : json(nullptr);
    if (!task.examples.empty()) {
      rec["examples"] = json::array();
      for (const auto& ex : task.examples) rec["examples"].push_back(example_json(ex));
    }
    doc.push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

void save_tasks(const std::filesystem::path& file, const std::vector<TaskInstance>& tasks) {
  std::ofstream out(file);
  if (!out) throw Error(Errc::ConfigError, fmt::format("cannot write '{}'", file.string()));
  out << tasks_to_json(tasks);
}

ExampleTuple parse_example(std::string_view json_text) {
  try {
    return example_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

std::string example_to_json(const ExampleTuple& tuple) { return example_json(tuple).dump(); }

ExampleTuple derive_example(const TaskDatabase& db, std::string_view gold_query) {
  auto result = db.run(gold_query);
  if (const auto* failure = std::get_if<RuntimeFailure>(&result)) throw Error(Errc::ExecutionError, failure->message);
  if (std::holds_alternative<Timeout>(result)) throw Error(Errc::ExecutionError, "gold query timed out");
  const auto& rows = std::get<ResultSet>(result).rows;
  if (rows.empty()) throw Error(Errc::EmptyResult, std::string(gold_query));
  return ExampleTuple::from_values(rows.front());
}

std::string serialize_task(const TaskInstance& task, const DatabaseSchema& schema, bool include_examples) {
  std::string out = fmt::format("question: {}\n{}\n", task.question, kSectionDelimiter);
  for (const auto& table : schema.tables) {
    out += table.name;
    out += '(';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out += ", ";
      out += fmt::format("{}:{}", table.columns[i].name, to_string(table.columns[i].type));
    }
    out += ")\n";
  }
  out += kSectionDelimiter;
  out += '\n';
  if (!include_examples || task.examples.empty()) return out + "examples: none\n";
  out += "examples:\n";
  for (const auto& ex : task.examples) {
    out += '(';
    for (std::size_t i = 0; i < ex.values.size(); ++i) {
      if (i) out += ", ";
      out += to_literal(ex.values[i]);
    }
    out += ")\n";
  }
  return out;
}

}  // namespace nsql
