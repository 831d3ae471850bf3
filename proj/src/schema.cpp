#include "nsql/schema.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "nsql/error.hpp"

namespace nsql {

using nlohmann::json;

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string to_upper(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::Integer: return "integer";
    case ColumnType::Real: return "real";
    case ColumnType::Text: return "text";
    case ColumnType::Boolean: return "boolean";
    case ColumnType::Other: return "other";
  }
  return "other";
}

ColumnType column_type_from_spider(std::string_view spider_type) {
  if (iequals(spider_type, "number")) return ColumnType::Integer;
  if (iequals(spider_type, "text")) return ColumnType::Text;
  if (iequals(spider_type, "boolean")) return ColumnType::Boolean;
  return ColumnType::Other;
}

const Column* Table::find_column(std::string_view column) const {
  for (const auto& c : columns)
    if (iequals(c.name, column)) return &c;
  return nullptr;
}

const Table* DatabaseSchema::find_table(std::string_view name) const {
  for (const auto& t : tables)
    if (iequals(t.name, name)) return &t;
  return nullptr;
}

Table* DatabaseSchema::find_table(std::string_view name) {
  for (auto& t : tables)
    if (iequals(t.name, name)) return &t;
  return nullptr;
}

std::vector<QualifiedColumn> DatabaseSchema::all_columns() const {
  std::vector<QualifiedColumn> out;
  for (const auto& t : tables)
    for (const auto& c : t.columns) out.push_back({t.name, c.name});
  return out;
}

void DatabaseSchema::validate() const {
  std::set<std::string> table_names;
  for (const auto& t : tables) {
    if (!table_names.insert(to_lower(t.name)).second)
      throw Error(Errc::ParseError, fmt::format("db '{}': duplicate table '{}'", db_id, t.name));
    std::set<std::string> column_names;
    for (const auto& c : t.columns)
      if (!column_names.insert(to_lower(c.name)).second)
        throw Error(Errc::ParseError, fmt::format("db '{}': duplicate column '{}.{}'", db_id, t.name, c.name));
  }
  for (const auto& fk : foreign_keys) {
    for (const auto* end : {&fk.from, &fk.to}) {
      const Table* t = find_table(end->table);
      if (!t || !t->find_column(end->column))
        throw Error(Errc::ParseError,
                    fmt::format("db '{}': foreign key names missing column '{}'", db_id, end->qualified()));
    }
  }
}

namespace {

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

DatabaseSchema schema_from_json(const json& entry) {
  DatabaseSchema schema;
  schema.db_id = trimmed(entry.at("db_id").get<std::string>());

  const json& table_names = entry.contains("table_names_original") ? entry.at("table_names_original")
                                                                    : entry.at("table_names");
  const json& column_names = entry.contains("column_names_original") ? entry.at("column_names_original")
                                                                      : entry.at("column_names");
  const json& column_types = entry.at("column_types");
  if (column_types.size() != column_names.size())
    throw Error(Errc::ParseError, fmt::format("db '{}': column_types and column_names differ in length", schema.db_id));

  for (const auto& name : table_names) schema.tables.push_back({trimmed(name.get<std::string>()), {}});

  // Flat column index → (table index, column index) for foreign keys. Index 0 is Spider's "*".
  std::vector<std::pair<int, int>> flat(column_names.size(), {-1, -1});
  for (std::size_t i = 0; i < column_names.size(); ++i) {
    int table_index = column_names[i].at(0).get<int>();
    if (table_index < 0) continue;
    if (static_cast<std::size_t>(table_index) >= schema.tables.size())
      throw Error(Errc::ParseError, fmt::format("db '{}': column refers to table #{}", schema.db_id, table_index));
    auto& table = schema.tables[table_index];
    flat[i] = {table_index, static_cast<int>(table.columns.size())};
    table.columns.push_back(
        {trimmed(column_names[i].at(1).get<std::string>()), column_type_from_spider(column_types[i].get<std::string>())});
  }

  if (entry.contains("foreign_keys")) {
    for (const auto& fk : entry.at("foreign_keys")) {
      auto a = fk.at(0).get<std::size_t>();
      auto b = fk.at(1).get<std::size_t>();
      if (a >= flat.size() || b >= flat.size() || flat[a].first < 0 || flat[b].first < 0)
        throw Error(Errc::ParseError, fmt::format("db '{}': foreign key index out of range", schema.db_id));
      auto endpoint = [&](std::size_t idx) {
        const auto& t = schema.tables[flat[idx].first];
        return QualifiedColumn{t.name, t.columns[flat[idx].second].name};
      };
      schema.foreign_keys.push_back({endpoint(a), endpoint(b)});
    }
  }
  schema.validate();
  return schema;
}

}  // namespace

SchemaMap parse_schemas(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  if (!doc.is_array()) throw Error(Errc::ParseError, "tables file must hold a JSON array");

  SchemaMap out;
  for (const auto& entry : doc) {
    DatabaseSchema schema;
    try {
      schema = schema_from_json(entry);
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, e.what());
    }
    std::string id = schema.db_id;
    if (!out.emplace(id, std::move(schema)).second) throw Error(Errc::DuplicateDbId, id);
  }
  return out;
}

SchemaMap load_schemas(const std::filesystem::path& tables_file) {
  std::ifstream in(tables_file);
  if (!in) throw Error(Errc::ParseError, fmt::format("cannot open '{}'", tables_file.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_schemas(buffer.str());
}

}  // namespace nsql
