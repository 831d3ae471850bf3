#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nsql {

enum class ColumnType { Integer, Real, Text, Boolean, Other };

/// Integer and Real form the Numeric class used by type compatibility.
constexpr bool is_numeric(ColumnType type) { return type == ColumnType::Integer || type == ColumnType::Real; }

std::string_view to_string(ColumnType type);

/// Maps a Spider `column_types` entry to a column type. "number" maps to Integer;
/// TaskDatabase::refine_types demotes it to Real where stored values are fractional.
ColumnType column_type_from_spider(std::string_view spider_type);

struct Column {
  std::string name;
  ColumnType type = ColumnType::Other;
};

struct Table {
  std::string name;
  std::vector<Column> columns;

  /// Case-insensitive lookup.
  const Column* find_column(std::string_view column) const;
};

struct QualifiedColumn {
  std::string table;
  std::string column;

  std::string qualified() const { return table + "." + column; }
  bool operator==(const QualifiedColumn&) const = default;
};

struct ForeignKey {
  QualifiedColumn from;
  QualifiedColumn to;
};

struct DatabaseSchema {
  std::string db_id;
  std::vector<Table> tables;
  std::vector<ForeignKey> foreign_keys;

  /// Case-insensitive lookup.
  const Table* find_table(std::string_view name) const;
  Table* find_table(std::string_view name);

  /// Every table.column pair in declaration order.
  std::vector<QualifiedColumn> all_columns() const;

  /// Throws Error(ParseError) when table or column names collide or a foreign key
  /// names a missing column.
  void validate() const;
};

using SchemaMap = std::map<std::string, DatabaseSchema, std::less<>>;

/// Reads a Spider-format `tables.json`.
SchemaMap load_schemas(const std::filesystem::path& tables_file);
SchemaMap parse_schemas(std::string_view json_text);

bool iequals(std::string_view a, std::string_view b);
std::string to_upper(std::string_view text);
std::string to_lower(std::string_view text);

}  // namespace nsql
