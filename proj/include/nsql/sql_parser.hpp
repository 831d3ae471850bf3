#pragma once

#include <string_view>

#include "nsql/schema.hpp"
#include "nsql/sql_ast.hpp"

namespace nsql {

/// Parses one SELECT statement into the normalized AST.
///
/// With a schema, aliases are resolved and erased and unqualified columns are
/// qualified by unique ownership. Without one the parse is purely structural:
/// references must already be qualified and aliases are rejected.
NormalizedQuery parse_select_statement(std::string_view sql, const DatabaseSchema* schema);

}  // namespace nsql
