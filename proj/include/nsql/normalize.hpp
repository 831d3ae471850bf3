#pragma once

#include <string_view>

#include "nsql/schema.hpp"
#include "nsql/sql_ast.hpp"

namespace nsql {

/// Rewrites standard SQL into Normalized SQL: aliases erased, columns qualified,
/// names spelled as in the schema.
NormalizedQuery normalize(std::string_view sql, const DatabaseSchema& schema);

/// Parses canonical Normalized SQL text without a schema. Throws Error(ParseError)
/// unless the text re-renders byte-identically.
NormalizedQuery parse_normalized(std::string_view text);

}  // namespace nsql
