#pragma once

#include <string>

#include "nsql/sql_ast.hpp"

namespace nsql {

/// Canonical structural key with constants masked. SELECT items, FROM tables,
/// join conditions, AND/OR operands and GROUP BY columns are order-insensitive;
/// ORDER BY is order-sensitive.
std::string structure_key(const NormalizedQuery& q);

bool exact_match(const NormalizedQuery& a, const NormalizedQuery& b);

}  // namespace nsql
