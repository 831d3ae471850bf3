#include "nsql/normalize.hpp"

#include "nsql/error.hpp"
#include "nsql/render.hpp"
#include "nsql/sql_parser.hpp"

namespace nsql {

NormalizedQuery normalize(std::string_view sql, const DatabaseSchema& schema) {
  return parse_select_statement(sql, &schema);
}

NormalizedQuery parse_normalized(std::string_view text) {
  auto q = parse_select_statement(text, nullptr);
  if (render(q) != text) throw Error(Errc::ParseError, "text is not in canonical layout");
  return q;
}

}  // namespace nsql
