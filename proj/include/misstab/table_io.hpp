#pragma once

#include <string>
#include <string_view>

#include "misstab/table.hpp"

namespace misstab {

// Structured document:
//   {"variables": [{"name": "Y1", "levels": 2}, ...],
//    "missing": ["Y1", "Y2"],
//    "strata": [{"observed": ["Y1", "Y2"], "counts": [[...], [...]]}, ...]}
// `counts` nests in the order of its `observed` list; a stratum with nothing
// observed holds a single number. Errors are DataError with a path prefix.
IncompleteTable parse_table_json(std::string_view text);

// Flat variant: header row names every variable then `count`; each row gives
// a 1-based level or `*` per variable. Levels are the largest index seen,
// a variable is missing if any row has `*`, unlisted cells are zero.
IncompleteTable parse_table_csv(std::string_view text);

// Dispatches on the extension (.csv, anything else is JSON).
IncompleteTable load_table_file(const std::string& path);

std::string to_json_text(const IncompleteTable& table, int indent = 2);
std::string to_csv_text(const IncompleteTable& table);

}  // namespace misstab
