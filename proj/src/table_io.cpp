#include "misstab/table_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace misstab {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw DataError(path.empty() ? what : path + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

// Walks nested arrays with the given extents, appending leaves row-major.
void flatten(const json& node, std::span<const int> extents, const std::string& path,
             std::vector<std::int64_t>& out) {
  if (extents.empty()) {
    if (!node.is_number_integer()) fail(path, "count must be an integer");
    const auto v = node.get<std::int64_t>();
    if (v < 0) fail(path, "negative count");
    out.push_back(v);
    return;
  }
  if (!node.is_array()) fail(path, "expected an array");
  if (static_cast<int>(node.size()) != extents[0])
    fail(path, "expected " + std::to_string(extents[0]) + " entries, got " +
                   std::to_string(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i)
    flatten(node[i], extents.subspan(1), path + "[" + std::to_string(i) + "]", out);
}

Stratum parse_stratum(const TableSchema& schema, const json& node, const std::string& path) {
  const auto& observed = member(node, "observed", path);
  if (!observed.is_array()) fail(path + ".observed", "expected a list of names");
  std::vector<std::size_t> order;
  Pattern pattern = 0;
  for (std::size_t a = 0; a < observed.size(); ++a) {
    const auto ap = path + ".observed[" + std::to_string(a) + "]";
    if (!observed[a].is_string()) fail(ap, "expected a variable name");
    std::size_t v = 0;
    try {
      v = schema.index_of(observed[a].get<std::string>());
    } catch (const DataError& e) {
      fail(ap, e.what());
    }
    if (pattern & (Pattern{1} << v)) fail(ap, "variable listed twice");
    pattern |= Pattern{1} << v;
    order.push_back(v);
  }
  if (!schema.is_valid_pattern(pattern))
    fail(path + ".observed", "pattern " + schema.describe(pattern) + " is not allowed by 'missing'");

  std::vector<int> extents;
  for (auto v : order) extents.push_back(schema.levels(v));
  std::vector<std::int64_t> given;
  flatten(member(node, "counts", path), extents, path + ".counts", given);

  // transpose from document order to declared order
  std::vector<std::size_t> declared(order);
  std::sort(declared.begin(), declared.end());
  std::vector<int> dext;
  for (auto v : declared) dext.push_back(schema.levels(v));
  std::vector<std::int64_t> counts(given.size());
  std::vector<int> idx(order.size(), 0);
  for (std::size_t flat = 0; flat < given.size(); ++flat) {
    std::size_t target = 0;
    for (std::size_t d = 0; d < declared.size(); ++d) {
      const auto pos = static_cast<std::size_t>(
          std::find(order.begin(), order.end(), declared[d]) - order.begin());
      target = target * static_cast<std::size_t>(dext[d]) + static_cast<std::size_t>(idx[pos]);
    }
    counts[target] = given[flat];
    for (std::size_t a = order.size(); a-- > 0;) {
      if (++idx[a] < extents[a]) break;
      idx[a] = 0;
    }
  }
  return Stratum(schema, pattern, std::move(counts));
}

json nest(std::span<const std::int64_t> counts, std::span<const int> extents) {
  if (extents.empty()) return counts[0];
  json arr = json::array();
  std::size_t block = counts.size() / static_cast<std::size_t>(extents[0]);
  for (int i = 0; i < extents[0]; ++i)
    arr.push_back(nest(counts.subspan(static_cast<std::size_t>(i) * block, block), extents.subspan(1)));
  return arr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::int64_t parse_int(const std::string& s, const std::string& where) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(where, "not an integer: '" + s + "'");
  return v;
}

}  // namespace

IncompleteTable parse_table_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("parse error: ") + e.what());
  }
  const auto& vars = member(doc, "variables", "");
  if (!vars.is_array()) fail("variables", "expected a list");
  std::vector<Variable> variables;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto path = "variables[" + std::to_string(v) + "]";
    const auto& name = member(vars[v], "name", path);
    const auto& levels = member(vars[v], "levels", path);
    if (!name.is_string()) fail(path + ".name", "expected a string");
    if (!levels.is_number_integer()) fail(path + ".levels", "expected an integer");
    variables.push_back({name.get<std::string>(), levels.get<int>()});
  }
  const auto& miss = member(doc, "missing", "");
  if (!miss.is_array()) fail("missing", "expected a list of names");
  std::vector<std::string> missing;
  for (std::size_t m = 0; m < miss.size(); ++m) {
    if (!miss[m].is_string()) fail("missing[" + std::to_string(m) + "]", "expected a name");
    missing.push_back(miss[m].get<std::string>());
  }
  TableSchema schema(std::move(variables), missing);

  const auto& strata_node = member(doc, "strata", "");
  if (!strata_node.is_array()) fail("strata", "expected a list");
  std::vector<Stratum> strata;
  for (std::size_t s = 0; s < strata_node.size(); ++s)
    strata.push_back(parse_stratum(schema, strata_node[s], "strata[" + std::to_string(s) + "]"));
  return IncompleteTable(std::move(schema), std::move(strata));
}

IncompleteTable parse_table_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> header;
  int lineno = 0;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) header = split_csv(trim(line));
  }
  if (header.size() < 3 || header.back() != "count")
    throw DataError("csv: header must list the variables followed by 'count'");
  const std::size_t nvar = header.size() - 1;

  struct Row {
    std::vector<int> levels;  // -1 for unobserved
    std::int64_t count;
    int line;
  };
  std::vector<Row> rows;
  std::vector<int> max_level(nvar, 0);
  std::vector<bool> any_star(nvar, false);
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto where = "csv line " + std::to_string(lineno);
    auto fields = split_csv(trim(line));
    if (fields.size() != header.size())
      fail(where, "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    Row row{std::vector<int>(nvar), 0, lineno};
    for (std::size_t v = 0; v < nvar; ++v) {
      if (fields[v] == "*") {
        row.levels[v] = -1;
        any_star[v] = true;
        continue;
      }
      const auto lv = parse_int(fields[v], where);
      if (lv < 1) fail(where, "levels are 1-based");
      row.levels[v] = static_cast<int>(lv - 1);
      max_level[v] = std::max(max_level[v], static_cast<int>(lv));
    }
    row.count = parse_int(fields.back(), where);
    if (row.count < 0) fail(where, "negative count");
    rows.push_back(std::move(row));
  }

  std::vector<Variable> variables;
  std::vector<std::string> missing;
  for (std::size_t v = 0; v < nvar; ++v) {
    variables.push_back({header[v], max_level[v]});
    if (any_star[v]) missing.push_back(header[v]);
  }
  TableSchema schema(std::move(variables), missing);

  std::map<Pattern, std::vector<std::int64_t>> cells;
  std::map<Pattern, std::vector<bool>> seen;
  for (Pattern p : schema.patterns()) {
    std::size_t n = 1;
    for (std::size_t v = 0; v < nvar; ++v)
      if (p & (Pattern{1} << v)) n *= static_cast<std::size_t>(schema.levels(v));
    cells[p].assign(n, 0);
    seen[p].assign(n, false);
  }
  std::map<Pattern, bool> present;
  for (const auto& row : rows) {
    Pattern p = 0;
    std::size_t idx = 0;
    for (std::size_t v = 0; v < nvar; ++v)
      if (row.levels[v] >= 0) {
        p |= Pattern{1} << v;
        idx = idx * static_cast<std::size_t>(schema.levels(v)) + static_cast<std::size_t>(row.levels[v]);
      }
    const auto where = "csv line " + std::to_string(row.line);
    auto it = cells.find(p);
    if (it == cells.end()) fail(where, "pattern " + schema.describe(p) + " not allowed");
    if (seen[p][idx]) fail(where, "duplicate cell");
    seen[p][idx] = true;
    it->second[idx] = row.count;
    present[p] = true;
  }
  std::vector<Stratum> strata;
  for (auto& [p, counts] : cells)
    if (present[p]) strata.emplace_back(schema, p, std::move(counts));
  return IncompleteTable(std::move(schema), std::move(strata));
}

IncompleteTable load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? parse_table_csv(buf.str()) : parse_table_json(buf.str());
}

std::string to_json_text(const IncompleteTable& table, int indent) {
  const auto& schema = table.schema();
  json doc;
  doc["variables"] = json::array();
  for (const auto& v : schema.variables()) doc["variables"].push_back({{"name", v.name}, {"levels", v.levels}});
  doc["missing"] = json::array();
  for (auto v : schema.missing()) doc["missing"].push_back(schema.variable(v).name);
  doc["strata"] = json::array();
  for (const auto& s : table.strata()) {
    json obs = json::array();
    for (auto v : s.axes()) obs.push_back(schema.variable(v).name);
    doc["strata"].push_back({{"observed", obs}, {"counts", nest(s.counts(), s.extents())}});
  }
  return doc.dump(indent);
}

std::string to_csv_text(const IncompleteTable& table) {
  const auto& schema = table.schema();
  std::ostringstream out;
  for (const auto& v : schema.variables()) out << v.name << ',';
  out << "count\n";
  for (const auto& s : table.strata()) {
    std::vector<int> idx(s.axes().size(), 0);
    for (std::size_t c = 0; c < s.cell_count(); ++c) {
      std::size_t a = 0;
      for (std::size_t v = 0; v < schema.size(); ++v) {
        if (a < s.axes().size() && s.axes()[a] == v)
          out << idx[a++] + 1 << ',';
        else
          out << "*,";
      }
      out << s.counts()[c] << '\n';
      for (std::size_t k = idx.size(); k-- > 0;) {
        if (++idx[k] < s.extents()[k]) break;
        idx[k] = 0;
      }
    }
  }
  return out.str();
}

}  // namespace misstab
