#include "misstab/table.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

namespace misstab {

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::kTwoWayBothMissing: return "IxJx2x2";
    case Shape::kThreeWayOneMissing: return "IxJxKx2";
    case Shape::kThreeWayTwoMissing: return "IxJxKx2x2";
    case Shape::kUnsupported: break;
  }
  return "unsupported";
}

TableSchema::TableSchema(std::vector<Variable> variables, const std::vector<std::string>& missing)
    : variables_(std::move(variables)) {
  if (variables_.size() < 2 || variables_.size() > 3)
    throw DataError("a table needs 2 or 3 variables, got " + std::to_string(variables_.size()));
  std::set<std::string> names;
  for (const auto& v : variables_) {
    if (v.name.empty()) throw DataError("variable with empty name");
    if (v.levels < 2) throw DataError("variable " + v.name + " needs at least 2 levels");
    if (!names.insert(v.name).second) throw DataError("duplicate variable " + v.name);
  }
  for (const auto& name : missing) {
    const auto v = index_of(name);
    if (std::find(missing_.begin(), missing_.end(), v) != missing_.end())
      throw DataError("variable " + name + " listed twice as missing");
    missing_.push_back(v);
  }
  std::sort(missing_.begin(), missing_.end());
}

std::size_t TableSchema::index_of(std::string_view name) const {
  for (std::size_t v = 0; v < variables_.size(); ++v)
    if (variables_[v].name == name) return v;
  throw DataError("unknown variable '" + std::string(name) + "'");
}

bool TableSchema::is_missing(std::size_t v) const {
  return std::find(missing_.begin(), missing_.end(), v) != missing_.end();
}

std::size_t TableSchema::missing_position(std::size_t v) const {
  const auto it = std::find(missing_.begin(), missing_.end(), v);
  if (it == missing_.end())
    throw DataError("variable " + variables_.at(v).name + " has no missing indicator");
  return static_cast<std::size_t>(it - missing_.begin());
}

Pattern TableSchema::always_observed() const {
  Pattern p = full_pattern();
  for (auto v : missing_) p &= ~(Pattern{1} << v);
  return p;
}

std::vector<Pattern> TableSchema::patterns() const {
  std::vector<Pattern> out;
  const std::size_t m = missing_.size();
  for (std::size_t subset = 0; subset < (std::size_t{1} << m); ++subset) {
    Pattern p = always_observed();
    for (std::size_t b = 0; b < m; ++b)
      if (subset & (std::size_t{1} << b)) p |= Pattern{1} << missing_[b];
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](Pattern a, Pattern b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa > pb : a < b;
  });
  return out;
}

bool TableSchema::is_valid_pattern(Pattern p) const {
  const auto all = patterns();
  return std::find(all.begin(), all.end(), p) != all.end();
}

std::string TableSchema::describe(Pattern p) const {
  if (p == full_pattern()) return "{full}";
  std::string s = "{";
  bool first = true;
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (p & (Pattern{1} << v)) continue;
    if (!first) s += ",";
    s += variables_[v].name;
    first = false;
  }
  return s + " unobserved}";
}

Shape TableSchema::shape() const {
  if (variables_.size() == 2 && missing_.size() == 2) return Shape::kTwoWayBothMissing;
  if (variables_.size() == 3 && missing_.size() == 1) return Shape::kThreeWayOneMissing;
  if (variables_.size() == 3 && missing_.size() == 2) return Shape::kThreeWayTwoMissing;
  return Shape::kUnsupported;
}

void TableSchema::require_supported() const {
  if (shape() == Shape::kUnsupported)
    throw ShapeError("unsupported table shape: " + std::to_string(variables_.size()) +
                     " variables with " + std::to_string(missing_.size()) + " missing");
}

Stratum::Stratum(const TableSchema& schema, Pattern pattern, std::vector<std::int64_t> counts)
    : pattern_(pattern), counts_(std::move(counts)) {
  std::size_t cells = 1;
  for (std::size_t v = 0; v < schema.size(); ++v) {
    if (!(pattern & (Pattern{1} << v))) continue;
    axes_.push_back(v);
    extents_.push_back(schema.levels(v));
    cells *= static_cast<std::size_t>(schema.levels(v));
  }
  if (counts_.size() != cells)
    throw DataError("stratum " + schema.describe(pattern) + ": expected " + std::to_string(cells) +
                    " cells, got " + std::to_string(counts_.size()));
  for (std::size_t c = 0; c < counts_.size(); ++c)
    if (counts_[c] < 0)
      throw DataError("stratum " + schema.describe(pattern) + " cell " + std::to_string(c) +
                      ": negative count");
}

std::size_t Stratum::flat_index(std::span<const int> levels) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < extents_.size(); ++a)
    idx = idx * static_cast<std::size_t>(extents_[a]) + static_cast<std::size_t>(levels[a]);
  return idx;
}

std::int64_t Stratum::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

IncompleteTable::IncompleteTable(TableSchema schema, std::vector<Stratum> strata)
    : schema_(std::move(schema)) {
  for (const auto& s : strata)
    if (!schema_.is_valid_pattern(s.pattern()))
      throw DataError("stratum pattern " + schema_.describe(s.pattern()) +
                      " does not belong to the schema");
  for (Pattern p : schema_.patterns()) {
    auto matches = [p](const Stratum& s) { return s.pattern() == p; };
    const auto n = std::count_if(strata.begin(), strata.end(), matches);
    if (n == 0) throw DataError("missing stratum for pattern " + schema_.describe(p));
    if (n > 1) throw DataError("duplicate stratum for pattern " + schema_.describe(p));
    strata_.push_back(*std::find_if(strata.begin(), strata.end(), matches));
  }
  for (const auto& s : strata_) total_ += s.total();
}

const Stratum& IncompleteTable::stratum(Pattern p) const {
  for (const auto& s : strata_)
    if (s.pattern() == p) return s;
  throw DataError("no stratum for pattern " + schema_.describe(p));
}

const Stratum& IncompleteTable::without(std::size_t v) const {
  return stratum(schema_.full_pattern() & ~(Pattern{1} << v));
}

IncompleteTable subtable(const IncompleteTable& table, std::span<const Pattern> keep) {
  const auto& schema = table.schema();
  if (std::find(keep.begin(), keep.end(), schema.full_pattern()) == keep.end())
    throw DataError("subtable must keep the full pattern");
  Pattern always = schema.full_pattern();
  for (Pattern p : keep) {
    if (!schema.is_valid_pattern(p))
      throw DataError("unknown pattern " + schema.describe(p));
    always &= p;
  }
  std::vector<std::string> missing;
  for (std::size_t v = 0; v < schema.size(); ++v)
    if (!(always & (Pattern{1} << v))) missing.push_back(schema.variable(v).name);
  TableSchema reduced(schema.variables(), missing);
  std::vector<Stratum> strata;
  for (Pattern p : keep) {
    const auto& s = table.stratum(p);
    strata.emplace_back(reduced, p, std::vector<std::int64_t>(s.counts().begin(), s.counts().end()));
  }
  return IncompleteTable(std::move(reduced), std::move(strata));
}

IncompleteTable scale_counts(const IncompleteTable& table, std::int64_t factor) {
  if (factor < 1) throw DataError("scale factor must be >= 1");
  std::vector<Stratum> strata;
  for (const auto& s : table.strata()) {
    std::vector<std::int64_t> counts(s.counts().begin(), s.counts().end());
    for (auto& c : counts) c *= factor;
    strata.emplace_back(table.schema(), s.pattern(), std::move(counts));
  }
  return IncompleteTable(table.schema(), std::move(strata));
}

}  // namespace misstab
