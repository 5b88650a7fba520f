#pragma once
// Fixtures and independent oracles shared by the test suites.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "misstab/odds.hpp"
#include "misstab/table.hpp"

namespace testsupport {

using misstab::IncompleteTable;
using misstab::Pattern;
using misstab::Stratum;
using misstab::TableSchema;

inline IncompleteTable make_table(const TableSchema& schema, const std::map<Pattern, std::vector<std::int64_t>>& cells) {
  std::vector<Stratum> strata;
  for (const auto& [p, c] : cells) strata.emplace_back(schema, p, c);
  return IncompleteTable(schema, std::move(strata));
}

inline std::int64_t sum_all(const IncompleteTable& t) {
  std::int64_t n = 0;
  for (const auto& s : t.strata())
    for (auto c : s.counts()) n += c;
  return n;
}

// Count in stratum `s` at full-variable levels `y` (entries for unobserved
// variables are ignored). Row-major decoding written out by hand.
inline std::int64_t cell(const TableSchema& schema, const Stratum& s, const std::vector<int>& y) {
  std::size_t idx = 0;
  for (std::size_t v = 0; v < schema.size(); ++v) {
    if (!(s.pattern() >> v & 1)) continue;
    idx = idx * static_cast<std::size_t>(schema.levels(v)) + static_cast<std::size_t>(y[v]);
  }
  return s.counts()[idx];
}

// Ratio as a reduced fraction of doubles; den 0 means undefined.
struct Frac {
  std::int64_t num, den;
};

// Strict interval check by long double; independent from the library's
// integer cross-multiplication.
inline bool strictly_inside(Frac x, Frac lo, Frac hi) {
  const long double v = static_cast<long double>(x.num) / x.den;
  const long double a = static_cast<long double>(lo.num) / lo.den;
  const long double b = static_cast<long double>(hi.num) / hi.den;
  return a < v && v < b;
}

struct OracleQuery {
  std::vector<Frac> response;
  Frac nonresponse;
  bool defined = true;
  bool inside = false;
};

// Brute force: enumerate every level of the missing variable at the query's
// target/conditioning levels.
inline OracleQuery oracle_query(const IncompleteTable& t, const misstab::OddsQuery& q) {
  const auto& schema = t.schema();
  const auto& full = t.full();
  const auto& nr = t.without(q.missing);
  std::vector<int> y(schema.size(), 0);
  if (q.cond) y[*q.cond] = q.cond_level;
  OracleQuery out;
  for (int i = 0; i < schema.levels(q.missing); ++i) {
    y[q.missing] = i;
    y[q.target] = q.a;
    const auto n = cell(schema, full, y);
    y[q.target] = q.a2;
    const auto d = cell(schema, full, y);
    out.response.push_back({n, d});
    if (d == 0) out.defined = false;
  }
  y[q.target] = q.a;
  const auto n = cell(schema, nr, y);
  y[q.target] = q.a2;
  const auto d = cell(schema, nr, y);
  out.nonresponse = {n, d};
  if (d == 0) out.defined = false;
  if (!out.defined) return out;
  auto lo = out.response[0], hi = out.response[0];
  auto val = [](Frac f) { return static_cast<long double>(f.num) / f.den; };
  for (const auto& r : out.response) {
    if (val(r) < val(lo)) lo = r;
    if (val(r) > val(hi)) hi = r;
  }
  out.inside = strictly_inside(out.nonresponse, lo, hi);
  return out;
}

// Table whose supplemental margins are exact sums of the full stratum over
// the unobserved variables, multiplied by `weight`.
inline IncompleteTable proportional_margins(const TableSchema& schema, const std::vector<std::int64_t>& full,
                                            std::int64_t weight = 1) {
  std::map<Pattern, std::vector<std::int64_t>> cells;
  const Stratum fs(schema, schema.full_pattern(), full);
  for (auto p : schema.patterns()) {
    if (p == schema.full_pattern()) {
      cells[p] = full;
      continue;
    }
    std::size_t size = 1;
    for (std::size_t v = 0; v < schema.size(); ++v)
      if (p >> v & 1) size *= static_cast<std::size_t>(schema.levels(v));
    std::vector<std::int64_t> m(size, 0);
    std::vector<int> y(schema.size(), 0);
    for (std::size_t c = 0; c < full.size(); ++c) {
      std::size_t rest = c;
      for (std::size_t v = schema.size(); v-- > 0;) {
        y[v] = static_cast<int>(rest % static_cast<std::size_t>(schema.levels(v)));
        rest /= static_cast<std::size_t>(schema.levels(v));
      }
      std::size_t idx = 0;
      for (std::size_t v = 0; v < schema.size(); ++v)
        if (p >> v & 1) idx = idx * static_cast<std::size_t>(schema.levels(v)) + static_cast<std::size_t>(y[v]);
      m[idx] += weight * full[c];
    }
    cells[p] = m;
  }
  return make_table(schema, cells);
}

}  // namespace testsupport
