#include "misstab/odds.hpp"

#include <algorithm>

namespace misstab {
namespace {

// Count in stratum `s` with `assign[v]` giving the level of each variable
// (entries for unobserved variables are ignored).
std::int64_t cell(const Stratum& s, const std::vector<int>& assign) {
  std::vector<int> lv;
  lv.reserve(s.axes().size());
  for (auto v : s.axes()) lv.push_back(assign[v]);
  return s.at(lv);
}

std::vector<int> assignment(const TableSchema& schema, const OddsQuery& q, int target_level) {
  std::vector<int> assign(schema.size(), 0);
  assign[q.target] = target_level;
  if (q.cond) assign[*q.cond] = q.cond_level;
  return assign;
}

void check_query(const TableSchema& schema, const OddsQuery& q) {
  schema.require_supported();
  if (!schema.is_missing(q.missing)) throw DataError("query variable has no missing indicator");
  if (q.target == q.missing || q.target >= schema.size()) throw DataError("bad query target");
  if (q.a == q.a2 || q.a < 0 || q.a2 < 0 || q.a >= schema.levels(q.target) ||
      q.a2 >= schema.levels(q.target))
    throw DataError("bad query level pair");
  const std::size_t expected_cond = schema.size() == 3 ? 1 : 0;
  if ((q.cond ? 1u : 0u) != expected_cond) throw DataError("bad query conditioning");
  if (q.cond && (*q.cond == q.missing || *q.cond == q.target || q.cond_level < 0 ||
                 q.cond_level >= schema.levels(*q.cond)))
    throw DataError("bad query conditioning");
}

}  // namespace

int compare(const Ratio& a, const Ratio& b) {
  const __int128 l = static_cast<__int128>(a.num) * b.den;
  const __int128 r = static_cast<__int128>(b.num) * a.den;
  return l < r ? -1 : (l > r ? 1 : 0);
}

std::string describe(const OddsQuery& q, const TableSchema& schema) {
  std::string s = schema.variable(q.missing).name + " missing: " + schema.variable(q.target).name +
                  " (" + std::to_string(q.a + 1) + "," + std::to_string(q.a2 + 1) + ")";
  if (q.cond) s += " at " + schema.variable(*q.cond).name + "=" + std::to_string(q.cond_level + 1);
  return s;
}

std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::kInside: return "inside";
    case Membership::kOutside: return "outside";
    case Membership::kUndefined: break;
  }
  return "undefined";
}

std::string_view to_string(MembershipNote n) {
  switch (n) {
    case MembershipNote::kEndpointTie: return "endpoint tie";
    case MembershipNote::kDegenerate: return "degenerate interval";
    case MembershipNote::kNone: break;
  }
  return "";
}

std::string_view to_string(SuggestedClass c) {
  switch (c) {
    case SuggestedClass::kMar: return "MAR";
    case SuggestedClass::kMcarOrNmar: return "MCAR-or-NMAR";
    case SuggestedClass::kInconclusive: break;
  }
  return "inconclusive";
}

std::vector<OddsQuery> list_queries(const TableSchema& schema) {
  schema.require_supported();
  std::vector<OddsQuery> out;
  for (auto m : schema.missing()) {
    for (std::size_t t = 0; t < schema.size(); ++t) {
      if (t == m) continue;
      std::optional<std::size_t> w;
      for (std::size_t v = 0; v < schema.size(); ++v)
        if (v != m && v != t) w = v;
      for (int a = 0; a < schema.levels(t); ++a)
        for (int a2 = a + 1; a2 < schema.levels(t); ++a2) {
          if (!w) {
            out.push_back({m, t, a, a2, std::nullopt, 0});
            continue;
          }
          for (int l = 0; l < schema.levels(*w); ++l) out.push_back({m, t, a, a2, w, l});
        }
    }
  }
  return out;
}

OddsInterval response_odds_unchecked(const IncompleteTable& table, const OddsQuery& q) {
  const auto& schema = table.schema();
  check_query(schema, q);
  OddsInterval out;
  auto num = assignment(schema, q, q.a);
  auto den = assignment(schema, q, q.a2);
  for (int i = 0; i < schema.levels(q.missing); ++i) {
    num[q.missing] = den[q.missing] = i;
    Ratio r{cell(table.full(), num), cell(table.full(), den)};
    out.values.push_back(r);
    if (!r.defined()) {
      out.any_undefined = true;
      continue;
    }
    if (!out.min || compare(r, *out.min) < 0) out.min = r;
    if (!out.max || compare(r, *out.max) > 0) out.max = r;
  }
  return out;
}

OddsInterval response_odds(const IncompleteTable& table, const OddsQuery& q) {
  auto out = response_odds_unchecked(table, q);
  if (!out.min) throw DataError("no defined response odds");
  return out;
}

Ratio nonresponse_odds(const IncompleteTable& table, const OddsQuery& q) {
  const auto& schema = table.schema();
  check_query(schema, q);
  const auto& s = table.without(q.missing);
  return {cell(s, assignment(schema, q, q.a)), cell(s, assignment(schema, q, q.a2))};
}

MembershipResult membership(const Ratio& value, const OddsInterval& interval) {
  if (!value.defined() || interval.any_undefined || !interval.min) return {};
  const int lo = compare(value, *interval.min);
  const int hi = compare(value, *interval.max);
  if (compare(*interval.min, *interval.max) == 0)
    return {Membership::kOutside, MembershipNote::kDegenerate};
  if (lo == 0 || hi == 0) return {Membership::kOutside, MembershipNote::kEndpointTie};
  return {lo > 0 && hi < 0 ? Membership::kInside : Membership::kOutside, MembershipNote::kNone};
}

SuggestedClass classify(const std::vector<MembershipResult>& results) {
  bool any_defined = false;
  for (const auto& r : results) {
    if (r.membership == Membership::kOutside) return SuggestedClass::kMar;
    if (r.membership == Membership::kInside) any_defined = true;
  }
  return any_defined ? SuggestedClass::kMcarOrNmar : SuggestedClass::kInconclusive;
}

AssessmentVerdict assess(const IncompleteTable& table) {
  const auto& schema = table.schema();
  AssessmentVerdict verdict;
  std::vector<MembershipResult> all;
  for (auto m : schema.missing()) verdict.families.push_back({m, {}, SuggestedClass::kInconclusive});
  for (const auto& q : list_queries(schema)) {
    auto& fam = verdict.families[schema.missing_position(q.missing)];
    QueryResult r{q, nonresponse_odds(table, q), response_odds_unchecked(table, q), {}};
    r.result = membership(r.nonresponse, r.interval);
    switch (r.result.membership) {
      case Membership::kInside: ++fam.inside; break;
      case Membership::kOutside: ++fam.outside; break;
      case Membership::kUndefined: ++fam.undefined; break;
    }
    all.push_back(r.result);
    fam.queries.push_back(std::move(r));
  }
  for (auto& fam : verdict.families) {
    std::vector<MembershipResult> rs;
    for (const auto& r : fam.queries) rs.push_back(r.result);
    fam.suggested = classify(rs);
  }
  verdict.suggested = classify(all);
  return verdict;
}

}  // namespace misstab
