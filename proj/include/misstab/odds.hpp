#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "misstab/table.hpp"

namespace misstab {

// Ratio of two counts; den == 0 means undefined.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 0;

  bool defined() const { return den > 0; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  bool operator==(const Ratio&) const = default;
};

// Exact comparison by cross-multiplication; both ratios must be defined.
int compare(const Ratio& a, const Ratio& b);

// Odds of `target` level a against a' for units whose `missing` variable is
// unobserved (nonresponse) or observed (response, one ratio per level of it),
// optionally holding a third variable at `cond_level`.
struct OddsQuery {
  std::size_t missing = 0;
  std::size_t target = 0;
  int a = 0, a2 = 1;
  std::optional<std::size_t> cond;
  int cond_level = 0;

  bool operator==(const OddsQuery&) const = default;
};

std::string describe(const OddsQuery& q, const TableSchema& schema);

struct OddsInterval {
  std::vector<Ratio> values;  // index = level of the missing variable
  std::optional<Ratio> min, max;  // over defined values
  bool any_undefined = false;
};

enum class Membership { kInside, kOutside, kUndefined };
enum class MembershipNote { kNone, kEndpointTie, kDegenerate };

std::string_view to_string(Membership m);
std::string_view to_string(MembershipNote n);

struct MembershipResult {
  Membership membership = Membership::kUndefined;
  MembershipNote note = MembershipNote::kNone;
};

enum class SuggestedClass { kMar, kMcarOrNmar, kInconclusive };
std::string_view to_string(SuggestedClass c);

struct QueryResult {
  OddsQuery query;
  Ratio nonresponse;
  OddsInterval interval;
  MembershipResult result;
};

struct FamilyVerdict {
  std::size_t variable = 0;  // the missing variable
  std::vector<QueryResult> queries;
  SuggestedClass suggested = SuggestedClass::kInconclusive;
  int outside = 0, inside = 0, undefined = 0;
};

struct AssessmentVerdict {
  std::vector<FamilyVerdict> families;  // one per missing variable, declared order
  SuggestedClass suggested = SuggestedClass::kInconclusive;
};

// Queries in reporting order: missing variable (declared order), then target
// variable, then level pair (a < a') lexicographically, then conditioning level.
std::vector<OddsQuery> list_queries(const TableSchema& schema);

// Full-stratum ratios over the levels of the missing variable. Throws
// DataError("no defined response odds") when every entry is undefined.
OddsInterval response_odds(const IncompleteTable& table, const OddsQuery& q);
// Same, but entries may all be undefined (used inside assess).
OddsInterval response_odds_unchecked(const IncompleteTable& table, const OddsQuery& q);

Ratio nonresponse_odds(const IncompleteTable& table, const OddsQuery& q);

// Strict open-interval test; endpoints and degenerate intervals are outside.
MembershipResult membership(const Ratio& value, const OddsInterval& interval);

SuggestedClass classify(const std::vector<MembershipResult>& results);

AssessmentVerdict assess(const IncompleteTable& table);

}  // namespace misstab
