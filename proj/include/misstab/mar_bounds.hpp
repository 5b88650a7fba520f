#pragma once

#include <vector>

#include "misstab/fit.hpp"
#include "misstab/odds.hpp"

namespace misstab {

// Odds of a query evaluated on fitted expected counts.
struct ModelOdds {
  std::vector<double> response;  // one per level of the missing variable
  double nonresponse = 0;
  std::size_t argmin = 0, argmax = 0;
  double min() const { return response[argmin]; }
  double max() const { return response[argmax]; }
};

ModelOdds model_odds(const FitResult& fit, const OddsQuery& q);

enum class MarClass { kStrong, kWeak, kNotApplicable };
std::string_view to_string(MarClass c);

struct MarBound {
  OddsQuery query;
  double a_max = 0;   // A at the level attaining the largest response odds
  double a_min = 0;   // same at the smallest
  double lower = 0;   // -log(a_max) / 2
  double upper = 0;   // -log(a_min) / 2
  double delta = 0;   // lambda_{T R}(a', missing) - lambda_{T R}(a, missing)
  MarClass cls = MarClass::kNotApplicable;
  bool model_inside = false;  // fitted nonresponse odds strictly inside
};

struct MarBoundReport {
  std::vector<MarBound> bounds;  // MAR variables, queries whose target is the dependency
  MarClass overall = MarClass::kNotApplicable;  // weak if any bound is weak
};

// Needs lambda estimates; fits without them give an empty report.
MarBoundReport mar_bounds(const FitResult& fit);

}  // namespace misstab
