#include "misstab/mar_bounds.hpp"

#include <cmath>

namespace misstab {
namespace {

std::vector<int> base_levels(const TableSchema& schema, const OddsQuery& q, int target_level) {
  std::vector<int> lv(schema.size() + schema.missing().size(), 0);
  lv[q.target] = target_level;
  if (q.cond) lv[*q.cond] = q.cond_level;
  return lv;
}

}  // namespace

std::string_view to_string(MarClass c) {
  switch (c) {
    case MarClass::kStrong: return "strong-MAR";
    case MarClass::kWeak: return "weak-MAR";
    case MarClass::kNotApplicable: break;
  }
  return "not-applicable";
}

ModelOdds model_odds(const FitResult& fit, const OddsQuery& q) {
  const CellLayout layout(fit.schema);
  const auto r = indicator_axis(fit.schema, q.missing);
  auto num = base_levels(fit.schema, q, q.a);
  auto den = base_levels(fit.schema, q, q.a2);
  ModelOdds out;
  double nr_num = 0, nr_den = 0;
  for (int i = 0; i < fit.schema.levels(q.missing); ++i) {
    num[q.missing] = den[q.missing] = i;
    num[r] = den[r] = 0;
    out.response.push_back(fit.mu[layout.index(num)] / fit.mu[layout.index(den)]);
    num[r] = den[r] = 1;
    nr_num += fit.mu[layout.index(num)];
    nr_den += fit.mu[layout.index(den)];
  }
  out.nonresponse = nr_num / nr_den;
  for (std::size_t i = 1; i < out.response.size(); ++i) {
    if (out.response[i] < out.response[out.argmin]) out.argmin = i;
    if (out.response[i] > out.response[out.argmax]) out.argmax = i;
  }
  return out;
}

MarBoundReport mar_bounds(const FitResult& fit) {
  MarBoundReport report;
  if (!fit.lambda) return report;
  const auto& schema = fit.schema;
  const CellLayout layout(schema);
  const auto& ext = layout.extents();
  const auto& lambda = *fit.lambda;
  const std::size_t ny = schema.size();

  for (const auto& q : list_queries(schema)) {
    const auto& mech = fit.model.mechanisms[schema.missing_position(q.missing)];
    if (mech.kind != MechanismKind::kMar || mech.depends_on != q.target) continue;
    const auto r = indicator_axis(schema, q.missing);

    // a: terms with the missing variable and no indicator; c: terms with the
    // missing variable and some other indicator, at observed levels
    auto a_of = [&](int i, int t) {
      auto lv = base_levels(schema, q, t);
      lv[q.missing] = i;
      double s = 0;
      for (const auto& est : lambda) {
        bool has_m = false, has_r = false;
        for (auto ax : est.term) {
          has_m |= ax == q.missing;
          has_r |= ax >= ny;
        }
        if (has_m && !has_r) s += lambda_at(lambda, est.term, lv, ext);
      }
      return s;
    };
    auto c_of = [&](int i) {
      auto lv = base_levels(schema, q, 0);
      lv[q.missing] = i;
      double s = 0;
      for (const auto& est : lambda) {
        bool has_m = false, has_r = false;
        for (auto ax : est.term) {
          has_m |= ax == q.missing;
          has_r |= ax >= ny;
        }
        if (has_m && has_r) s += lambda_at(lambda, est.term, lv, ext);
      }
      return s;
    };
    const int levels = schema.levels(q.missing);
    double sum_t = 0, sum_t2 = 0;
    for (int i = 0; i < levels; ++i) {
      sum_t += std::exp(a_of(i, q.a) + c_of(i));
      sum_t2 += std::exp(a_of(i, q.a2) + c_of(i));
    }
    auto quantity = [&](int m) { return std::exp(a_of(m, q.a) - a_of(m, q.a2)) * sum_t2 / sum_t; };

    const auto odds = model_odds(fit, q);
    MarBound b;
    b.query = q;
    b.a_max = quantity(static_cast<int>(odds.argmax));
    b.a_min = quantity(static_cast<int>(odds.argmin));
    b.lower = -0.5 * std::log(b.a_max);
    b.upper = -0.5 * std::log(b.a_min);
    const Term dr{q.target, r};
    auto lv = base_levels(schema, q, q.a);
    lv[r] = 1;
    const double lam_t = lambda_at(lambda, dr, lv, ext);
    lv[q.target] = q.a2;
    const double lam_t2 = lambda_at(lambda, dr, lv, ext);
    b.delta = lam_t2 - lam_t;
    b.cls = b.lower < b.delta && b.delta < b.upper ? MarClass::kStrong : MarClass::kWeak;
    b.model_inside = odds.min() < odds.nonresponse && odds.nonresponse < odds.max();
    report.bounds.push_back(b);
  }
  if (!report.bounds.empty()) {
    report.overall = MarClass::kStrong;
    for (const auto& b : report.bounds)
      if (b.cls == MarClass::kWeak) report.overall = MarClass::kWeak;
  }
  return report;
}

}  // namespace misstab
