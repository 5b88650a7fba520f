#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "misstab/chisq.hpp"
#include "misstab/datasets.hpp"
#include "misstab/design.hpp"
#include "misstab/fit.hpp"
#include "misstab/mar_bounds.hpp"
#include "support.hpp"

using namespace misstab;

namespace {

const char* kTables[] = {"smoking-birthweight", "bone-density", "spo-y1", "spo-y1y2"};

FitOptions em_only() {
  FitOptions o;
  o.closed_form = false;
  return o;
}

// Upper tail by composite Simpson on [x, x + 200].
double sf_quadrature(double x, int df) {
  const double k = df / 2.0;
  auto pdf = [&](double t) { return std::pow(t, k - 1) * std::exp(-t / 2) / (std::pow(2.0, k) * std::tgamma(k)); };
  const int n = 200000;
  const double h = 200.0 / n;
  double s = pdf(x) + pdf(x + 200.0);
  for (int i = 1; i < n; ++i) s += pdf(x + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

std::map<std::vector<int>, double> margin(const CellLayout& layout, const std::vector<double>& x, const Term& term) {
  std::map<std::vector<int>, double> m;
  for (std::size_t c = 0; c < layout.cell_count(); ++c) {
    const auto lv = layout.levels(c);
    std::vector<int> key;
    for (auto a : term) key.push_back(lv[a]);
    m[key] += x[c];
  }
  return m;
}

}  // namespace

TEST(ChiSquare, MatchesQuadrature) {
  for (int df : {2, 3, 4, 7})
    for (double x : {0.5, 2.0949, 5.42, 12.0}) EXPECT_NEAR(chi_square_sf(x, df), sf_quadrature(x, df), 1e-8) << df << " " << x;
  EXPECT_NEAR(chi_square_sf(2.0949, 2), std::exp(-2.0949 / 2), 1e-14);
  EXPECT_EQ(chi_square_sf(3.0, 0), 1.0);
  EXPECT_EQ(chi_square_sf(INFINITY, 3), 0.0);
}

TEST(Fit, BoneDensityM4AndM5) {
  const auto t = builtin_dataset("bone-density");
  const auto m4 = fit_model(find_model(t.schema(), "M4"), t);
  EXPECT_NEAR(m4.g2, 5.42, 0.01);
  EXPECT_NEAR(m4.p_value, 0.066, 0.002);
  EXPECT_EQ(m4.df, 2);
  const auto m5 = fit_model(find_model(t.schema(), "M5"), t);
  EXPECT_NEAR(m5.g2, 0, 1e-8);
  EXPECT_EQ(m5.p_value, 1);
  EXPECT_DOUBLE_EQ(m5.aic, 2.0 * m5.params);
}

TEST(Fit, GSquaredDirectSum) {
  const auto t = builtin_dataset("bone-density");
  const auto f = fit_model(find_model(t.schema(), "M4"), t);
  // collapse by owner, then sum over the 16 observed cells
  const CellLayout layout(t.schema());
  std::vector<double> fitted(layout.observed_count(), 0);
  for (std::size_t c = 0; c < f.mu.size(); ++c) fitted[layout.owner(c)] += f.mu[c];
  double g2 = 0, n = 0;
  for (std::size_t o = 0; o < fitted.size(); ++o) {
    if (f.observed[o] > 0) g2 += 2 * f.observed[o] * std::log(f.observed[o] / fitted[o]);
    n += f.observed[o];
  }
  EXPECT_NEAR(f.g2, g2, 1e-9);
  EXPECT_EQ(n, 2998);
  EXPECT_NEAR(f.bic, f.g2 + f.params * std::log(n), 1e-9);
}

TEST(Fit, SpoCModels) {
  const auto t = builtin_dataset("spo-y1");
  const auto c3 = fit_model(find_model(t.schema(), "C3"), t);
  EXPECT_NEAR(c3.g2, 2.0949, 0.001);
  EXPECT_EQ(c3.df, 2);
  for (const char* other : {"C2", "C4"}) EXPECT_LT(c3.g2, fit_model(find_model(t.schema(), other), t).g2);
}

TEST(Fit, EmMonotone) {
  for (const char* name : kTables) {
    const auto t = builtin_dataset(name);
    auto opts = em_only();
    opts.record_trace = true;
    for (const auto& m : enumerate_models(t.schema())) {
      const auto f = fit_em(m, t, opts);
      ASSERT_GE(f.trace.size(), 2u);
      for (std::size_t k = 1; k < f.trace.size(); ++k)
        EXPECT_GE(f.trace[k], f.trace[k - 1] - 1e-9 * std::abs(f.trace[k - 1])) << name << " " << m.id << " it " << k;
    }
  }
}

TEST(Fit, ClosedFormAgreesWithEm) {
  int compared = 0;
  for (const char* name : kTables) {
    const auto t = builtin_dataset(name);
    for (const auto& m : enumerate_models(t.schema())) {
      const auto cf = fit_closed_form(m, t);
      if (!cf.fit || cf.fit->boundary) continue;
      const auto em = fit_em(m, t);
      ++compared;
      for (std::size_t c = 0; c < em.mu.size(); ++c) EXPECT_LT(rel(em.mu[c], cf.fit->mu[c]), 1e-6) << name << " " << m.id;
    }
  }
  EXPECT_GT(compared, 5);
}

TEST(Fit, MarginsMatchAtFixedPoint) {
  for (const char* name : kTables) {
    const auto t = builtin_dataset(name);
    const CellLayout layout(t.schema());
    for (const auto& f : fit_all(t)) {
      if (!f.converged) continue;
      std::vector<double> completed(f.mu.size());
      for (std::size_t c = 0; c < f.mu.size(); ++c) {
        const auto o = layout.owner(c);
        completed[c] = f.fitted[o] > 0 ? f.observed[o] * f.mu[c] / f.fitted[o] : 0;
      }
      for (const auto& g : f.model.generating) {
        const auto a = margin(layout, completed, g), b = margin(layout, f.mu, g);
        for (const auto& [k, v] : a)
          if (v > 1e-9 * f.n) EXPECT_LT(rel(v, b.at(k)), 1e-6) << name << " " << f.model.id;
      }
    }
  }
}

TEST(Fit, ContainmentForMcarAndNmar) {
  for (const char* name : kTables) {
    const auto t = builtin_dataset(name);
    for (const auto& f : fit_all(t)) {
      if (f.boundary || !f.lambda) continue;
      for (const auto& q : list_queries(t.schema())) {
        const auto& mech = f.model.mechanisms[t.schema().missing_position(q.missing)];
        if (mech.kind == MechanismKind::kMar) continue;
        const auto o = model_odds(f, q);
        EXPECT_GE(o.nonresponse, o.min() * (1 - 1e-9)) << name << " " << f.model.id;
        EXPECT_LE(o.nonresponse, o.max() * (1 + 1e-9)) << name << " " << f.model.id;
      }
    }
  }
}

TEST(Fit, AssociationIdentityTwoByTwo) {
  const TableSchema s({{"Y1", 2}, {"Y2", 2}}, {"Y1", "Y2"});
  const auto fixture = testsupport::make_table(s, {{0b11, {120, 45, 60, 90}}, {0b01, {30, 12}}, {0b10, {14, 25}}, {0b00, {9}}});
  for (const auto& t : {fixture, builtin_dataset("smoking-birthweight")}) {
    const CellLayout layout(s);
    for (const auto& f : fit_all(t)) {
      if (!f.lambda) continue;
      auto pi = [&](int i, int j) { return f.mu[layout.index(std::vector<int>{i, j, 0, 0})] / f.n; };
      const double nu1 = pi(0, 0) / pi(0, 1), nu2 = pi(1, 0) / pi(1, 1);
      const double lam = lambda_at(*f.lambda, Term{0, 1}, std::vector<int>{0, 0, 0, 0}, layout.extents());
      EXPECT_NEAR(lam, 0.25 * std::log(nu1 / nu2), 1e-8) << f.model.id;
    }
  }
}

TEST(Fit, LambdaSumsToZero) {
  const auto t = builtin_dataset("bone-density");
  for (const auto& f : fit_all(t)) {
    if (!f.lambda) continue;
    for (const auto& est : *f.lambda) {
      // row-major grid over the term's axes
      std::vector<int> ext;
      for (auto a : est.term) ext.push_back(CellLayout(t.schema()).extents()[a]);
      for (std::size_t ax = 0; ax < ext.size(); ++ax) {
        std::map<std::vector<int>, double> sums;
        for (std::size_t c = 0; c < est.values.size(); ++c) {
          std::vector<int> lv(ext.size());
          std::size_t rest = c;
          for (std::size_t k = ext.size(); k-- > 0;) {
            lv[k] = static_cast<int>(rest % static_cast<std::size_t>(ext[k]));
            rest /= static_cast<std::size_t>(ext[k]);
          }
          lv[ax] = 0;
          sums[lv] += est.values[c];
        }
        for (const auto& [k, v] : sums) EXPECT_NEAR(v, 0, 1e-10) << f.model.id << " " << est.label;
      }
    }
  }
}

TEST(Fit, ParallelMatchesSerial) {
  for (const char* name : kTables) {
    const auto t = builtin_dataset(name);
    const auto a = fit_all(t), b = fit_all_serial(t);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].model.id, b[k].model.id);
      EXPECT_EQ(a[k].g2, b[k].g2);
      EXPECT_EQ(a[k].mu, b[k].mu);
    }
  }
}

TEST(Fit, PerturbedInitSameOptimum) {
  const auto t = builtin_dataset("bone-density");
  auto opts = em_only();
  opts.init = InitStrategy::kPerturbed;
  for (std::uint64_t seed : {1, 2, 3}) {
    opts.seed = seed;
    EXPECT_NEAR(fit_model(find_model(t.schema(), "M4"), t, opts).g2, 5.4236, 1e-3);
  }
}

TEST(Fit, BoundaryFlags) {
  // published boundary sets: NMAR for Y1 on smoking-birthweight, M1 M2 M3 M6 M8 on bone-density
  auto flagged = [](const char* name) {
    std::set<std::string> out;
    for (const auto& f : fit_all(builtin_dataset(name)))
      if (f.boundary) out.insert(f.model.id);
    return out;
  };
  EXPECT_EQ(flagged("smoking-birthweight"), (std::set<std::string>{"M1", "M2", "M3"}));
  EXPECT_EQ(flagged("bone-density"), (std::set<std::string>{"M1", "M2", "M3", "M6", "M8"}));
  EXPECT_THROW(fit_all(builtin_dataset("spo-full")), ShapeError);
}

TEST(Fit, RankingOrder) {
  const auto fits = fit_all(builtin_dataset("spo-y1y2"));
  for (std::size_t k = 1; k < fits.size(); ++k) EXPECT_LE(fits[k - 1].g2, fits[k].g2 + 1e-8);
}

TEST(MarBounds, McarLimitIsStrong) {
  const TableSchema s({{"Y1", 3}, {"Y2", 3}}, {"Y1", "Y2"});
  const auto t = testsupport::proportional_margins(s, {40, 12, 25, 8, 30, 17, 21, 9, 50});
  const auto f = fit_model(find_model(s, "M4"), t);
  const auto rep = mar_bounds(f);
  ASSERT_EQ(rep.bounds.size(), 3u);
  for (const auto& b : rep.bounds) {
    EXPECT_NEAR(b.delta, 0, 1e-6);
    EXPECT_GT(b.a_max, 1);
    EXPECT_LT(b.a_min, 1);
    EXPECT_EQ(b.cls, MarClass::kStrong);
  }
  EXPECT_EQ(rep.overall, MarClass::kStrong);
}

TEST(MarBounds, EnvelopeOnFittedModels) {
  for (const char* name : kTables) {
    const auto t = builtin_dataset(name);
    for (const auto& f : fit_all(t))
      for (const auto& b : mar_bounds(f).bounds) {
        const auto o = model_odds(f, b.query);
        if (rel(o.max(), o.min()) < 1e-12) continue;
        EXPECT_GT(b.a_max, 1) << name << " " << f.model.id;
        EXPECT_LT(b.a_min, 1) << name << " " << f.model.id;
      }
  }
}

TEST(MarBounds, BoneDensityM4) {
  const auto t = builtin_dataset("bone-density");
  const auto rep = mar_bounds(fit_model(find_model(t.schema(), "M4"), t));
  ASSERT_EQ(rep.bounds.size(), 3u);
  EXPECT_EQ(rep.overall, MarClass::kWeak);
}
