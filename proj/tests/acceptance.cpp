// Acceptance run over the published examples. One PASS/FAIL line per
// criterion; sub-checks are listed underneath. Also written to
// acceptance_report.txt in the working directory.
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "misstab/bootstrap.hpp"
#include "misstab/chisq.hpp"
#include "misstab/datasets.hpp"
#include "misstab/design.hpp"
#include "misstab/fit.hpp"
#include "misstab/mar_bounds.hpp"
#include "misstab/odds.hpp"
#include "support.hpp"

using namespace misstab;

namespace {

std::ostringstream report;

struct Criterion {
  int id;
  std::string title;
  std::vector<std::pair<bool, std::string>> checks;
  double seconds = 0;
  double limit = 0;

  void check(bool ok, const std::string& what) { checks.emplace_back(ok, what); }
  bool passed() const {
    for (const auto& c : checks)
      if (!c.first) return false;
    return limit <= 0 || seconds < limit;
  }
};

std::vector<Criterion> results;

void run(int id, const std::string& title, double limit, const std::function<void(Criterion&)>& body) {
  Criterion c{id, title, {}, 0, limit};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.check(false, std::string("exception: ") + e.what());
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream line;
  line << (c.passed() ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " (" << c.seconds << " s";
  if (limit > 0) line << ", limit " << limit << " s";
  line << ")\n";
  for (const auto& [ok, what] : c.checks) line << "        " << (ok ? "ok   " : "FAIL ") << what << "\n";
  std::cout << line.str() << std::flush;
  report << line.str();
  results.push_back(c);
}

std::string num(double x, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

// A published membership, fractions unreduced.
struct Printed {
  Ratio value, lo, hi;
  bool inside;
};

void check_printed(Criterion& c, const FamilyVerdict& fam, const std::vector<Printed>& expected, const std::string& tag) {
  c.check(fam.queries.size() == expected.size(),
          tag + ": " + std::to_string(fam.queries.size()) + " queries, expected " + std::to_string(expected.size()));
  for (std::size_t k = 0; k < std::min(expected.size(), fam.queries.size()); ++k) {
    const auto& q = fam.queries[k];
    const auto& e = expected[k];
    const bool ok = q.nonresponse == e.value && q.interval.min && *q.interval.min == e.lo && *q.interval.max == e.hi &&
                    q.result.membership == (e.inside ? Membership::kInside : Membership::kOutside);
    c.check(ok, tag + ": " + e.value.str() + (e.inside ? " in (" : " not in (") + e.lo.str() + ", " + e.hi.str() +
                    ") -> got " + q.nonresponse.str() + " " + std::string(to_string(q.result.membership)));
  }
}

FitResult fit_id(const IncompleteTable& t, const std::string& id) { return fit_model(find_model(t.schema(), id), t); }

double bootstrap_pct(const std::string& dataset, const std::string& model, std::size_t family) {
  BootstrapOptions o;
  o.replicates = 10000;
  o.seed = 1;
  const auto s = bootstrap_assess(model, builtin_dataset(dataset), o);
  return s.families.at(family).percentage();
}

}  // namespace

int main() {
  const auto t6 = builtin_dataset("smoking-birthweight");
  const auto t7 = builtin_dataset("bone-density");
  const auto t9 = builtin_dataset("spo-y1");
  const auto t10 = builtin_dataset("spo-y1y2");

  run(1, "smoking-birthweight odds check", 1.0, [&](Criterion& c) {
    const auto v = assess(t6);
    check_printed(c, v.families.at(0), {{{142, 464}, {3394, 24132}, {4512, 21009}, false}}, "nu");
    check_printed(c, v.families.at(1), {{{1049, 1135}, {21009, 24132}, {4512, 3394}, true}}, "omega");
    c.check(v.suggested == SuggestedClass::kMar, "verdict " + std::string(to_string(v.suggested)));
  });

  run(2, "bone-density odds checks", 1.0, [&](Criterion& c) {
    const auto v = assess(t7);
    check_printed(c, v.families.at(0),
                  {{{456, 156}, {260, 131}, {93, 30}, true},
                   {{456, 266}, {621, 284}, {93, 18}, false},
                   {{156, 266}, {290, 284}, {30, 18}, false}},
                  "nu");
    check_printed(c, v.families.at(1),
                  {{{135, 69}, {290, 131}, {284, 117}, false},
                   {{135, 27}, {621, 93}, {284, 18}, false},
                   {{69, 27}, {260, 93}, {117, 18}, false}},
                  "omega");
  });

  run(3, "bone-density fits M4 and M5", 5.0, [&](Criterion& c) {
    const auto m4 = fit_id(t7, "M4");
    const auto m5 = fit_id(t7, "M5");
    c.check(std::abs(m4.g2 - 5.42) <= 0.01, "G2(M4) = " + num(m4.g2) + ", expected 5.42 +- 0.01");
    c.check(std::abs(m4.p_value - 0.066) <= 0.002, "p(M4) = " + num(m4.p_value) + ", expected 0.066 +- 0.002");
    c.check(m4.df == 2 && m4.convention == DfConvention::kPoissonCells, "df(M4) = " + std::to_string(m4.df));
    c.check(std::abs(m5.g2) <= 1e-8, "G2(M5) = " + num(m5.g2) + ", expected 0 +- 1e-8");
    c.check(m5.p_value == 1, "p(M5) = " + num(m5.p_value));
  });

  run(4, "spo-y1 odds and C-model fits", 0, [&](Criterion& c) {
    const auto v = assess(t9);
    check_printed(c, v.families.at(0),
                  {{{90, 1}, {158, 7}, {1191, 8}, true},
                   {{2, 2}, {8, 2}, {68, 14}, false},
                   {{90, 2}, {158, 68}, {1191, 8}, true},
                   {{1, 2}, {7, 14}, {8, 2}, false}},
                  "nu");
    const auto c3 = fit_id(t9, "C3");
    c.check(std::abs(c3.g2 - 2.0949) <= 0.001, "G2(C3) = " + num(c3.g2) + ", expected 2.0949 +- 0.001");
    for (const char* other : {"C2", "C4"}) {
      const auto f = fit_id(t9, other);
      c.check(c3.g2 < f.g2, std::string("G2(C3) < G2(") + other + ") = " + num(f.g2));
    }
    const double sf = chi_square_sf(2.0949, 2);
    c.check(std::abs(sf - 0.351) <= 0.001, "sf(2.0949, 2) = " + num(sf) + ", expected 0.351 +- 0.001");
  });

  run(5, "spo-y1y2 odds and D-model fits", 30.0, [&](Criterion& c) {
    const auto v = assess(t10);
    check_printed(c, v.families.at(0),
                  {{{90, 1}, {158, 7}, {1191, 8}, true},
                   {{2, 2}, {8, 2}, {68, 14}, false},
                   {{90, 2}, {158, 68}, {1191, 8}, true},
                   {{1, 2}, {7, 14}, {8, 2}, false}},
                  "nu");
    check_printed(c, v.families.at(1),
                  {{{107, 18}, {8, 7}, {1191, 158}, true},
                   {{3, 43}, {8, 68}, {2, 14}, false},
                   {{107, 3}, {8, 2}, {1191, 8}, true},
                   {{18, 43}, {7, 14}, {158, 68}, false}},
                  "omega");
    const auto fits = fit_all(t10);
    const auto& best = fits.front();
    c.check(best.model.id == "D6:Y1=NMAR,Y2=MAR(Y3)",
            "minimum-G2 model " + best.model.id + " (G2 " + num(best.g2) + "), expected D6:Y1=NMAR,Y2=MAR(Y3)");
    for (const auto& f : fits)
      if (f.model.id == "D6:Y1=NMAR,Y2=MAR(Y3)")
        c.check(std::abs(f.g2 - 2.8076) <= 0.001, "G2(D6:Y1=NMAR,Y2=MAR(Y3)) = " + num(f.g2) + ", expected 2.8076 +- 0.001");
  });

  run(6, "bootstrap reproduction, 10000 replicates", 0, [&](Criterion& c) {
    auto timed = [&](const std::string& label, const std::function<double()>& f, double lo, double hi) {
      const auto t0 = std::chrono::steady_clock::now();
      const double p = f();
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      c.check(p >= lo && p <= hi && s < 300,
              label + " = " + num(p, 5) + "%, expected [" + num(lo, 5) + ", " + num(hi, 5) + "] (" + num(s, 3) + " s)");
    };
    timed("smoking-birthweight / M4 nu", [] { return bootstrap_pct("smoking-birthweight", "M4", 0); }, 98.5, 100);
    timed("bone-density / M5 omega", [] { return bootstrap_pct("bone-density", "M5", 1); }, 96.56 - 1.5, 96.56 + 1.5);
    timed("spo-y1 / C3 nu", [] { return bootstrap_pct("spo-y1", "C3", 0); }, 96.95 - 1.5, 96.95 + 1.5);
    timed("spo-y1y2 / D6:Y1=NMAR,Y2=MAR(Y3) nu",
          [] { return bootstrap_pct("spo-y1y2", "D6:Y1=NMAR,Y2=MAR(Y3)", 0); }, 96.56 - 1.5, 96.56 + 1.5);
  });

  run(7, "property suite", 0, [&](Criterion& c) {
    const std::vector<const IncompleteTable*> tables{&t6, &t7, &t9, &t10};

    bool mono = true;
    int n_mono = 0;
    FitOptions trace;
    trace.closed_form = false;
    trace.record_trace = true;
    for (const auto* t : tables)
      for (const auto& m : enumerate_models(t->schema())) {
        const auto f = fit_em(m, *t, trace);
        ++n_mono;
        for (std::size_t k = 1; k < f.trace.size(); ++k)
          if (f.trace[k] < f.trace[k - 1] - 1e-9 * std::abs(f.trace[k - 1])) mono = false;
      }
    c.check(mono, "EM log-likelihood non-decreasing on " + std::to_string(n_mono) + " model/table pairs");

    double worst_cf = 0;
    int n_cf = 0;
    for (const auto* t : tables)
      for (const auto& m : enumerate_models(t->schema())) {
        const auto cf = fit_closed_form(m, *t);
        if (!cf.fit || cf.fit->boundary) continue;
        const auto em = fit_em(m, *t);
        ++n_cf;
        for (std::size_t k = 0; k < em.mu.size(); ++k)
          worst_cf = std::max(worst_cf, std::abs(em.mu[k] - cf.fit->mu[k]) / std::max(cf.fit->mu[k], 1e-300));
      }
    c.check(worst_cf <= 1e-6, "closed form vs EM, " + std::to_string(n_cf) + " fits, max rel diff " + num(worst_cf));

    double worst_margin = 0;
    int n_margin = 0;
    std::vector<std::vector<FitResult>> all_fits;
    for (const auto* t : tables) all_fits.push_back(fit_all(*t));
    for (std::size_t ti = 0; ti < tables.size(); ++ti) {
      const CellLayout layout(tables[ti]->schema());
      for (const auto& f : all_fits[ti]) {
        if (!f.converged) continue;
        ++n_margin;
        for (const auto& g : f.model.generating) {
          const auto m = make_margin(layout, g);
          std::vector<double> a(m.size, 0), b(m.size, 0);
          for (std::size_t k = 0; k < f.mu.size(); ++k) {
            const auto o = layout.owner(k);
            a[m.index[k]] += f.fitted[o] > 0 ? f.observed[o] * f.mu[k] / f.fitted[o] : 0;
            b[m.index[k]] += f.mu[k];
          }
          for (std::size_t s = 0; s < m.size; ++s)
            if (a[s] > 1e-9 * f.n) worst_margin = std::max(worst_margin, std::abs(a[s] - b[s]) / a[s]);
        }
      }
    }
    c.check(worst_margin <= 1e-6,
            "sufficient margins, " + std::to_string(n_margin) + " converged fits, max rel diff " + num(worst_margin));

    // published perfect-fit sets
    std::set<std::string> expected_m{"M2", "M3", "M5", "M6"}, expected_c{"C1"};
    std::set<std::string> got_m, got_c, got_d, expected_d;
    for (const auto& m : enumerate_models(t7.schema()))
      if (predicted_perfect_fit(m, t7.schema())) got_m.insert(m.id);
    for (const auto& m : enumerate_models(t9.schema()))
      if (predicted_perfect_fit(m, t9.schema())) got_c.insert(m.id);
    for (const auto& m : enumerate_models(t10.schema())) {
      if (predicted_perfect_fit(m, t10.schema())) got_d.insert(m.id);
      if (m.group == "D2" || m.group == "D6") expected_d.insert(m.id);
    }
    auto join = [](const std::set<std::string>& s) {
      std::string out;
      for (const auto& x : s) out += (out.empty() ? "" : " ") + x;
      return "{" + out + "}";
    };
    c.check(got_m == expected_m, "perfect fits, two-way: " + join(got_m) + ", stated " + join(expected_m));
    c.check(got_c == expected_c, "perfect fits, one missing: " + join(got_c) + ", stated " + join(expected_c));
    c.check(got_d == expected_d, "perfect fits, two missing: " + join(got_d) + ", stated D2 and D6 groups");

    bool contained = true;
    int n_cont = 0;
    for (std::size_t ti = 0; ti < tables.size(); ++ti)
      for (const auto& f : all_fits[ti]) {
        if (f.boundary || !f.lambda) continue;
        for (const auto& q : list_queries(f.schema)) {
          if (f.model.mechanisms[f.schema.missing_position(q.missing)].kind == MechanismKind::kMar) continue;
          const auto o = model_odds(f, q);
          ++n_cont;
          if (o.nonresponse < o.min() * (1 - 1e-9) || o.nonresponse > o.max() * (1 + 1e-9)) contained = false;
        }
      }
    c.check(contained, "fitted nonresponse odds in response-odds interval, " + std::to_string(n_cont) + " MCAR/NMAR queries");

    const TableSchema s2({{"Y1", 2}, {"Y2", 2}}, {"Y1", "Y2"});
    const auto fixture =
        testsupport::make_table(s2, {{0b11, {120, 45, 60, 90}}, {0b01, {30, 12}}, {0b10, {14, 25}}, {0b00, {9}}});
    double worst_id = 0;
    const CellLayout l2(s2);
    for (const auto& f : fit_all(fixture)) {
      if (!f.lambda) continue;
      auto mu = [&](int i, int j) { return f.mu[l2.index(std::vector<int>{i, j, 0, 0})]; };
      const double rhs = 0.25 * std::log((mu(0, 0) / mu(0, 1)) / (mu(1, 0) / mu(1, 1)));
      const double lhs = lambda_at(*f.lambda, Term{0, 1}, std::vector<int>{0, 0, 0, 0}, l2.extents());
      worst_id = std::max(worst_id, std::abs(lhs - rhs));
    }
    c.check(worst_id <= 1e-8, "association identity on a 2x2x2x2 fixture, max abs diff " + num(worst_id));

    bool scale_ok = true;
    for (const auto* t : tables) {
      const auto base = assess(*t);
      for (std::int64_t k : {2, 7, 100}) {
        const auto v = assess(scale_counts(*t, k));
        if (v.suggested != base.suggested) scale_ok = false;
        for (std::size_t f = 0; f < v.families.size(); ++f)
          for (std::size_t q = 0; q < v.families[f].queries.size(); ++q)
            if (v.families[f].queries[q].result.membership != base.families[f].queries[q].result.membership)
              scale_ok = false;
      }
    }
    c.check(scale_ok, "assess invariant under scaling by 2, 7, 100");

    BootstrapOptions o;
    o.replicates = 2000;
    o.seed = 12345;
    const auto f7 = fit_id(t7, "M5");
    const auto a = bootstrap_from_fit(f7, o), b = bootstrap_from_fit(f7, o), s = bootstrap_from_fit_serial(f7, o);
    c.check(a == b && a == s, "bootstrap identical across runs and against the serial reference");
  });

  run(8, "proportional 2x2 oracle", 0, [&](Criterion& c) {
    const TableSchema s2({{"Y1", 2}, {"Y2", 2}}, {"Y1", "Y2"});
    const auto t = testsupport::proportional_margins(s2, {30, 10, 20, 40});
    const auto v = assess(t);
    for (const auto& fam : v.families)
      for (const auto& r : fam.queries) {
        const auto o = testsupport::oracle_query(t, r.query);
        c.check(o.defined && o.inside && r.result.membership == Membership::kInside,
                describe(r.query, s2) + ": " + r.nonresponse.str() + " " + std::string(to_string(r.result.membership)) +
                    ", oracle " + (o.inside ? "inside" : "not inside"));
      }
    c.check(v.suggested == SuggestedClass::kMcarOrNmar, "verdict " + std::string(to_string(v.suggested)));
  });

  int passed = 0;
  for (const auto& r : results) passed += r.passed();
  std::ostringstream tail;
  tail << "acceptance: " << passed << "/" << results.size() << " criteria pass\n";
  std::cout << tail.str();
  report << tail.str();
  std::ofstream("acceptance_report.txt") << report.str();
  return 0;
}
