#include "misstab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace misstab {
namespace {

using nlohmann::json;

json ratio_json(const Ratio& r) { return json::array({r.num, r.den}); }

std::string interval_str(const OddsInterval& iv) {
  if (!iv.min) return "(undefined)";
  return "(" + iv.min->str() + ", " + iv.max->str() + ")";
}

std::string mechanisms_str(const FitResult& fit) {
  std::string s;
  for (std::size_t k = 0; k < fit.model.mechanisms.size(); ++k) {
    if (k) s += ", ";
    s += fit.schema.variable(fit.schema.missing()[k]).name + "=" + to_string(fit.model.mechanisms[k], fit.schema);
  }
  return s;
}

json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? json("nan") : json(x > 0 ? "inf" : "-inf");
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

std::string sig4(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string family_symbol(std::size_t position) { return position == 0 ? "nu" : "omega"; }

json verdict_json(const AssessmentVerdict& verdict, const TableSchema& schema) {
  json out;
  out["suggested"] = std::string(to_string(verdict.suggested));
  out["families"] = json::array();
  for (std::size_t k = 0; k < verdict.families.size(); ++k) {
    const auto& fam = verdict.families[k];
    json f;
    f["variable"] = schema.variable(fam.variable).name;
    f["symbol"] = family_symbol(k);
    f["suggested"] = std::string(to_string(fam.suggested));
    f["inside"] = fam.inside;
    f["outside"] = fam.outside;
    f["undefined"] = fam.undefined;
    f["queries"] = json::array();
    for (const auto& r : fam.queries) {
      json q;
      q["query"] = describe(r.query, schema);
      q["missing"] = schema.variable(r.query.missing).name;
      q["target"] = schema.variable(r.query.target).name;
      q["pair"] = json::array({r.query.a + 1, r.query.a2 + 1});
      if (r.query.cond) q["given"] = {{schema.variable(*r.query.cond).name, r.query.cond_level + 1}};
      q["nonresponse"] = ratio_json(r.nonresponse);
      q["response"] = json::array();
      for (const auto& v : r.interval.values) q["response"].push_back(ratio_json(v));
      q["interval"] = r.interval.min ? json::array({ratio_json(*r.interval.min), ratio_json(*r.interval.max)})
                                     : json(nullptr);
      q["membership"] = std::string(to_string(r.result.membership));
      if (r.result.note != MembershipNote::kNone) q["note"] = std::string(to_string(r.result.note));
      f["queries"].push_back(q);
    }
    out["families"].push_back(f);
  }
  return out;
}

std::string verdict_text(const AssessmentVerdict& verdict, const TableSchema& schema) {
  std::ostringstream out;
  for (std::size_t k = 0; k < verdict.families.size(); ++k) {
    const auto& fam = verdict.families[k];
    out << schema.variable(fam.variable).name << " missing (" << family_symbol(k) << " odds)\n";
    for (const auto& r : fam.queries) {
      out << "  " << schema.variable(r.query.target).name << " (" << r.query.a + 1 << "," << r.query.a2 + 1 << ")";
      if (r.query.cond) out << " at " << schema.variable(*r.query.cond).name << "=" << r.query.cond_level + 1;
      out << ": ";
      const char* sym = r.result.membership == Membership::kInside    ? " ∈ "
                        : r.result.membership == Membership::kOutside ? " ∉ "
                                                                      : " ? ";
      out << r.nonresponse.str() << sym << interval_str(r.interval) << "  " << to_string(r.result.membership);
      if (r.result.note != MembershipNote::kNone) out << " [" << to_string(r.result.note) << "]";
      out << "\n";
    }
    out << "  suggested for " << schema.variable(fam.variable).name << ": " << to_string(fam.suggested) << "\n";
  }
  out << "verdict: " << to_string(verdict.suggested) << "\n";
  return out.str();
}

json fit_json(const FitResult& fit) {
  json out;
  out["model"] = fit.model.id;
  out["group"] = fit.model.group;
  out["mechanisms"] = json::object();
  for (std::size_t k = 0; k < fit.model.mechanisms.size(); ++k)
    out["mechanisms"][fit.schema.variable(fit.schema.missing()[k]).name] =
        to_string(fit.model.mechanisms[k], fit.schema);
  out["association"] = std::string(to_string(fit.model.association));
  out["terms"] = json::array();
  for (const auto& t : fit.model.terms) out["terms"].push_back(term_label(fit.schema, t));
  out["method"] = fit.method;
  out["G2"] = number(fit.g2);
  out["df"] = fit.df;
  out["df_convention"] = std::string(to_string(fit.convention));
  out["p"] = number(fit.p_value);
  out["AIC"] = number(fit.aic);
  out["BIC"] = number(fit.bic);
  out["params"] = fit.params;
  out["loglik"] = number(fit.loglik);
  out["converged"] = fit.converged;
  out["boundary"] = fit.boundary;
  out["perfect_fit_predicted"] = fit.perfect_fit_predicted;
  out["iterations"] = fit.iterations;
  out["fitted_observed"] = json::array();
  for (std::size_t o = 0; o < fit.fitted.size(); ++o)
    out["fitted_observed"].push_back({{"observed", fit.observed[o]}, {"fitted", fit.fitted[o]}});
  if (fit.lambda) {
    out["lambda"] = json::object();
    for (const auto& est : *fit.lambda) out["lambda"][est.label] = est.values;
  } else {
    out["lambda"] = nullptr;
  }
  if (!fit.notes.empty()) out["notes"] = fit.notes;
  return out;
}

int best_non_perfect(const std::vector<FitResult>& fits) {
  int best = -1;
  for (std::size_t k = 0; k < fits.size(); ++k) {
    if (fits[k].g2 <= 1e-8 || fits[k].perfect_fit_predicted) continue;
    if (best < 0 || fits[k].g2 < fits[static_cast<std::size_t>(best)].g2) best = static_cast<int>(k);
  }
  return best;
}

std::string fits_text(const std::vector<FitResult>& fits) {
  std::ostringstream out;
  std::size_t w = 6;
  for (const auto& f : fits) w = std::max(w, f.model.id.size() + 1);
  out << pad("model", w) << pad("mechanisms", 26) << pad("G2", 10) << pad("df", 4) << pad("p", 10)
      << pad("AIC", 10) << pad("BIC", 10) << pad("k", 4) << "flags\n";
  const int best = best_non_perfect(fits);
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const auto& f = fits[k];
    std::string flags;
    if (f.g2 <= 1e-8 || f.perfect_fit_predicted) flags += "perfect-fit ";
    if (f.boundary) flags += "boundary ";
    if (!f.converged) flags += "not-converged ";
    if (static_cast<int>(k) == best) flags += "best ";
    out << pad(f.model.id, w) << pad(mechanisms_str(f), 26) << pad(sig4(f.g2), 10) << pad(std::to_string(f.df), 4)
        << pad(sig4(f.p_value), 10) << pad(sig4(f.aic), 10) << pad(sig4(f.bic), 10)
        << pad(std::to_string(f.params), 4) << flags << "\n";
  }
  if (best >= 0)
    out << "best non-perfect fit: " << fits[static_cast<std::size_t>(best)].model.id
        << " (G2 = " << sig4(fits[static_cast<std::size_t>(best)].g2) << ")\n";
  return out.str();
}

std::string fit_detail_text(const FitResult& fit) {
  std::ostringstream out;
  out << "model " << fit.model.id << ": " << mechanisms_str(fit) << "\n";
  out << "  terms:";
  for (const auto& t : fit.model.terms) out << " " << term_label(fit.schema, t);
  out << "\n";
  out << "  method " << fit.method << ", iterations " << fit.iterations << (fit.converged ? ", converged" : ", NOT converged")
      << (fit.boundary ? ", boundary" : "") << "\n";
  out << "  G2 = " << sig4(fit.g2) << ", df = " << fit.df << " (" << to_string(fit.convention) << "), p = "
      << sig4(fit.p_value) << ", AIC = " << sig4(fit.aic) << ", BIC = " << sig4(fit.bic) << ", k = " << fit.params
      << "\n";
  out << "  observed / fitted:";
  for (std::size_t o = 0; o < fit.fitted.size(); ++o) out << " " << fit.observed[o] << "/" << sig4(fit.fitted[o]);
  out << "\n";
  for (const auto& n : fit.notes) out << "  note: " << n << "\n";
  return out.str();
}

json mar_bounds_json(const MarBoundReport& report, const TableSchema& schema) {
  json out;
  out["classification"] = std::string(to_string(report.overall));
  out["bounds"] = json::array();
  for (const auto& b : report.bounds)
    out["bounds"].push_back({{"query", describe(b.query, schema)},
                             {"A_max", number(b.a_max)},
                             {"A_min", number(b.a_min)},
                             {"lower", number(b.lower)},
                             {"upper", number(b.upper)},
                             {"delta", number(b.delta)},
                             {"classification", std::string(to_string(b.cls))},
                             {"model_inside", b.model_inside}});
  return out;
}

std::string mar_bounds_text(const MarBoundReport& report, const TableSchema& schema) {
  std::ostringstream out;
  out << "MAR bounds: " << to_string(report.overall) << "\n";
  for (const auto& b : report.bounds)
    out << "  " << describe(b.query, schema) << ": " << sig4(b.lower) << " < " << sig4(b.delta) << " < "
        << sig4(b.upper) << "  " << to_string(b.cls) << "\n";
  return out.str();
}

json catalog_json(const TableSchema& schema, YAssociation association, DfConvention convention) {
  json out = json::array();
  for (const auto& m : enumerate_models(schema, association)) {
    json mech = json::object();
    for (std::size_t k = 0; k < m.mechanisms.size(); ++k)
      mech[schema.variable(schema.missing()[k]).name] = to_string(m.mechanisms[k], schema);
    out.push_back({{"model", m.id},
                   {"mechanisms", mech},
                   {"params", free_parameter_count(m, schema)},
                   {"df", degrees_of_freedom(m, schema, convention)},
                   {"perfect_fit_predicted", predicted_perfect_fit(m, schema)}});
  }
  return out;
}

std::string catalog_text(const TableSchema& schema, YAssociation association, DfConvention convention) {
  std::ostringstream out;
  out << "shape " << to_string(schema.shape()) << ", " << observed_statistic_count(schema) << " observed cells, "
      << "df convention " << to_string(convention) << "\n";
  for (const auto& m : enumerate_models(schema, association)) {
    std::string mech;
    for (std::size_t k = 0; k < m.mechanisms.size(); ++k)
      mech += (k ? ", " : "") + schema.variable(schema.missing()[k]).name + "=" + to_string(m.mechanisms[k], schema);
    out << pad(m.id, 26) << pad(mech, 26) << "k=" << pad(std::to_string(free_parameter_count(m, schema)), 4)
        << "df=" << pad(std::to_string(degrees_of_freedom(m, schema, convention)), 4)
        << (predicted_perfect_fit(m, schema) ? "perfect-fit" : "") << "\n";
  }
  return out.str();
}

json bootstrap_json(const BootstrapSummary& s, const TableSchema& schema) {
  auto fam = [&](const FamilyTally& t, const std::string& name) {
    return json{{"family", name},
                {"replicates", t.replicates},
                {"satisfied", t.satisfied},
                {"undefined", t.undefined},
                {"percentage", number(t.percentage())}};
  };
  json out;
  out["model"] = s.model_id;
  out["replicates"] = s.replicates;
  out["seed"] = s.seed;
  out["sampling"] = std::string(to_string(s.sampling));
  out["fit_G2"] = number(s.g2);
  out["fit_boundary"] = s.fit_boundary;
  out["families"] = json::array();
  for (std::size_t k = 0; k < s.families.size(); ++k) {
    auto j = fam(s.families[k], family_symbol(k));
    j["variable"] = schema.variable(s.families[k].variable).name;
    out["families"].push_back(j);
  }
  out["combined"] = fam(s.combined, "combined");
  return out;
}

std::string bootstrap_text(const BootstrapSummary& s, const TableSchema& schema) {
  std::ostringstream out;
  out << "model " << s.model_id << ", " << s.replicates << " replicates, seed " << s.seed << ", "
      << to_string(s.sampling) << " sampling (fit G2 = " << sig4(s.g2) << (s.fit_boundary ? ", boundary" : "")
      << ")\n";
  auto line = [&](const std::string& label, const FamilyTally& t) {
    out << "  " << pad(label, 22) << t.satisfied << "/" << (t.replicates - t.undefined) << " = " << sig4(t.percentage())
        << "%  (undefined " << t.undefined << ")\n";
  };
  for (std::size_t k = 0; k < s.families.size(); ++k)
    line(family_symbol(k) + " (" + schema.variable(s.families[k].variable).name + " missing)", s.families[k]);
  line("combined", s.combined);
  return out.str();
}

std::string bootstrap_csv(const BootstrapSummary& s, const TableSchema& schema) {
  std::ostringstream out;
  out << "model,replicates,seed,sampling,family,variable,satisfied,undefined,percentage\n";
  auto row = [&](const std::string& fam, const std::string& var, const FamilyTally& t) {
    out << s.model_id << ',' << s.replicates << ',' << s.seed << ',' << to_string(s.sampling) << ',' << fam << ','
        << var << ',' << t.satisfied << ',' << t.undefined << ',' << sig4(t.percentage()) << "\n";
  };
  for (std::size_t k = 0; k < s.families.size(); ++k)
    row(family_symbol(k), schema.variable(s.families[k].variable).name, s.families[k]);
  row("combined", "", s.combined);
  return out.str();
}

}  // namespace misstab
