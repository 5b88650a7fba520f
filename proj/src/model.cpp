#include "misstab/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace misstab {
namespace {

bool indexed_name(const std::string& name) {
  return name.size() >= 2 && name[0] == 'Y' &&
         std::all_of(name.begin() + 1, name.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::vector<Term> closure(const std::vector<Term>& base) {
  std::set<Term> all;
  for (const auto& t : base) {
    const std::size_t n = t.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Term sub;
      for (std::size_t b = 0; b < n; ++b)
        if (mask & (std::size_t{1} << b)) sub.push_back(t[b]);
      all.insert(sub);
    }
  }
  std::vector<Term> out(all.begin(), all.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const Term& a, const Term& b) { return a.size() < b.size(); });
  return out;
}

bool contains(const Term& big, const Term& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::vector<Term> maximal(const std::vector<Term>& base) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < base.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < base.size() && !dominated; ++j)
      if (i != j && contains(base[j], base[i]) && (base[j] != base[i] || j < i)) dominated = true;
    if (!dominated) out.push_back(base[i]);
  }
  return out;
}

std::vector<Mechanism> options_for(const TableSchema& schema, std::size_t v) {
  std::vector<Mechanism> out{Mechanism::mcar(), Mechanism::nmar()};
  for (std::size_t d = 0; d < schema.size(); ++d)
    if (d != v) out.push_back(Mechanism::mar(d));
  return out;
}

std::string d_group(const Mechanism& a, const Mechanism& b) {
  auto has = [&](MechanismKind k) { return a.kind == k || b.kind == k; };
  if (a.kind == b.kind) {
    switch (a.kind) {
      case MechanismKind::kMcar: return "D1";
      case MechanismKind::kNmar: return "D2";
      case MechanismKind::kMar: return "D3";
    }
  }
  if (!has(MechanismKind::kMar)) return "D4";
  return has(MechanismKind::kMcar) ? "D5" : "D6";
}

}  // namespace

std::string to_string(const Mechanism& m, const TableSchema& schema) {
  switch (m.kind) {
    case MechanismKind::kMcar: return "MCAR";
    case MechanismKind::kNmar: return "NMAR";
    case MechanismKind::kMar: break;
  }
  return "MAR(" + schema.variable(m.depends_on).name + ")";
}

std::string_view to_string(YAssociation a) {
  return a == YAssociation::kSaturated ? "saturated" : "pairwise";
}

YAssociation parse_y_association(std::string_view s) {
  if (s == "saturated") return YAssociation::kSaturated;
  if (s == "pairwise") return YAssociation::kPairwise;
  throw DataError("unknown association structure '" + std::string(s) + "'");
}

std::string_view to_string(DfConvention c) {
  return c == DfConvention::kPoissonCells ? "poisson-cells" : "multinomial";
}

DfConvention parse_df_convention(std::string_view s) {
  if (s == "poisson-cells") return DfConvention::kPoissonCells;
  if (s == "multinomial") return DfConvention::kMultinomial;
  throw DataError("unknown df convention '" + std::string(s) + "'");
}

std::size_t indicator_axis(const TableSchema& schema, std::size_t variable) {
  return schema.size() + schema.missing_position(variable);
}

std::string axis_name(const TableSchema& schema, std::size_t axis) {
  if (axis < schema.size()) return schema.variable(axis).name;
  const auto& name = schema.variable(schema.missing().at(axis - schema.size())).name;
  return indexed_name(name) ? "R" + name.substr(1) : "R_" + name;
}

std::string term_label(const TableSchema& schema, const Term& term) {
  if (term.empty()) return "const";
  bool compact = std::all_of(schema.variables().begin(), schema.variables().end(),
                             [](const Variable& v) { return indexed_name(v.name); });
  std::string s;
  for (std::size_t a = 0; a < term.size(); ++a) {
    if (a && !compact) s += ":";
    s += axis_name(schema, term[a]);
  }
  return s;
}

NonresponseModel make_model(const TableSchema& schema, const MechanismSpec& mechanisms,
                            YAssociation association) {
  schema.require_supported();
  const auto& missing = schema.missing();
  if (mechanisms.size() != missing.size())
    throw DataError("mechanism list does not match the missing variables");
  std::vector<Term> base;
  if (association == YAssociation::kSaturated || schema.size() == 2) {
    Term y;
    for (std::size_t v = 0; v < schema.size(); ++v) y.push_back(v);
    base.push_back(y);
  } else {
    for (std::size_t u = 0; u < schema.size(); ++u)
      for (std::size_t v = u + 1; v < schema.size(); ++v) base.push_back({u, v});
  }
  Term rr;
  for (std::size_t m = 0; m < missing.size(); ++m) rr.push_back(schema.size() + m);
  base.push_back(rr);
  for (std::size_t m = 0; m < missing.size(); ++m) {
    const auto& mech = mechanisms[m];
    const auto r = schema.size() + m;
    if (mech.kind == MechanismKind::kNmar) base.push_back({missing[m], r});
    if (mech.kind == MechanismKind::kMar) {
      if (mech.depends_on == missing[m] || mech.depends_on >= schema.size())
        throw DataError("MAR dependency must be another substantive variable");
      base.push_back({mech.depends_on, r});
    }
  }
  NonresponseModel model;
  model.mechanisms = mechanisms;
  model.association = association;
  model.generating = maximal(base);
  model.terms = closure(model.generating);
  return model;
}

std::vector<NonresponseModel> enumerate_models(const TableSchema& schema, YAssociation association) {
  schema.require_supported();
  const auto& miss = schema.missing();
  std::vector<NonresponseModel> out;
  auto add = [&](std::string id, std::string group, MechanismSpec spec) {
    auto m = make_model(schema, spec, association);
    m.id = std::move(id);
    m.group = std::move(group);
    out.push_back(std::move(m));
  };
  switch (schema.shape()) {
    case Shape::kTwoWayBothMissing: {
      const auto nm = Mechanism::nmar(), mc = Mechanism::mcar();
      const auto mar1 = Mechanism::mar(miss[1]), mar2 = Mechanism::mar(miss[0]);
      const std::pair<Mechanism, Mechanism> list[] = {
          {nm, mc}, {nm, mar2}, {nm, nm}, {mar1, mc}, {mar1, mar2},
          {mar1, nm}, {mc, mar2}, {mc, nm}, {mc, mc}};
      for (std::size_t k = 0; k < 9; ++k) {
        const auto id = "M" + std::to_string(k + 1);
        add(id, id, {list[k].first, list[k].second});
      }
      break;
    }
    case Shape::kThreeWayOneMissing: {
      std::vector<std::size_t> others;
      for (std::size_t v = 0; v < schema.size(); ++v)
        if (v != miss[0]) others.push_back(v);
      add("C1", "C1", {Mechanism::nmar()});
      add("C2", "C2", {Mechanism::mar(others[0])});
      add("C3", "C3", {Mechanism::mar(others[1])});
      add("C4", "C4", {Mechanism::mcar()});
      break;
    }
    case Shape::kThreeWayTwoMissing: {
      std::vector<std::pair<std::string, NonresponseModel>> all;
      for (const auto& a : options_for(schema, miss[0]))
        for (const auto& b : options_for(schema, miss[1])) {
          auto m = make_model(schema, {a, b}, association);
          m.group = d_group(a, b);
          m.id = m.group + ":" + schema.variable(miss[0]).name + "=" + to_string(a, schema) + "," +
                 schema.variable(miss[1]).name + "=" + to_string(b, schema);
          all.emplace_back(m.group, std::move(m));
        }
      std::stable_sort(all.begin(), all.end(),
                       [](const auto& x, const auto& y) { return x.first < y.first; });
      for (auto& [g, m] : all) out.push_back(std::move(m));
      break;
    }
    case Shape::kUnsupported: break;
  }
  return out;
}

NonresponseModel find_model(const TableSchema& schema, std::string_view id, YAssociation association) {
  auto all = enumerate_models(schema, association);
  for (auto& m : all)
    if (m.id == id) return m;
  const NonresponseModel* hit = nullptr;
  int n = 0;
  for (const auto& m : all)
    if (m.group == id) {
      hit = &m;
      ++n;
    }
  if (n == 1) return *hit;
  if (n > 1) throw DataError("model id '" + std::string(id) + "' is ambiguous; use the full id");
  throw DataError("unknown model '" + std::string(id) + "' for shape " +
                  std::string(to_string(schema.shape())));
}

int free_parameter_count(const NonresponseModel& model, const TableSchema& schema) {
  int total = 0;
  for (const auto& t : model.terms) {
    int k = 1;
    for (auto a : t) k *= (a < schema.size() ? schema.levels(a) : 2) - 1;
    total += k;
  }
  return total;
}

int observed_statistic_count(const TableSchema& schema) {
  schema.require_supported();
  int total = 0;
  for (Pattern p : schema.patterns()) {
    int k = 1;
    for (std::size_t v = 0; v < schema.size(); ++v)
      if (p & (Pattern{1} << v)) k *= schema.levels(v);
    total += k;
  }
  return total;
}

int degrees_of_freedom(const NonresponseModel& model, const TableSchema& schema, DfConvention convention) {
  int cells = observed_statistic_count(schema);
  int params = free_parameter_count(model, schema);
  if (convention == DfConvention::kMultinomial) {
    --cells;
    --params;
  }
  return std::max(0, cells - params);
}

bool predicted_perfect_fit(const NonresponseModel& model, const TableSchema& schema) {
  return free_parameter_count(model, schema) == observed_statistic_count(schema);
}

}  // namespace misstab
