#include "misstab/design.hpp"

#include <algorithm>

namespace misstab {

CellLayout::CellLayout(const TableSchema& schema) : schema_(schema) {
  schema_.require_supported();
  for (std::size_t v = 0; v < schema_.size(); ++v) extents_.push_back(schema_.levels(v));
  for (std::size_t m = 0; m < schema_.missing().size(); ++m) extents_.push_back(2);
  std::size_t cells = 1;
  for (int e : extents_) cells *= static_cast<std::size_t>(e);
  owner_.assign(cells, 0);

  // observed cells, strata in canonical order
  std::vector<std::size_t> first_obs;
  for (Pattern p : schema_.patterns()) {
    first_obs.push_back(observed_stratum_.size());
    std::size_t n = 1;
    for (std::size_t v = 0; v < schema_.size(); ++v)
      if (p & (Pattern{1} << v)) n *= static_cast<std::size_t>(schema_.levels(v));
    for (std::size_t c = 0; c < n; ++c) {
      observed_stratum_.push_back(first_obs.size() - 1);
      observed_offset_.push_back(c);
    }
  }
  const auto patterns = schema_.patterns();
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const auto lv = levels(cell);
    Pattern p = schema_.always_observed();
    for (std::size_t m = 0; m < schema_.missing().size(); ++m)
      if (lv[schema_.size() + m] == 0) p |= Pattern{1} << schema_.missing()[m];
    const auto s = static_cast<std::size_t>(std::find(patterns.begin(), patterns.end(), p) -
                                            patterns.begin());
    std::size_t off = 0;
    for (std::size_t v = 0; v < schema_.size(); ++v)
      if (p & (Pattern{1} << v))
        off = off * static_cast<std::size_t>(schema_.levels(v)) + static_cast<std::size_t>(lv[v]);
    owner_[cell] = first_obs[s] + off;
  }
}

std::vector<int> CellLayout::levels(std::size_t cell) const {
  std::vector<int> lv(extents_.size());
  for (std::size_t a = extents_.size(); a-- > 0;) {
    lv[a] = static_cast<int>(cell % static_cast<std::size_t>(extents_[a]));
    cell /= static_cast<std::size_t>(extents_[a]);
  }
  return lv;
}

std::size_t CellLayout::index(std::span<const int> levels) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < extents_.size(); ++a)
    idx = idx * static_cast<std::size_t>(extents_[a]) + static_cast<std::size_t>(levels[a]);
  return idx;
}

std::vector<double> CellLayout::observed_counts(const IncompleteTable& table) const {
  if (!(table.schema() == schema_)) throw DataError("table does not match the layout's schema");
  std::vector<double> y(observed_count());
  for (std::size_t o = 0; o < y.size(); ++o)
    y[o] = static_cast<double>(table.strata()[observed_stratum_[o]].counts()[observed_offset_[o]]);
  return y;
}

std::vector<double> CellLayout::collapse(std::span<const double> mu) const {
  std::vector<double> out(observed_count(), 0.0);
  for (std::size_t c = 0; c < owner_.size(); ++c) out[owner_[c]] += mu[c];
  return out;
}

Margin make_margin(const CellLayout& layout, const Term& term) {
  Margin m;
  m.term = term;
  for (auto a : term) m.size *= static_cast<std::size_t>(layout.extents()[a]);
  m.index.resize(layout.cell_count());
  for (std::size_t c = 0; c < layout.cell_count(); ++c) {
    const auto lv = layout.levels(c);
    std::size_t idx = 0;
    for (auto a : term)
      idx = idx * static_cast<std::size_t>(layout.extents()[a]) + static_cast<std::size_t>(lv[a]);
    m.index[c] = idx;
  }
  return m;
}

DesignStructure build_design(const NonresponseModel& model, const TableSchema& schema) {
  DesignStructure d{CellLayout(schema), model.terms, {}, {}, {}};
  const auto& ext = d.layout.extents();
  std::size_t cols = 0;
  for (const auto& t : d.terms) {
    d.term_offset.push_back(cols);
    std::size_t k = 1;
    for (auto a : t) k *= static_cast<std::size_t>(ext[a] - 1);
    cols += k;
  }
  d.term_offset.push_back(cols);
  d.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.layout.cell_count()),
                                   static_cast<Eigen::Index>(cols));
  for (std::size_t c = 0; c < d.layout.cell_count(); ++c) {
    const auto lv = d.layout.levels(c);
    for (std::size_t t = 0; t < d.terms.size(); ++t) {
      const auto& term = d.terms[t];
      const std::size_t k = d.term_offset[t + 1] - d.term_offset[t];
      for (std::size_t j = 0; j < k; ++j) {
        // decode j into one free level per axis of the term
        std::size_t rest = j;
        double w = 1.0;
        for (std::size_t a = term.size(); a-- > 0;) {
          const int e = ext[term[a]];
          const int col = static_cast<int>(rest % static_cast<std::size_t>(e - 1));
          rest /= static_cast<std::size_t>(e - 1);
          w *= effect_code(lv[term[a]], col, e);
        }
        d.matrix(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(d.term_offset[t] + j)) = w;
      }
    }
  }
  for (const auto& g : model.generating) d.margins.push_back(make_margin(d.layout, g));
  return d;
}

}  // namespace misstab
