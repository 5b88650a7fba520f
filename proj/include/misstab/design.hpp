#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "misstab/model.hpp"
#include "misstab/table.hpp"

namespace misstab {

// Full cross of substantive levels and indicator levels (row-major, last axis
// fastest) plus the map from each full-cross cell to the observed cell it
// collapses into. Observed cells run through the strata in canonical order.
class CellLayout {
 public:
  explicit CellLayout(const TableSchema& schema);

  const TableSchema& schema() const { return schema_; }
  std::size_t axes() const { return extents_.size(); }
  const std::vector<int>& extents() const { return extents_; }
  std::size_t cell_count() const { return owner_.size(); }
  std::size_t observed_count() const { return observed_stratum_.size(); }

  std::vector<int> levels(std::size_t cell) const;
  std::size_t index(std::span<const int> levels) const;

  // observed cell owning a full-cross cell
  std::size_t owner(std::size_t cell) const { return owner_[cell]; }
  std::size_t observed_stratum(std::size_t obs) const { return observed_stratum_[obs]; }
  std::size_t observed_offset(std::size_t obs) const { return observed_offset_[obs]; }

  std::vector<double> observed_counts(const IncompleteTable& table) const;
  std::vector<double> collapse(std::span<const double> mu) const;

 private:
  TableSchema schema_;
  std::vector<int> extents_;
  std::vector<std::size_t> owner_;
  std::vector<std::size_t> observed_stratum_;
  std::vector<std::size_t> observed_offset_;
};

// Marginal table over a term's axes: index[cell] is the margin slot.
struct Margin {
  Term term;
  std::size_t size = 1;
  std::vector<std::size_t> index;
};

Margin make_margin(const CellLayout& layout, const Term& term);

struct DesignStructure {
  CellLayout layout;
  std::vector<Term> terms;
  // sum-to-zero coded design, one column per free parameter
  Eigen::MatrixXd matrix;
  // first column of each term (terms.size() + 1 entries)
  std::vector<std::size_t> term_offset;
  // generating-class margins
  std::vector<Margin> margins;
};

DesignStructure build_design(const NonresponseModel& model, const TableSchema& schema);

// Effects-coding weight of `level` for the free coefficient `col` of a
// factor with `extent` levels.
inline double effect_code(int level, int col, int extent) {
  if (level == extent - 1) return -1.0;
  return level == col ? 1.0 : 0.0;
}

}  // namespace misstab
