#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace misstab {

// Malformed or inconsistent input data (documents, datasets, patterns).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The table's shape has no assessment procedure or model catalog.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: refused resample, singular solve, unusable fit.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Variable {
  std::string name;
  int levels = 0;

  bool operator==(const Variable&) const = default;
};

// Observation pattern of a stratum: bit v is set when variable v is observed.
using Pattern = std::uint32_t;

enum class Shape {
  kTwoWayBothMissing,   // I x J x 2 x 2
  kThreeWayOneMissing,  // I x J x K x 2
  kThreeWayTwoMissing,  // I x J x K x 2 x 2
  kUnsupported,         // storable (complete tables, three missing) but not analysable
};

std::string_view to_string(Shape shape);

// Substantive variables in declared order plus the subset carrying a missing
// indicator. Any 2 or 3 variables with >= 2 levels can be stored; only the
// three shapes above are analysable.
class TableSchema {
 public:
  TableSchema() = default;
  TableSchema(std::vector<Variable> variables, const std::vector<std::string>& missing);

  const std::vector<Variable>& variables() const { return variables_; }
  std::size_t size() const { return variables_.size(); }
  const Variable& variable(std::size_t v) const { return variables_.at(v); }
  int levels(std::size_t v) const { return variables_.at(v).levels; }

  // Throws DataError for an unknown name.
  std::size_t index_of(std::string_view name) const;

  // Indices of variables with a missing indicator, in declared order.
  const std::vector<std::size_t>& missing() const { return missing_; }
  bool is_missing(std::size_t v) const;
  // Position of `v` within missing(); throws if v is always observed.
  std::size_t missing_position(std::size_t v) const;

  Pattern full_pattern() const { return (Pattern{1} << variables_.size()) - 1; }
  Pattern always_observed() const;
  // Every pattern the schema requires, full pattern first, then by
  // decreasing number of observed variables, ties by ascending bit value.
  std::vector<Pattern> patterns() const;
  bool is_valid_pattern(Pattern p) const;
  // "{full}", "{Y1 unobserved}", "{Y1,Y2 unobserved}".
  std::string describe(Pattern p) const;

  Shape shape() const;
  // Throws ShapeError unless the shape is analysable.
  void require_supported() const;

  bool operator==(const TableSchema&) const = default;

 private:
  std::vector<Variable> variables_;
  std::vector<std::size_t> missing_;
};

// Counts for one observation pattern, indexed by the observed variables in
// declared order (row-major, last axis fastest).
class Stratum {
 public:
  Stratum(const TableSchema& schema, Pattern pattern, std::vector<std::int64_t> counts);

  Pattern pattern() const { return pattern_; }
  const std::vector<std::size_t>& axes() const { return axes_; }
  const std::vector<int>& extents() const { return extents_; }
  std::span<const std::int64_t> counts() const { return counts_; }
  std::size_t cell_count() const { return counts_.size(); }

  // `levels` holds one 0-based level per observed axis.
  std::size_t flat_index(std::span<const int> levels) const;
  std::int64_t at(std::span<const int> levels) const { return counts_[flat_index(levels)]; }
  std::int64_t total() const;

  bool operator==(const Stratum&) const = default;

 private:
  Pattern pattern_;
  std::vector<std::size_t> axes_;
  std::vector<int> extents_;
  std::vector<std::int64_t> counts_;
};

// Fully observed stratum plus one supplemental stratum for every other
// pattern of the schema. Immutable after construction.
class IncompleteTable {
 public:
  IncompleteTable(TableSchema schema, std::vector<Stratum> strata);

  const TableSchema& schema() const { return schema_; }
  std::span<const Stratum> strata() const { return strata_; }
  const Stratum& stratum(Pattern p) const;
  const Stratum& full() const { return strata_.front(); }
  // Stratum in which exactly variable `v` is unobserved.
  const Stratum& without(std::size_t v) const;
  std::int64_t total() const { return total_; }

  bool operator==(const IncompleteTable&) const = default;

 private:
  TableSchema schema_;
  std::vector<Stratum> strata_;  // canonical order of schema_.patterns()
  std::int64_t total_ = 0;
};

// Keeps the listed patterns (given relative to `table`'s schema). Variables
// observed in every kept pattern lose their missing indicator.
IncompleteTable subtable(const IncompleteTable& table, std::span<const Pattern> keep);

IncompleteTable scale_counts(const IncompleteTable& table, std::int64_t factor);

}  // namespace misstab
