#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "misstab/table.hpp"

namespace misstab {

enum class MechanismKind { kMcar, kNmar, kMar };

struct Mechanism {
  MechanismKind kind = MechanismKind::kMcar;
  std::size_t depends_on = 0;  // variable index, meaningful for kMar only

  static Mechanism mcar() { return {MechanismKind::kMcar, 0}; }
  static Mechanism nmar() { return {MechanismKind::kNmar, 0}; }
  static Mechanism mar(std::size_t v) { return {MechanismKind::kMar, v}; }
  bool operator==(const Mechanism&) const = default;
};

// One entry per missing variable, aligned with TableSchema::missing().
using MechanismSpec = std::vector<Mechanism>;

std::string to_string(const Mechanism& m, const TableSchema& schema);

// A log-linear term is the sorted list of full-cross axes it involves. Axes
// 0..n-1 are the substantive variables in declared order, followed by one
// binary indicator per missing variable (level 0 observed, 1 missing).
using Term = std::vector<std::size_t>;

// Association structure among the substantive variables. Saturated is the
// default; pairwise drops the three-way term for three-variable tables.
enum class YAssociation { kSaturated, kPairwise };
std::string_view to_string(YAssociation a);
YAssociation parse_y_association(std::string_view s);

struct NonresponseModel {
  std::string id;     // "M4", "C3", "D6:Y1=NMAR,Y2=MAR(Y3)"
  std::string group;  // "M4", "C3", "D6"
  MechanismSpec mechanisms;
  YAssociation association = YAssociation::kSaturated;
  std::vector<Term> terms;       // hierarchical closure incl. the intercept {}
  std::vector<Term> generating;  // maximal terms, the sufficient margins
};

std::size_t indicator_axis(const TableSchema& schema, std::size_t variable);
std::string axis_name(const TableSchema& schema, std::size_t axis);
std::string term_label(const TableSchema& schema, const Term& term);

// Builds the model from its mechanisms; `id`/`group` are set by the catalog.
NonresponseModel make_model(const TableSchema& schema, const MechanismSpec& mechanisms,
                            YAssociation association = YAssociation::kSaturated);

// M1..M9, C1..C4 or the 16 D models (groups of 1,1,4,2,4,4).
std::vector<NonresponseModel> enumerate_models(const TableSchema& schema,
                                               YAssociation association = YAssociation::kSaturated);

// Accepts a full id or, where unambiguous, a shorthand like "D2". Throws
// DataError for ids outside the shape's catalog.
NonresponseModel find_model(const TableSchema& schema, std::string_view id,
                            YAssociation association = YAssociation::kSaturated);

int free_parameter_count(const NonresponseModel& model, const TableSchema& schema);
int observed_statistic_count(const TableSchema& schema);

enum class DfConvention { kPoissonCells, kMultinomial };
std::string_view to_string(DfConvention c);
DfConvention parse_df_convention(std::string_view s);

int degrees_of_freedom(const NonresponseModel& model, const TableSchema& schema,
                       DfConvention convention = DfConvention::kPoissonCells);

// Parameter count equals the number of observed cells.
bool predicted_perfect_fit(const NonresponseModel& model, const TableSchema& schema);

}  // namespace misstab
