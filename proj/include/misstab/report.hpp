#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "misstab/bootstrap.hpp"
#include "misstab/fit.hpp"
#include "misstab/mar_bounds.hpp"
#include "misstab/odds.hpp"

namespace misstab {

// 4 significant digits; "inf" / "nan" spelled out.
std::string sig4(double x);

nlohmann::json verdict_json(const AssessmentVerdict& verdict, const TableSchema& schema);
std::string verdict_text(const AssessmentVerdict& verdict, const TableSchema& schema);

nlohmann::json fit_json(const FitResult& fit);
nlohmann::json mar_bounds_json(const MarBoundReport& report, const TableSchema& schema);
// Ranked table; `best` marks the minimum-G2 model among non-perfect fits.
std::string fits_text(const std::vector<FitResult>& fits);
std::string fit_detail_text(const FitResult& fit);
std::string mar_bounds_text(const MarBoundReport& report, const TableSchema& schema);
// Index into `fits` of the minimum-G2 model that is neither predicted to be
// a perfect fit nor has G2 ~ 0; -1 if none.
int best_non_perfect(const std::vector<FitResult>& fits);

nlohmann::json catalog_json(const TableSchema& schema, YAssociation association, DfConvention convention);
std::string catalog_text(const TableSchema& schema, YAssociation association, DfConvention convention);

nlohmann::json bootstrap_json(const BootstrapSummary& summary, const TableSchema& schema);
std::string bootstrap_text(const BootstrapSummary& summary, const TableSchema& schema);
std::string bootstrap_csv(const BootstrapSummary& summary, const TableSchema& schema);

// "nu" for the first missing variable, "omega" for the second.
std::string family_symbol(std::size_t position);

}  // namespace misstab
