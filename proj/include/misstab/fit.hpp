#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "misstab/design.hpp"
#include "misstab/model.hpp"
#include "misstab/table.hpp"

namespace misstab {

enum class InitStrategy { kUniform, kPerturbed };

struct FitOptions {
  double tol = 1e-10;        // relative change of the observed-data loglik
  double param_tol = 1e-10;  // estimated distance of fitted probabilities from the limit
  int max_iter = 10000;
  InitStrategy init = InitStrategy::kUniform;
  std::uint64_t seed = 1;  // perturbed init only
  DfConvention df = DfConvention::kPoissonCells;
  bool closed_form = true;  // prefer closed forms when available
  bool record_trace = false;
};

inline constexpr double kBoundaryThreshold = 1e-8;

// λ for one term over the full level grid of its axes (row-major).
struct TermEstimate {
  Term term;
  std::string label;
  std::vector<double> values;
};

struct FitResult {
  NonresponseModel model;
  TableSchema schema;
  std::string method;              // "closed-form" or "em"
  std::vector<double> mu;          // full cross, CellLayout order
  std::vector<double> observed;    // y per observed cell
  std::vector<double> fitted;      // mu collapsed per observed cell
  double n = 0;
  double loglik = 0;
  double g2 = 0;
  int params = 0;
  int df = 0;
  DfConvention convention = DfConvention::kPoissonCells;
  double p_value = 1;
  double aic = 0, bic = 0;
  bool converged = false;
  bool boundary = false;
  bool perfect_fit_predicted = false;
  int iterations = 0;
  std::optional<std::vector<TermEstimate>> lambda;  // empty when some mu is 0
  std::vector<double> trace;       // observed-data loglik per EM iteration
  std::vector<std::string> notes;

  std::vector<double> pi() const;
};

// Poisson kernel: sum y log(collapsed mu) - sum mu.
double observed_loglik(const CellLayout& layout, std::span<const double> y, std::span<const double> mu);

// 2 sum y log(y / collapsed mu); +inf if some collapsed mu is 0 where y > 0.
double g_squared(const FitResult& fit, const IncompleteTable& table);
double g_squared(std::span<const double> y, std::span<const double> fitted);

struct InformationCriteria {
  double aic, bic;
};
InformationCriteria aic_bic(const FitResult& fit, const IncompleteTable& table);

// Least-squares projection of log mu onto the coded design.
std::optional<std::vector<TermEstimate>> recover_lambda(const DesignStructure& design,
                                                        std::span<const double> mu);

// λ of `term` at the given full-cross levels, 0 if the model lacks the term.
double lambda_at(const std::vector<TermEstimate>& lambda, const Term& term,
                 std::span<const int> full_levels, const std::vector<int>& extents);

struct ClosedForm {
  std::optional<FitResult> fit;
  bool boundary = false;
  std::string reason;
};

ClosedForm fit_closed_form(const NonresponseModel& model, const IncompleteTable& table,
                           const FitOptions& opts = {});
FitResult fit_em(const NonresponseModel& model, const IncompleteTable& table,
                 const FitOptions& opts = {});
// Closed form when available (and allowed), EM otherwise.
FitResult fit_model(const NonresponseModel& model, const IncompleteTable& table,
                    const FitOptions& opts = {});

// Sorts by G2, then parameter count, then id.
void rank_fits(std::vector<FitResult>& fits);

// Every catalog model, ranked. The parallel version spreads models over
// OpenMP threads; both return identical results.
std::vector<FitResult> fit_all(const IncompleteTable& table, const FitOptions& opts = {},
                               YAssociation association = YAssociation::kSaturated);
std::vector<FitResult> fit_all_serial(const IncompleteTable& table, const FitOptions& opts = {},
                                      YAssociation association = YAssociation::kSaturated);

namespace detail {
FitResult finalize(const NonresponseModel& model, const IncompleteTable& table,
                   const DesignStructure& design, std::vector<double> mu, std::string method,
                   const FitOptions& opts);
}

}  // namespace misstab
