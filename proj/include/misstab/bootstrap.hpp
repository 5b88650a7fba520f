#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "misstab/fit.hpp"
#include "misstab/odds.hpp"
#include "misstab/rng.hpp"

namespace misstab {

enum class Sampling { kMultinomial, kPoisson };
std::string_view to_string(Sampling s);
Sampling parse_sampling(std::string_view s);

// Observed-cell probabilities of a fit; throws ComputationError when an
// observed cell with positive count has zero fitted expectation.
std::vector<double> resample_probabilities(const FitResult& fit);

// One replicate table with the fit's schema. Multinomial draws exactly N
// units; Poisson draws every observed cell independently.
IncompleteTable resample(const FitResult& fit, Rng& rng, Sampling sampling = Sampling::kMultinomial);

struct FamilyTally {
  std::size_t variable = 0;  // missing variable of the family
  std::int64_t satisfied = 0;  // replicates whose family verdict is MAR
  std::int64_t undefined = 0;  // non-MAR replicates with an undefined odds
  double percentage() const;
  std::int64_t replicates = 0;
};

struct BootstrapOptions {
  std::int64_t replicates = 10000;
  std::uint64_t seed = 1;
  Sampling sampling = Sampling::kMultinomial;
  FitOptions fit;
  YAssociation association = YAssociation::kSaturated;
};

struct BootstrapSummary {
  std::string model_id;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  Sampling sampling = Sampling::kMultinomial;
  std::vector<FamilyTally> families;  // declared order of missing variables
  FamilyTally combined;               // any family MAR
  double g2 = 0;                      // of the generating fit
  bool fit_boundary = false;

  bool operator==(const BootstrapSummary& o) const;
};

// Tallies the verdict of one replicate into `summary`.
void tally(BootstrapSummary& summary, const AssessmentVerdict& verdict);

BootstrapSummary bootstrap_from_fit(const FitResult& fit, const BootstrapOptions& opts);
BootstrapSummary bootstrap_from_fit_serial(const FitResult& fit, const BootstrapOptions& opts);

// Fits `model_id` to `table`, then bootstraps (OpenMP across replicates).
BootstrapSummary bootstrap_assess(std::string_view model_id, const IncompleteTable& table,
                                  const BootstrapOptions& opts = {});

}  // namespace misstab
