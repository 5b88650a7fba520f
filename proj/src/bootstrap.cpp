#include "misstab/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace misstab {

std::string_view to_string(Sampling s) { return s == Sampling::kMultinomial ? "multinomial" : "poisson"; }

Sampling parse_sampling(std::string_view s) {
  if (s == "multinomial") return Sampling::kMultinomial;
  if (s == "poisson") return Sampling::kPoisson;
  throw DataError("unknown sampling scheme '" + std::string(s) + "'");
}

double FamilyTally::percentage() const {
  const auto denom = replicates - undefined;
  if (denom <= 0) return std::numeric_limits<double>::quiet_NaN();
  return 100.0 * static_cast<double>(satisfied) / static_cast<double>(denom);
}

bool BootstrapSummary::operator==(const BootstrapSummary& o) const {
  auto same = [](const FamilyTally& a, const FamilyTally& b) {
    return a.variable == b.variable && a.satisfied == b.satisfied && a.undefined == b.undefined &&
           a.replicates == b.replicates;
  };
  if (model_id != o.model_id || replicates != o.replicates || seed != o.seed || sampling != o.sampling ||
      families.size() != o.families.size() || !same(combined, o.combined))
    return false;
  for (std::size_t k = 0; k < families.size(); ++k)
    if (!same(families[k], o.families[k])) return false;
  return true;
}

std::vector<double> resample_probabilities(const FitResult& fit) {
  std::vector<double> p(fit.fitted);
  double total = 0;
  for (std::size_t o = 0; o < p.size(); ++o) {
    if (!(p[o] >= 0) || !std::isfinite(p[o])) throw ComputationError("fit has non-finite expected counts");
    if (p[o] <= 0 && fit.observed[o] > 0)
      throw ComputationError("fit gives zero probability to an observed cell with positive count");
    total += p[o];
  }
  for (auto& v : p) v /= total;
  return p;
}

namespace {

IncompleteTable assemble(const FitResult& fit, const CellLayout& layout, const std::vector<std::int64_t>& counts) {
  const auto patterns = fit.schema.patterns();
  std::vector<std::vector<std::int64_t>> cells(patterns.size());
  for (std::size_t o = 0; o < counts.size(); ++o) cells[layout.observed_stratum(o)].push_back(counts[o]);
  std::vector<Stratum> strata;
  for (std::size_t s = 0; s < patterns.size(); ++s) strata.emplace_back(fit.schema, patterns[s], std::move(cells[s]));
  return IncompleteTable(fit.schema, std::move(strata));
}

struct Sampler {
  const FitResult& fit;
  CellLayout layout;
  std::vector<double> cumulative;
  std::int64_t n;

  explicit Sampler(const FitResult& f) : fit(f), layout(f.schema), n(static_cast<std::int64_t>(std::llround(f.n))) {
    const auto p = resample_probabilities(f);
    double acc = 0;
    for (double v : p) cumulative.push_back(acc += v);
    cumulative.back() = 1.0;
  }

  IncompleteTable draw(Rng& rng, Sampling sampling) const {
    std::vector<std::int64_t> counts(cumulative.size(), 0);
    if (sampling == Sampling::kMultinomial) {
      for (std::int64_t u = 0; u < n; ++u) {
        const double x = rng.uniform();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
        ++counts[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                   static_cast<std::ptrdiff_t>(counts.size()) - 1))];
      }
    } else {
      for (std::size_t o = 0; o < counts.size(); ++o) counts[o] = poisson(rng, fit.fitted[o]);
    }
    return assemble(fit, layout, counts);
  }
};

BootstrapSummary empty_summary(const FitResult& fit, const BootstrapOptions& opts) {
  BootstrapSummary s;
  s.model_id = fit.model.id;
  s.replicates = 0;
  s.seed = opts.seed;
  s.sampling = opts.sampling;
  for (auto v : fit.schema.missing()) s.families.push_back({v, 0, 0, 0});
  s.combined.variable = fit.schema.missing().front();
  s.g2 = fit.g2;
  s.fit_boundary = fit.boundary;
  return s;
}

void merge(BootstrapSummary& into, const BootstrapSummary& part) {
  into.replicates += part.replicates;
  for (std::size_t k = 0; k < into.families.size(); ++k) {
    into.families[k].satisfied += part.families[k].satisfied;
    into.families[k].undefined += part.families[k].undefined;
    into.families[k].replicates += part.families[k].replicates;
  }
  into.combined.satisfied += part.combined.satisfied;
  into.combined.undefined += part.combined.undefined;
  into.combined.replicates += part.combined.replicates;
}

void check(const BootstrapOptions& opts) {
  if (opts.replicates < 1) throw DataError("replicates must be at least 1");
}

}  // namespace

IncompleteTable resample(const FitResult& fit, Rng& rng, Sampling sampling) {
  return Sampler(fit).draw(rng, sampling);
}

void tally(BootstrapSummary& summary, const AssessmentVerdict& verdict) {
  ++summary.replicates;
  bool any_undefined = false;
  for (std::size_t k = 0; k < summary.families.size(); ++k) {
    const auto& fam = verdict.families[k];
    auto& t = summary.families[k];
    ++t.replicates;
    if (fam.suggested == SuggestedClass::kMar)
      ++t.satisfied;
    else if (fam.undefined > 0)
      ++t.undefined;
    any_undefined |= fam.undefined > 0;
  }
  ++summary.combined.replicates;
  if (verdict.suggested == SuggestedClass::kMar)
    ++summary.combined.satisfied;
  else if (any_undefined)
    ++summary.combined.undefined;
}

BootstrapSummary bootstrap_from_fit_serial(const FitResult& fit, const BootstrapOptions& opts) {
  check(opts);
  const Sampler sampler(fit);
  auto summary = empty_summary(fit, opts);
  for (std::int64_t r = 0; r < opts.replicates; ++r) {
    Rng rng(replicate_seed(opts.seed, static_cast<std::uint64_t>(r)));
    tally(summary, assess(sampler.draw(rng, opts.sampling)));
  }
  return summary;
}

BootstrapSummary bootstrap_from_fit(const FitResult& fit, const BootstrapOptions& opts) {
  check(opts);
  const Sampler sampler(fit);
  auto summary = empty_summary(fit, opts);
#pragma omp parallel
  {
    auto local = empty_summary(fit, opts);
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < opts.replicates; ++r) {
      Rng rng(replicate_seed(opts.seed, static_cast<std::uint64_t>(r)));
      tally(local, assess(sampler.draw(rng, opts.sampling)));
    }
#pragma omp critical
    merge(summary, local);
  }
  return summary;
}

BootstrapSummary bootstrap_assess(std::string_view model_id, const IncompleteTable& table,
                                  const BootstrapOptions& opts) {
  check(opts);
  const auto model = find_model(table.schema(), model_id, opts.association);
  const auto fit = fit_model(model, table, opts.fit);
  return bootstrap_from_fit(fit, opts);
}

}  // namespace misstab
