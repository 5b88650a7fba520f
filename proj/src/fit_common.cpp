#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "misstab/chisq.hpp"
#include "misstab/fit.hpp"

namespace misstab {

std::vector<double> FitResult::pi() const {
  std::vector<double> out(mu);
  for (auto& v : out) v /= n;
  return out;
}

double observed_loglik(const CellLayout& layout, std::span<const double> y, std::span<const double> mu) {
  const auto coll = layout.collapse(mu);
  double l = 0, total = 0;
  for (double m : mu) total += m;
  for (std::size_t o = 0; o < coll.size(); ++o) {
    if (y[o] <= 0) continue;
    if (coll[o] <= 0) return -std::numeric_limits<double>::infinity();
    l += y[o] * std::log(coll[o]);
  }
  return l - total;
}

double g_squared(std::span<const double> y, std::span<const double> fitted) {
  double g = 0;
  for (std::size_t o = 0; o < y.size(); ++o) {
    if (y[o] <= 0) continue;
    if (fitted[o] <= 0) return std::numeric_limits<double>::infinity();
    g += y[o] * std::log(y[o] / fitted[o]);
  }
  return std::max(0.0, 2 * g);
}

double g_squared(const FitResult& fit, const IncompleteTable& table) {
  CellLayout layout(table.schema());
  const auto y = layout.observed_counts(table);
  return g_squared(y, layout.collapse(fit.mu));
}

InformationCriteria aic_bic(const FitResult& fit, const IncompleteTable& table) {
  const double g = g_squared(fit, table);
  return {g + 2.0 * fit.params, g + std::log(static_cast<double>(table.total())) * fit.params};
}

std::optional<std::vector<TermEstimate>> recover_lambda(const DesignStructure& design,
                                                        std::span<const double> mu) {
  Eigen::VectorXd logmu(static_cast<Eigen::Index>(mu.size()));
  for (std::size_t c = 0; c < mu.size(); ++c) {
    if (!(mu[c] > 0) || !std::isfinite(mu[c])) return std::nullopt;
    logmu(static_cast<Eigen::Index>(c)) = std::log(mu[c]);
  }
  const Eigen::VectorXd beta = design.matrix.colPivHouseholderQr().solve(logmu);
  const auto& ext = design.layout.extents();
  std::vector<TermEstimate> out;
  for (std::size_t t = 0; t < design.terms.size(); ++t) {
    const auto& term = design.terms[t];
    TermEstimate est{term, term_label(design.layout.schema(), term), {}};
    std::size_t grid = 1;
    for (auto a : term) grid *= static_cast<std::size_t>(ext[a]);
    est.values.assign(grid, 0.0);
    const std::size_t k = design.term_offset[t + 1] - design.term_offset[t];
    for (std::size_t g = 0; g < grid; ++g) {
      std::vector<int> lv(term.size());
      std::size_t rest = g;
      for (std::size_t a = term.size(); a-- > 0;) {
        lv[a] = static_cast<int>(rest % static_cast<std::size_t>(ext[term[a]]));
        rest /= static_cast<std::size_t>(ext[term[a]]);
      }
      double v = 0;
      for (std::size_t j = 0; j < k; ++j) {
        std::size_t r = j;
        double w = 1;
        for (std::size_t a = term.size(); a-- > 0;) {
          const int e = ext[term[a]];
          w *= effect_code(lv[a], static_cast<int>(r % static_cast<std::size_t>(e - 1)), e);
          r /= static_cast<std::size_t>(e - 1);
        }
        v += w * beta(static_cast<Eigen::Index>(design.term_offset[t] + j));
      }
      est.values[g] = v;
    }
    out.push_back(std::move(est));
  }
  return out;
}

double lambda_at(const std::vector<TermEstimate>& lambda, const Term& term,
                 std::span<const int> full_levels, const std::vector<int>& extents) {
  for (const auto& est : lambda) {
    if (est.term != term) continue;
    std::size_t idx = 0;
    for (auto a : term)
      idx = idx * static_cast<std::size_t>(extents[a]) + static_cast<std::size_t>(full_levels[a]);
    return est.values[idx];
  }
  return 0.0;
}

namespace detail {

FitResult finalize(const NonresponseModel& model, const IncompleteTable& table,
                   const DesignStructure& design, std::vector<double> mu, std::string method,
                   const FitOptions& opts) {
  FitResult r;
  r.model = model;
  r.schema = table.schema();
  r.method = std::move(method);
  r.mu = std::move(mu);
  r.observed = design.layout.observed_counts(table);
  r.fitted = design.layout.collapse(r.mu);
  r.n = static_cast<double>(table.total());
  r.loglik = observed_loglik(design.layout, r.observed, r.mu);
  r.g2 = g_squared(r.observed, r.fitted);
  r.params = free_parameter_count(model, table.schema());
  r.convention = opts.df;
  r.df = degrees_of_freedom(model, table.schema(), opts.df);
  r.p_value = chi_square_sf(r.g2, r.df);
  r.aic = r.g2 + 2.0 * r.params;
  r.bic = r.g2 + std::log(r.n) * r.params;
  r.perfect_fit_predicted = predicted_perfect_fit(model, table.schema());
  r.boundary = !std::isfinite(r.g2);
  for (double m : r.mu)
    if (m / r.n < kBoundaryThreshold) r.boundary = true;
  r.lambda = recover_lambda(design, r.mu);
  return r;
}

}  // namespace detail

FitResult fit_model(const NonresponseModel& model, const IncompleteTable& table, const FitOptions& opts) {
  std::string note;
  bool cf_boundary = false;
  if (opts.closed_form) {
    auto cf = fit_closed_form(model, table, opts);
    if (cf.fit) return std::move(*cf.fit);
    cf_boundary = cf.boundary;
    note = "closed form unavailable: " + cf.reason;
  }
  auto r = fit_em(model, table, opts);
  if (cf_boundary) r.boundary = true;
  if (!note.empty()) r.notes.push_back(note);
  return r;
}

void rank_fits(std::vector<FitResult>& fits) {
  std::stable_sort(fits.begin(), fits.end(), [](const FitResult& a, const FitResult& b) {
    const bool tie = std::abs(a.g2 - b.g2) <= 1e-8 || (std::isinf(a.g2) && std::isinf(b.g2));
    if (!tie) return a.g2 < b.g2;
    if (a.params != b.params) return a.params < b.params;
    return a.model.id < b.model.id;
  });
}

std::vector<FitResult> fit_all_serial(const IncompleteTable& table, const FitOptions& opts,
                                      YAssociation association) {
  std::vector<FitResult> out;
  for (const auto& m : enumerate_models(table.schema(), association)) out.push_back(fit_model(m, table, opts));
  rank_fits(out);
  return out;
}

std::vector<FitResult> fit_all(const IncompleteTable& table, const FitOptions& opts, YAssociation association) {
  const auto models = enumerate_models(table.schema(), association);
  std::vector<FitResult> out(models.size());
  std::vector<std::exception_ptr> errors(models.size());
  const int n = static_cast<int>(models.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = fit_model(models[static_cast<std::size_t>(k)], table, opts);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  rank_fits(out);
  return out;
}

}  // namespace misstab
