#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "misstab/fit.hpp"
#include "misstab/rng.hpp"

namespace misstab {
namespace {

std::vector<double> initial_mu(const DesignStructure& d, double n, const FitOptions& opts) {
  const std::size_t cells = d.layout.cell_count();
  if (opts.init == InitStrategy::kUniform) return std::vector<double>(cells, n / static_cast<double>(cells));
  // random point inside the model
  Rng rng(opts.seed);
  Eigen::VectorXd beta(d.matrix.cols());
  for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = rng.uniform() - 0.5;
  const Eigen::VectorXd eta = d.matrix * beta;
  std::vector<double> mu(cells);
  double total = 0;
  for (std::size_t c = 0; c < cells; ++c) total += mu[c] = std::exp(eta(static_cast<Eigen::Index>(c)));
  for (auto& m : mu) m *= n / total;
  return mu;
}

// Iterative proportional fitting of mu to the margins of `target`, starting
// from the current mu.
void ipf(std::vector<double>& mu, const std::vector<double>& target, const std::vector<Margin>& margins) {
  std::vector<std::vector<double>> goal;
  for (const auto& m : margins) {
    std::vector<double> s(m.size, 0.0);
    for (std::size_t c = 0; c < mu.size(); ++c) s[m.index[c]] += target[c];
    goal.push_back(std::move(s));
  }
  std::vector<double> cur;
  for (int cycle = 0; cycle < 200; ++cycle) {
    double worst = 0;
    for (std::size_t g = 0; g < margins.size(); ++g) {
      const auto& m = margins[g];
      cur.assign(m.size, 0.0);
      for (std::size_t c = 0; c < mu.size(); ++c) cur[m.index[c]] += mu[c];
      for (std::size_t k = 0; k < m.size; ++k) {
        const double dev = std::fabs(cur[k] - goal[g][k]) / std::max(goal[g][k], 1e-300);
        if (goal[g][k] > 0 || cur[k] > 0) worst = std::max(worst, std::min(dev, 1e300));
      }
      for (std::size_t c = 0; c < mu.size(); ++c) {
        const double cm = cur[m.index[c]];
        mu[c] = cm > 0 ? mu[c] * goal[g][m.index[c]] / cm : 0.0;
      }
    }
    if (worst < 1e-13) break;
  }
}

}  // namespace

FitResult fit_em(const NonresponseModel& model, const IncompleteTable& table, const FitOptions& opts) {
  if (!(opts.tol > 0) || !(opts.param_tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (opts.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  const auto design = build_design(model, table.schema());
  const auto& layout = design.layout;
  const auto y = layout.observed_counts(table);
  const double n = static_cast<double>(table.total());

  auto mu = initial_mu(design, n, opts);
  std::vector<double> trace;
  double prev = observed_loglik(layout, y, mu);
  if (opts.record_trace) trace.push_back(prev);
  std::vector<double> completed(mu.size()), step;
  double last_move = 0;
  bool converged = false;
  int it = 0;
  while (it < opts.max_iter) {
    ++it;
    // E-step: spread each observed count over its cells in proportion to mu
    const auto coll = layout.collapse(mu);
    for (std::size_t c = 0; c < mu.size(); ++c) {
      const auto o = layout.owner(c);
      completed[c] = coll[o] > 0 ? y[o] * mu[c] / coll[o] : 0.0;
    }
    step.assign(mu.begin(), mu.end());
    ipf(mu, completed, design.margins);
    double moved = 0;
    for (std::size_t c = 0; c < mu.size(); ++c) moved = std::max(moved, std::fabs(mu[c] - step[c]) / n);
    const double l = observed_loglik(layout, y, mu);
    if (opts.record_trace) trace.push_back(l);
    const double change = std::fabs(l - prev) / std::max(std::fabs(prev), 1e-300);
    prev = l;
    // remaining distance under linear convergence at the observed rate
    const double rate = last_move > 0 ? std::min(moved / last_move, 1 - 1e-12) : 1 - 1e-12;
    const double remaining = moved * rate / (1 - rate);
    last_move = moved;
    if (change < opts.tol && remaining < opts.param_tol) {
      converged = true;
      break;
    }
  }
  auto r = detail::finalize(model, table, design, std::move(mu), "em", opts);
  r.converged = converged;
  r.iterations = it;
  r.trace = std::move(trace);
  if (!converged) r.notes.push_back("EM stopped at max_iter without meeting the tolerance");
  return r;
}

}  // namespace misstab
