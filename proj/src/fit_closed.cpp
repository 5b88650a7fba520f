#include <cmath>

#include "misstab/fit.hpp"

namespace misstab {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ClosedForm unavailable(std::string reason, bool boundary = false) {
  return {std::nullopt, boundary, std::move(reason)};
}

bool positive(const MatrixXd& m) {
  return (m.array() > 0).all() && m.allFinite();
}

// Factor applied to the first-stratum cells when one indicator switches to
// missing, matched to the supplemental margin `target`. `along_rows` says
// the margin runs over the rows (i) of mu11 rather than the columns (j).
std::optional<MatrixXd> indicator_factor(const MatrixXd& mu11, const VectorXd& target, bool along_rows,
                                         MechanismKind kind) {
  const auto rows = mu11.rows(), cols = mu11.cols();
  MatrixXd f(rows, cols);
  switch (kind) {
    case MechanismKind::kMcar:
      f.setConstant(target.sum() / mu11.sum());
      return f;
    case MechanismKind::kMar: {
      // depends on the variable the margin is indexed by
      if (along_rows) {
        for (Eigen::Index i = 0; i < rows; ++i) f.row(i).setConstant(target(i) / mu11.row(i).sum());
      } else {
        for (Eigen::Index j = 0; j < cols; ++j) f.col(j).setConstant(target(j) / mu11.col(j).sum());
      }
      return f;
    }
    case MechanismKind::kNmar: {
      // factor indexed by the unobserved variable; one equation per margin cell
      const MatrixXd a = along_rows ? mu11 : MatrixXd(mu11.transpose());
      if (a.rows() != a.cols()) return std::nullopt;
      Eigen::FullPivLU<MatrixXd> lu(a);
      if (!lu.isInvertible()) return std::nullopt;
      const VectorXd x = lu.solve(target);
      if (along_rows) {
        for (Eigen::Index j = 0; j < cols; ++j) f.col(j).setConstant(x(j));
      } else {
        for (Eigen::Index i = 0; i < rows; ++i) f.row(i).setConstant(x(i));
      }
      return f;
    }
  }
  return std::nullopt;
}

ClosedForm two_way(const NonresponseModel& model, const IncompleteTable& table, const FitOptions& opts) {
  const auto& schema = table.schema();
  const int I = schema.levels(0), J = schema.levels(1);
  const auto k1 = model.mechanisms[0].kind, k2 = model.mechanisms[1].kind;
  MatrixXd y(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j) y(i, j) = static_cast<double>(table.full().counts()[static_cast<std::size_t>(i * J + j)]);
  VectorXd y1miss(J), y2miss(I);
  for (int j = 0; j < J; ++j) y1miss(j) = static_cast<double>(table.without(0).counts()[static_cast<std::size_t>(j)]);
  for (int i = 0; i < I; ++i) y2miss(i) = static_cast<double>(table.without(1).counts()[static_cast<std::size_t>(i)]);
  const double y22 = static_cast<double>(table.stratum(0).counts()[0]);

  MatrixXd mu11(I, J);
  const bool perfect = k1 != MechanismKind::kMcar && k2 != MechanismKind::kMcar;
  if (perfect) {
    mu11 = y;
  } else if (k1 == MechanismKind::kNmar && k2 == MechanismKind::kMcar) {
    const VectorXd row11 = y.rowwise().sum();
    const VectorXd row1p = row11 + y2miss;
    const double tot11 = y.sum(), tot1p = tot11 + y2miss.sum();
    if ((row11.array() <= 0).any() || tot1p <= 0) return unavailable("zero margin in the formula", true);
    for (int i = 0; i < I; ++i) mu11.row(i) = y.row(i) * row1p(i) * tot11 / (row11(i) * tot1p);
  } else if (k1 == MechanismKind::kMcar && k2 == MechanismKind::kNmar) {
    const VectorXd col11 = y.colwise().sum().transpose();
    const VectorXd colp1 = col11 + y1miss;
    const double tot11 = y.sum(), totp1 = tot11 + y1miss.sum();
    if ((col11.array() <= 0).any() || totp1 <= 0) return unavailable("zero margin in the formula", true);
    for (int j = 0; j < J; ++j) mu11.col(j) = y.col(j) * colp1(j) * tot11 / (col11(j) * totp1);
  } else {
    return unavailable("no closed form for this model");
  }
  if ((mu11.rowwise().sum().array() <= 0).any() || (mu11.colwise().sum().array() <= 0).any())
    return unavailable("zero margin in the first stratum", true);

  // R1 switches Y1 to unobserved: margin over j. R2 hides Y2: margin over i.
  auto a = indicator_factor(mu11, y1miss, false, k1);
  auto b = indicator_factor(mu11, y2miss, true, k2);
  if (!a || !b) return unavailable("NMAR factor needs a square, non-singular system");
  const double base22 = (mu11.array() * a->array() * b->array()).sum();
  const double e = y22 / base22;
  if (!positive(*a) || !positive(*b) || !(e > 0) || !std::isfinite(e))
    return unavailable("solution on the boundary", true);

  const auto design = build_design(model, schema);
  std::vector<double> mu(design.layout.cell_count());
  for (std::size_t c = 0; c < mu.size(); ++c) {
    const auto lv = design.layout.levels(c);
    const int i = lv[0], j = lv[1], r = lv[2], s = lv[3];
    double v = mu11(i, j);
    if (r) v *= (*a)(i, j);
    if (s) v *= (*b)(i, j);
    if (r && s) v *= e;
    mu[c] = v;
  }
  ClosedForm out;
  out.fit = detail::finalize(model, table, design, std::move(mu), "closed-form", opts);
  out.fit->converged = true;
  return out;
}

ClosedForm one_missing(const NonresponseModel& model, const IncompleteTable& table, const FitOptions& opts) {
  const auto& schema = table.schema();
  const auto& mech = model.mechanisms[0];
  if (mech.kind == MechanismKind::kNmar) return unavailable("no closed form for this model");
  if (model.association != YAssociation::kSaturated)
    return unavailable("closed form needs the saturated association among Y");
  const auto m = schema.missing()[0];
  std::vector<std::size_t> others;
  for (std::size_t v = 0; v < schema.size(); ++v)
    if (v != m) others.push_back(v);
  const int L1 = schema.levels(others[0]), L2 = schema.levels(others[1]);
  const auto& full = table.full();
  const auto& supp = table.without(m);

  // margins over the two always-observed variables
  std::vector<double> fsum(static_cast<std::size_t>(L1 * L2), 0.0), ssum(fsum.size(), 0.0);
  std::vector<int> lv(3);
  for (std::size_t c = 0; c < full.cell_count(); ++c) {
    std::size_t rest = c;
    for (std::size_t a = 3; a-- > 0;) {
      lv[a] = static_cast<int>(rest % static_cast<std::size_t>(schema.levels(a)));
      rest /= static_cast<std::size_t>(schema.levels(a));
    }
    fsum[static_cast<std::size_t>(lv[others[0]] * L2 + lv[others[1]])] += static_cast<double>(full.counts()[c]);
  }
  for (std::size_t c = 0; c < supp.cell_count(); ++c) ssum[c] = static_cast<double>(supp.counts()[c]);
  for (double f : fsum)
    if (f <= 0) return unavailable("zero margin in the first stratum", true);

  // q = P(R = missing | level of the dependency)
  std::vector<double> q;
  if (mech.kind == MechanismKind::kMcar) {
    double s = 0;
    for (double v : ssum) s += v;
    q.assign(1, s / static_cast<double>(table.total()));
  } else {
    const bool first = mech.depends_on == others[0];
    const int L = first ? L1 : L2;
    q.assign(static_cast<std::size_t>(L), 0.0);
    std::vector<double> tot(q.size(), 0.0);
    for (int u = 0; u < L1; ++u)
      for (int w = 0; w < L2; ++w) {
        const auto k = static_cast<std::size_t>(first ? u : w);
        const auto idx = static_cast<std::size_t>(u * L2 + w);
        q[k] += ssum[idx];
        tot[k] += ssum[idx] + fsum[idx];
      }
    for (std::size_t k = 0; k < q.size(); ++k) q[k] /= tot[k];
  }
  for (double v : q)
    if (!(v > 0 && v < 1)) return unavailable("solution on the boundary", true);

  const auto design = build_design(model, schema);
  std::vector<double> mu(design.layout.cell_count());
  for (std::size_t c = 0; c < mu.size(); ++c) {
    const auto l = design.layout.levels(c);
    const auto idx = static_cast<std::size_t>(l[others[0]] * L2 + l[others[1]]);
    const std::size_t fidx = static_cast<std::size_t>((l[0] * schema.levels(1) + l[1]) * schema.levels(2) + l[2]);
    const double qq = mech.kind == MechanismKind::kMcar
                          ? q[0]
                          : q[static_cast<std::size_t>(l[mech.depends_on])];
    const double cond = static_cast<double>(full.counts()[fidx]) / fsum[idx];
    mu[c] = (fsum[idx] + ssum[idx]) * cond * (l[3] ? qq : 1 - qq);
  }
  ClosedForm out;
  out.fit = detail::finalize(model, table, design, std::move(mu), "closed-form", opts);
  out.fit->converged = true;
  return out;
}

}  // namespace

ClosedForm fit_closed_form(const NonresponseModel& model, const IncompleteTable& table, const FitOptions& opts) {
  switch (table.schema().shape()) {
    case Shape::kTwoWayBothMissing: return two_way(model, table, opts);
    case Shape::kThreeWayOneMissing: return one_missing(model, table, opts);
    case Shape::kThreeWayTwoMissing: return unavailable("no closed form for this model");
    case Shape::kUnsupported: break;
  }
  throw ShapeError("unsupported table shape");
}

}  // namespace misstab
