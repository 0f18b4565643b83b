#include "imela/kkt.hpp"

#include <cmath>
#include <limits>

namespace imela {

KKTResiduals kkt_residuals(const ProblemInstance& prob, const Vector& x, const Vector& lambda,
                           double active_tol) {
  const Index m = prob.num_constraints();
  if (lambda.size() != m) throw InputError("kkt_residuals: multiplier dimension mismatch");
  if ((lambda.array() < 0.0).any()) throw InputError("kkt_residuals: multipliers must be non-negative");

  const Evaluation ev = evaluate(prob, x, nullptr);
  KKTResiduals res;
  Vector v = -ev.f_gradient;
  if (m > 0) v -= ev.g_jacobian.transpose() * lambda;
  res.stationarity = prob.set.normal_cone_distance(x, v, active_tol);
  res.infeasibility = ev.g_values.cwiseMax(0.0).norm();
  res.comp_slackness = m > 0 ? lambda.cwiseProduct(ev.g_values).cwiseAbs().sum() : 0.0;
  return res;
}

ActiveSets active_sets(const ProblemInstance& prob, const Vector& x, double tol) {
  if (x.size() != prob.dimension()) throw InputError("active_sets: dimension mismatch");
  ActiveSets out;
  for (Index i = 0; i < prob.num_constraints(); ++i)
    if (std::abs(prob.constraints[static_cast<size_t>(i)].value(x)) <= tol) out.constraints.push_back(i);

  if (prob.set.kind() == FeasibleSet::Kind::L1Ball) {
    out.l1_boundary = x.lpNorm<1>() >= prob.set.l1_radius() - tol;
    out.l1_signs.resize(static_cast<size_t>(x.size()));
    for (Index i = 0; i < x.size(); ++i)
      out.l1_signs[static_cast<size_t>(i)] = std::abs(x[i]) <= tol ? 0 : (x[i] > 0.0 ? 1 : -1);
  } else {
    out.set_rows = prob.set.active_rows(x, tol);
  }
  return out;
}

double subset_residual(const ProblemInstance& prob, const Vector& x, const std::vector<Index>& I_g,
                       const std::vector<Index>& I_A) {
  if (!prob.set.has_rows())
    throw InputError("subset_residual: set has no explicit row description");
  const Index m = prob.num_constraints();
  std::vector<bool> in_g(static_cast<size_t>(m), false);
  for (Index i : I_g) {
    if (i < 0 || i >= m) throw InputError("subset_residual: constraint index out of range");
    in_g[static_cast<size_t>(i)] = true;
  }
  const Matrix& A = prob.set.rows_A();
  std::vector<bool> in_a(static_cast<size_t>(A.rows()), false);
  for (Index j : I_A) {
    if (j < 0 || j >= A.rows()) throw InputError("subset_residual: row index out of range");
    in_a[static_cast<size_t>(j)] = true;
  }

  double total = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double gi = prob.constraints[static_cast<size_t>(i)].value(x);
    const double r = in_g[static_cast<size_t>(i)] ? gi : std::max(gi, 0.0);
    total += r * r;
  }
  const Vector slack = A * x - prob.set.rows_b();
  for (Index j = 0; j < A.rows(); ++j) {
    const double r = in_a[static_cast<size_t>(j)] ? slack[j] : std::max(slack[j], 0.0);
    total += r * r;
  }
  return total;
}

std::optional<ScoredIterate> best_iterate(const std::vector<MetricRow>& rows, BestIterateMode mode,
                                          double feasibility_slack) {
  std::optional<ScoredIterate> best;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const MetricRow& row = rows[r];
    double score = 0.0;
    if (mode == BestIterateMode::PrimalDual) {
      if (!row.stationarity || !row.comp_slackness) continue;
      score = *row.stationarity + row.infeasibility + *row.comp_slackness;
    } else {
      if (row.infeasibility > feasibility_slack) continue;
      score = row.objective;
    }
    if (!best || score < best->score) best = ScoredIterate{r, score};
  }
  return best;
}

}  // namespace imela
