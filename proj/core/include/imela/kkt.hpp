#pragma once

#include <optional>

#include "imela/problem.hpp"

namespace imela {

/// Approximate KKT residuals at (x, lambda):
///   stationarity       dist(-grad f - Jg^T lambda, N_X(x))
///   infeasibility      || max(g, 0) ||_2
///   comp_slackness     sum_i |lambda_i g_i(x)|
struct KKTResiduals {
  double stationarity = 0.0;
  double infeasibility = 0.0;
  double comp_slackness = 0.0;

  double combined_sq() const {
    return stationarity * stationarity + infeasibility * infeasibility + comp_slackness * comp_slackness;
  }
  double linear_sum() const { return stationarity + infeasibility + comp_slackness; }
};

/// Evaluates the residuals. x must lie in the set (up to active_tol); lambda
/// must be non-negative with size m. Does not touch oracle counters.
KKTResiduals kkt_residuals(const ProblemInstance& prob, const Vector& x, const Vector& lambda,
                           double active_tol = kActiveTol);

/// Constraints and set rows active at x within tol. For an l1 ball the set
/// facet is described by the support sign pattern instead of rows.
struct ActiveSets {
  std::vector<Index> constraints;   // i with |g_i(x)| <= tol
  std::vector<Index> set_rows;      // rows j of A x <= b with |a_j x - b_j| <= tol
  std::vector<int> l1_signs;        // L1Ball only: sign(x_i) with 0 for |x_i| <= tol
  bool l1_boundary = false;         // L1Ball only: ||x||_1 >= r - tol
};

ActiveSets active_sets(const ProblemInstance& prob, const Vector& x, double tol = kActiveTol);

/// Squared residual of the active-set system
///   sum_{i in I_g} g_i(x)^2 + sum_{i not in I_g} max(g_i(x), 0)^2
/// + sum_{j in I_A} (a_j x - b_j)^2 + sum_{j not in I_A} max(a_j x - b_j, 0)^2
/// Requires an explicit row description (Box or Polytope sets).
double subset_residual(const ProblemInstance& prob, const Vector& x, const std::vector<Index>& I_g,
                       const std::vector<Index>& I_A);

enum class BestIterateMode {
  PrimalDual,        // argmin of stationarity + infeasibility + comp_slackness
  FeasibleObjective  // argmin objective among rows with infeasibility <= slack
};

struct ScoredIterate {
  std::size_t row = 0;
  double score = 0.0;
};

/// Selects the reported iterate from per-iteration metric rows. Rows with
/// missing stationarity are skipped in PrimalDual mode. Returns nullopt when
/// no row qualifies.
struct MetricRow {
  double objective = 0.0;
  double infeasibility = 0.0;
  std::optional<double> stationarity;
  std::optional<double> comp_slackness;
};

std::optional<ScoredIterate> best_iterate(const std::vector<MetricRow>& rows, BestIterateMode mode,
                                          double feasibility_slack = 0.0);

}  // namespace imela
