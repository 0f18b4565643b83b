#include "imela/problem.hpp"

#include <algorithm>
#include <limits>

namespace imela {

void ProblemInstance::validate() const {
  const Index n = set.dimension();
  if (!objective.valid() || objective.dimension() != n)
    throw ConfigError("instance: objective dimension does not match the set");
  for (const SmoothOracle& g : constraints)
    if (!g.valid() || g.dimension() != n)
      throw ConfigError("instance: constraint dimension does not match the set");
  if (!(constants.L > 0.0)) throw ConfigError("instance: L must be positive");
  if (constants.B_f < 0.0) throw ConfigError("instance: B_f must be non-negative");
  if (!(constants.D_X > 0.0)) throw ConfigError("instance: D_X must be positive");
  if (!constraints.empty()) {
    if (!(constants.B_g > 0.0)) throw ConfigError("instance: B_g must be positive when constraints exist");
    if (constants.x_feas.size() != n) throw ConfigError("instance: x_feas dimension mismatch");
    if (!set.contains(constants.x_feas)) throw ConfigError("instance: x_feas is not in the set");
    double worst = -std::numeric_limits<double>::infinity();
    for (const SmoothOracle& g : constraints) worst = std::max(worst, g.value(constants.x_feas));
    if (!(worst < 0.0)) throw ConfigError("instance: x_feas is not strictly feasible");
    if (!(constants.min_slack > 0.0) || constants.min_slack > -worst + 1e-12)
      throw ConfigError("instance: min_slack must satisfy 0 < min_slack <= min_i -g_i(x_feas)");
  }
}

Evaluation evaluate(const ProblemInstance& prob, const Vector& x, OracleCounter* counter) {
  const Index n = prob.dimension();
  const Index m = prob.num_constraints();
  if (x.size() != n) throw InputError("evaluate: dimension mismatch");

  Evaluation out;
  const OracleEval fe = prob.objective.eval(x);
  out.f_value = fe.value;
  out.f_gradient = fe.gradient;
  out.g_values.resize(m);
  out.g_jacobian.resize(m, n);
  for (Index i = 0; i < m; ++i) {
    const OracleEval ge = prob.constraints[static_cast<size_t>(i)].eval(x);
    out.g_values[i] = ge.value;
    out.g_jacobian.row(i) = ge.gradient.transpose();
  }
  if (counter) {
    counter->objective_gradients += 1;
    if (m > 0) counter->constraint_gradients += 1;
  }
  return out;
}

double convexity_probe(const SmoothOracle& fn, const Vector& x, const Vector& y) {
  if (x.size() != fn.dimension() || y.size() != fn.dimension())
    throw InputError("convexity_probe: dimension mismatch");
  const double mid = fn.value(0.5 * (x + y));
  return std::max(mid - 0.5 * (fn.value(x) + fn.value(y)), 0.0);
}

GradientMapping gradient_mapping(const SmoothOracle& F, const FeasibleSet& set, const Vector& u, double eta) {
  if (!(eta > 0.0)) throw InputError("gradient_mapping: eta must be positive");
  if (u.size() != set.dimension()) throw InputError("gradient_mapping: dimension mismatch");
  GradientMapping out;
  const OracleEval fe = F.eval(u);
  out.mapped = set.project(u - eta * fe.gradient);
  out.norm = (u - out.mapped).norm() / eta;
  return out;
}

}  // namespace imela
