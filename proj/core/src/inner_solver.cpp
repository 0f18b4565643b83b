#include "imela/inner_solver.hpp"

#include <cmath>

namespace imela {

InnerResult apg_solve(const InnerProblem& prob, double eps_prime, long long max_steps,
                      OracleCounter* counter) {
  if (prob.set == nullptr) throw ConfigError("apg_solve: missing feasible set");
  if (!(eps_prime > 0.0)) throw InputError("apg_solve: tolerance must be positive");
  if (prob.mu < 0.0 || prob.K_F <= 0.0 || prob.mu > prob.K_F)
    throw ConfigError("apg_solve: need 0 <= mu <= K_F, K_F > 0");
  const FeasibleSet& X = *prob.set;
  if (!X.contains(prob.x0)) throw InputError("apg_solve: warm start is not feasible");

  const double eta = prob.eta.value_or(1.0 / prob.K_F);
  if (!(eta > 0.0)) throw ConfigError("apg_solve: step must be positive");

  // Constant momentum for mu > 0; Nesterov's t_k sequence otherwise.
  const bool strongly_convex = prob.mu > 0.0;
  const double kappa_eff = std::max(1.0 / eta, prob.mu);
  const double beta_const =
      strongly_convex ? (std::sqrt(kappa_eff) - std::sqrt(prob.mu)) / (std::sqrt(kappa_eff) + std::sqrt(prob.mu))
                      : 0.0;

  Vector x = prob.x0;   // projected iterate
  Vector u = prob.x0;   // main (extrapolated) iterate; gradients are taken here
  double tk = 1.0;

  InnerResult out;
  for (long long k = 0;; ++k) {
    const OracleEval fe = prob.F.eval(u);
    const Vector mapped = X.project(u - eta * fe.gradient);
    if (counter) counter->projections += 1;
    out.steps = k + 1;
    const double gm = (u - mapped).norm() / eta;
    if (gm <= eps_prime || k + 1 >= max_steps) {
      out.x = mapped;
      out.pre_image = u;
      out.final_gm_norm = gm;
      out.budget_exhausted = gm > eps_prime;
      return out;
    }
    double beta = beta_const;
    if (!strongly_convex) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      beta = (tk - 1.0) / t_next;
      tk = t_next;
    }
    u = mapped + beta * (mapped - x);
    x = mapped;
  }
}

InnerProblem build_prox_lagrangian(const ProblemInstance& prob, const Vector& z, const Vector& lambda,
                                   double p, OracleCounter* counter) {
  const Index n = prob.dimension();
  const Index m = prob.num_constraints();
  if (z.size() != n) throw InputError("build_prox_lagrangian: center dimension mismatch");
  if (lambda.size() != m) throw InputError("build_prox_lagrangian: multiplier dimension mismatch");
  if ((lambda.array() < 0.0).any()) throw InputError("build_prox_lagrangian: multipliers must be non-negative");
  if (!(p > prob.constants.L)) throw ConfigError("build_prox_lagrangian: need p > L");

  InnerProblem inner;
  inner.set = &prob.set;
  inner.mu = p - prob.constants.L;
  inner.K_F = prob.constants.L * (1.0 + lambda.lpNorm<1>()) + p;
  inner.x0 = prob.set.some_point();
  // The oracle copies z and lambda; the instance and counter must outlive it.
  inner.F = SmoothOracle(n, [&prob, z, lambda, p, counter](const Vector& x, Vector& grad) -> double {
    const Evaluation ev = evaluate(prob, x, counter);
    const Vector diff = x - z;
    grad = ev.f_gradient + ev.g_jacobian.transpose() * lambda + p * diff;
    return ev.f_value + lambda.dot(ev.g_values) + 0.5 * p * diff.squaredNorm();
  });
  return inner;
}

InnerProblem build_penalty(const ProblemInstance& prob, const Vector& center, double rho, double p_t,
                           OracleCounter* counter) {
  const Index n = prob.dimension();
  if (center.size() != n) throw InputError("build_penalty: center dimension mismatch");
  if (!(rho >= 0.0)) throw InputError("build_penalty: rho must be non-negative");
  if (!(p_t > prob.constants.L)) throw ConfigError("build_penalty: need p_t > L");

  const double B_g = prob.constants.B_g;
  InnerProblem inner;
  inner.set = &prob.set;
  inner.mu = p_t - prob.constants.L;
  // grad of (rho/2)||[g]_+||^2 is rho J^T [g]_+, Lipschitz on X by
  // rho (B_g^2 + L B_g) since ||J|| <= B_g and ||[g]_+|| <= B_g.
  inner.K_F = prob.constants.L + rho * B_g * (B_g + prob.constants.L) + p_t;
  inner.x0 = prob.set.some_point();
  inner.F = SmoothOracle(n, [&prob, center, rho, p_t, counter](const Vector& u, Vector& grad) -> double {
    const Evaluation ev = evaluate(prob, u, counter);
    const Vector plus = ev.g_values.cwiseMax(0.0);
    const Vector diff = u - center;
    grad = ev.f_gradient + rho * (ev.g_jacobian.transpose() * plus) + p_t * diff;
    return ev.f_value + 0.5 * rho * plus.squaredNorm() + 0.5 * p_t * diff.squaredNorm();
  });
  return inner;
}

}  // namespace imela
