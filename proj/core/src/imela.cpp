#include "imela/imela.hpp"

#include <chrono>
#include <cmath>

namespace imela {
namespace {

double ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Vector constraint_values(const ProblemInstance& prob, const Vector& x) {
  Vector g(prob.num_constraints());
  for (Index i = 0; i < prob.num_constraints(); ++i)
    g[i] = prob.constraints[static_cast<size_t>(i)].value(x);
  return g;
}

void check_common(const ProblemInstance& prob, double p) {
  prob.validate();
  if (!(p > prob.constants.L)) throw ConfigError("imela: need p > L");
}

}  // namespace

IMELaParams default_params(const ProblemConstants& constants, double p) {
  if (!(p > constants.L)) throw ConfigError("default_params: need p > L");
  IMELaParams out;
  out.p = p;
  if (constants.B_g > 0.0) {
    out.tau = (p - constants.L) / (4.0 * constants.B_g * constants.B_g);
  } else {
    out.tau = 0.0;  // no constraints: the dual step is inert
  }
  out.theta = 0.5;
  out.c = 1.0;
  out.T = 1000;
  return out;
}

double m_lambda_bound(const ProblemConstants& constants, double tau_lo, double tau_hi, double p) {
  if (!(tau_lo > 0.0) || tau_hi < tau_lo) throw ConfigError("m_lambda_bound: need 0 < tau_lo <= tau_hi");
  if (!(constants.min_slack > 0.0)) throw ConfigError("m_lambda_bound: need min_slack > 0");
  if (!(constants.D_X > 0.0)) throw ConfigError("m_lambda_bound: need D_X > 0");
  const double C = (constants.B_f + p * constants.D_X + 1.0) * constants.D_X;
  const double grow = 2.0 * tau_hi * constants.B_g;
  const double cap = 2.0 * tau_hi * (C + tau_hi * constants.B_g * constants.B_g) /
                     (2.0 * tau_lo * constants.min_slack);
  return std::max(grow, cap);
}

Vector dual_step(const Vector& lambda, const Vector& g_values, double tau) {
  if (lambda.size() != g_values.size()) throw InputError("dual_step: dimension mismatch");
  if ((lambda.array() < 0.0).any()) throw InputError("dual_step: multipliers must be non-negative");
  if (tau < 0.0) throw InputError("dual_step: tau must be non-negative");
  return (lambda + tau * g_values).cwiseMax(0.0);
}

Vector z_step(const Vector& z, const Vector& x_next, double theta) {
  if (z.size() != x_next.size()) throw InputError("z_step: dimension mismatch");
  if (theta < 0.0 || theta > 1.0) throw InputError("z_step: theta must lie in [0, 1]");
  return z + theta * (x_next - z);
}

RunResult imela_run(const ProblemInstance& prob, const IMELaParams& params, OracleCounter& counter) {
  check_common(prob, params.p);
  if (params.theta < 0.0 || params.theta > 1.0) throw ConfigError("imela: theta must lie in [0, 1]");
  if (params.tau < 0.0) throw ConfigError("imela: tau must be non-negative");
  if (!(params.c > 0.0)) throw ConfigError("imela: c must be positive");
  if (params.T < 1) throw ConfigError("imela: T must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();

  const Index m = prob.num_constraints();
  Vector x = prob.set.project(params.x0.value_or(prob.constants.x_feas));
  Vector z = x;
  Vector lambda = Vector::Zero(m);

  RunResult out;
  out.trace.method = "imela";
  out.trace.problem = prob.name;
  long long cum = 0;

  for (long long t = 0; t < params.T; ++t) {
    if (params.on_iteration) params.on_iteration(t, IMELaState{x, z, lambda});
    const double eps_t = std::max(params.c / static_cast<double>(t + 1), params.eps_floor);

    if (m > 0) lambda = dual_step(lambda, constraint_values(prob, x), params.tau);
    out.max_lambda_norm = std::max(out.max_lambda_norm, lambda.norm());

    InnerProblem inner = build_prox_lagrangian(prob, z, lambda, params.p, &counter);
    inner.x0 = x;  // warm start at the previous iterate
    inner.eta = params.eta;
    long long cap = params.max_inner_steps;
    if (params.inner_step_budget) {
      const long long remaining = std::max<long long>(*params.inner_step_budget - cum, 1);
      cap = std::min(cap, remaining + 1000);
    }
    const InnerResult res = apg_solve(inner, eps_t / 3.0, cap, &counter);
    x = res.x;
    cum += res.steps;
    z = z_step(z, x, params.theta);

    const KKTResiduals kkt = kkt_residuals(prob, x, lambda);
    TraceRow row;
    row.t = t;
    row.inner_steps = res.steps;
    row.cum_oracle = cum;
    row.obj = prob.objective.value(x);
    row.infeas = kkt.infeasibility;
    row.stat = kkt.stationarity;
    row.comp_slack = kkt.comp_slackness;
    row.lambda_norm = lambda.norm();
    row.wall_ms = ms_since(t0);
    row.budget_exhausted = res.budget_exhausted;
    row.eps_t = eps_t;
    out.trace.rows.push_back(std::move(row));

    if (params.eps_target && kkt.combined_sq() <= (*params.eps_target) * (*params.eps_target)) {
      out.hit_eps_target = true;
      break;
    }
    if (params.inner_step_budget && cum >= *params.inner_step_budget) break;
  }

  out.x = x;
  out.lambda = lambda;
  out.z = z;
  return out;
}

PotentialEstimate potential(const ProblemInstance& prob, const IMELaState& state, const IMELaParams& params,
                            double tol) {
  check_common(prob, params.p);
  if (!(tol > 0.0)) throw InputError("potential: tol must be positive");
  const double p = params.p;
  const double mu = p - prob.constants.L;
  PotentialEstimate out;

  // Exact proximal Lagrangian value at the state.
  const Evaluation ev = evaluate(prob, state.x, nullptr);
  const double lag = ev.f_value + (state.lambda.size() > 0 ? state.lambda.dot(ev.g_values) : 0.0) +
                     0.5 * p * (state.x - state.z).squaredNorm();

  // d(lambda, z): strongly convex, solved to a value gap of tol/2.
  InnerProblem dual_prob = build_prox_lagrangian(prob, state.z, state.lambda, p, nullptr);
  dual_prob.x0 = prob.set.project(state.x);
  const double gm_d = std::sqrt(mu * tol / 4.0);
  const InnerResult d_res = apg_solve(dual_prob, gm_d, 4000000, nullptr);
  out.reliable = out.reliable && !d_res.budget_exhausted;
  const double d_val = dual_prob.F.value(d_res.x);

  // v(z) through a quadratic penalty path; the penalty optimum lower-bounds
  // the constrained value, a feasibility refined point upper-bounds it.
  const double rho = 1e6;
  InnerProblem pen_prob = build_penalty(prob, state.z, rho, p, nullptr);
  pen_prob.x0 = prob.set.project(prob.constants.x_feas);
  const double gm_v = std::sqrt(mu * tol / 4.0);
  const InnerResult v_res = apg_solve(pen_prob, gm_v, 4000000, nullptr);
  out.reliable = out.reliable && !v_res.budget_exhausted;
  const double v_lower = pen_prob.F.value(v_res.x);

  auto plain_value = [&](const Vector& pt) {
    return prob.objective.value(pt) + 0.5 * p * (pt - state.z).squaredNorm();
  };
  double v_upper;
  Vector x_pen = v_res.x;
  const Vector g_pen = constraint_values(prob, x_pen);
  if (prob.num_constraints() == 0 || g_pen.maxCoeff() <= 0.0) {
    v_upper = plain_value(x_pen);
  } else {
    // Smallest s with g(x_pen + s (x_feas - x_pen)) <= 0; the per-constraint
    // sublevel sets along the segment are intervals ending at s = 1.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Vector pt = x_pen + mid * (prob.constants.x_feas - x_pen);
      if (constraint_values(prob, pt).maxCoeff() <= 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    v_upper = plain_value(x_pen + hi * (prob.constants.x_feas - x_pen));
  }
  out.v_gap = v_upper - v_lower;
  out.value = lag - 2.0 * d_val + 2.0 * v_lower;
  return out;
}

}  // namespace imela
