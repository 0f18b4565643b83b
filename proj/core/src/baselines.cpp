#include "imela/baselines.hpp"

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

}  // namespace

RunResult ippp_run(const ProblemInstance& prob, const IPPPParams& params, OracleCounter& counter) {
  prob.validate();
  if (!(params.p > prob.constants.L)) throw ConfigError("ippp: need p > L");
  if (!(params.rho > 0.0)) throw ConfigError("ippp: rho must be positive");
  if (params.T < 1) throw ConfigError("ippp: T must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();

  Vector x = prob.set.project(params.x0.value_or(prob.constants.x_feas));
  RunResult out;
  out.trace.method = "ippp";
  out.trace.problem = prob.name;
  long long cum = 0;
  Vector lambda = Vector::Zero(prob.num_constraints());

  for (long long t = 0; t < params.T; ++t) {
    const double rho_t = params.rho * std::sqrt(static_cast<double>(t + 1));
    const double eps_t = 1.0 / (rho_t * static_cast<double>(t + 1));

    InnerProblem inner = build_penalty(prob, x, rho_t, params.p, &counter);
    inner.x0 = x;
    inner.eta = params.eta;
    long long cap = params.max_inner_steps;
    if (params.inner_step_budget) {
      const long long remaining = std::max<long long>(*params.inner_step_budget - cum, 1);
      cap = std::min(cap, remaining + 1000);
    }
    const InnerResult res = apg_solve(inner, eps_t / 3.0, cap, &counter);
    x = res.x;
    cum += res.steps;

    lambda = (rho_t * constraint_values(prob, x)).cwiseMax(0.0);
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
    out.max_lambda_norm = std::max(out.max_lambda_norm, lambda.norm());

    if (params.inner_step_budget && cum >= *params.inner_step_budget) break;
  }
  out.x = x;
  out.lambda = lambda;
  out.z = x;
  return out;
}

RunResult splm_run(const ProblemInstance& prob, const SPLMParams& params, OracleCounter& counter) {
  prob.validate();
  if (!(params.p > prob.constants.L)) throw ConfigError("splm: need p > L");
  if (!(params.eta > 0.0)) throw ConfigError("splm: eta must be positive");
  if (params.tau < 0.0) throw ConfigError("splm: tau must be non-negative");
  if (params.theta < 0.0 || params.theta > 1.0) throw ConfigError("splm: theta must lie in [0, 1]");
  if (params.T < 1) throw ConfigError("splm: T must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();

  const Index m = prob.num_constraints();
  Vector x = prob.set.project(params.x0.value_or(prob.constants.x_feas));
  Vector z = x;
  Vector lambda = Vector::Zero(m);

  RunResult out;
  out.trace.method = "splm";
  out.trace.problem = prob.name;

  for (long long t = 0; t < params.T; ++t) {
    if (m > 0) lambda = dual_step(lambda, constraint_values(prob, x), params.tau);
    out.max_lambda_norm = std::max(out.max_lambda_norm, lambda.norm());

    // One projected gradient step on the proximal Lagrangian at (x^t, z^t).
    const Evaluation ev = evaluate(prob, x, &counter);
    Vector grad = ev.f_gradient + params.p * (x - z);
    if (m > 0) grad += ev.g_jacobian.transpose() * lambda;
    x = prob.set.project(x - params.eta * grad);
    counter.projections += 1;
    z = z_step(z, x, params.theta);

    const KKTResiduals kkt = kkt_residuals(prob, x, lambda);
    TraceRow row;
    row.t = t;
    row.inner_steps = 1;
    row.cum_oracle = t + 1;
    row.obj = prob.objective.value(x);
    row.infeas = kkt.infeasibility;
    row.stat = kkt.stationarity;
    row.comp_slack = kkt.comp_slackness;
    row.lambda_norm = lambda.norm();
    row.wall_ms = ms_since(t0);
    out.trace.rows.push_back(std::move(row));
  }
  out.x = x;
  out.lambda = lambda;
  out.z = z;
  return out;
}

RunResult ssg_run(const ProblemInstance& prob, const SSGParams& params, OracleCounter& counter) {
  prob.validate();
  if (prob.num_constraints() == 0) throw ConfigError("ssg: needs at least one functional constraint");
  if (!(params.eps > 0.0) || !(params.eta > 0.0)) throw ConfigError("ssg: eps and eta must be positive");
  if (params.T < 1) throw ConfigError("ssg: T must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();

  Vector x = prob.set.project(params.x0.value_or(prob.constants.x_feas));
  RunResult out;
  out.trace.method = "ssg";
  out.trace.problem = prob.name;

  for (long long t = 0; t < params.T; ++t) {
    const bool dim = params.schedule == SSGParams::Schedule::Diminishing;
    const double scale = dim ? 1.0 / std::sqrt(static_cast<double>(t + 1)) : 1.0;
    const double eps_t = params.eps * scale;
    const double eta_t = params.eta * scale;

    const Vector g = constraint_values(prob, x);
    Index jmax = 0;
    for (Index i = 1; i < g.size(); ++i)
      if (g[i] > g[jmax]) jmax = i;  // strict comparison keeps the lowest index on ties
    const double g_max = g[jmax];

    TraceRow row;
    row.eps_t = eps_t;
    row.g_max = g_max;
    if (g_max <= eps_t) {
      row.branch = "obj";
      const OracleEval fe = prob.objective.eval(x);
      counter.objective_gradients += 1;
      x = prob.set.project(x - eta_t * fe.gradient);
    } else {
      row.branch = "con";
      const OracleEval ge = prob.constraints[static_cast<size_t>(jmax)].eval(x);
      counter.constraint_gradients += 1;
      x = prob.set.project(x - eta_t * ge.gradient);
    }
    counter.projections += 1;

    row.t = t;
    row.inner_steps = 1;
    row.cum_oracle = t + 1;
    row.obj = prob.objective.value(x);
    row.infeas = constraint_values(prob, x).cwiseMax(0.0).norm();
    row.lambda_norm = 0.0;
    row.wall_ms = ms_since(t0);
    out.trace.rows.push_back(std::move(row));
  }
  out.x = x;
  out.lambda = Vector::Zero(prob.num_constraints());
  out.z = x;
  return out;
}

}  // namespace imela
