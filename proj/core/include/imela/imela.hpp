#pragma once

#include <functional>

#include "imela/inner_solver.hpp"
#include "imela/trace.hpp"

namespace imela {

/// Method state at the start of an outer iteration.
struct IMELaState {
  Vector x;
  Vector z;
  Vector lambda;
};

struct IMELaParams {
  double p = 0.0;      // prox strength, must exceed L
  double tau = 0.0;    // dual ascent step, constant
  double theta = 0.5;  // averaging weight in [0, 1]
  double c = 1.0;      // inner tolerance schedule eps_t = max(c/(t+1), eps_floor)
  long long T = 1000;  // outer iteration budget
  double eps_floor = 1e-12;
  std::optional<double> eps_target;  // stop once combined_sq <= eps_target^2
  std::optional<double> eta;         // inner step override (tuned); default 1/K_F
  long long max_inner_steps = 1000000;
  std::optional<long long> inner_step_budget;  // stop after the iteration that crosses this
  std::optional<Vector> x0;                    // defaults to x_feas, projected
  std::function<void(long long, const IMELaState&)> on_iteration;  // called with (t, state at start of t)
};

/// tau = (p - L) / (4 B_g^2), theta = 0.5, c = 1, T = 1000. Throws
/// ConfigError when B_g = 0 (constrained instances need a positive bound) or
/// p <= L.
IMELaParams default_params(const ProblemConstants& constants, double p);

/// Multiplier norm bound for constant dual steps in [tau_lo, tau_hi]:
///   C = (B_f + p D_X + 1) D_X
///   max{ 2 tau_hi B_g, 2 tau_hi (C + tau_hi B_g^2) / (2 tau_lo min_slack) }
double m_lambda_bound(const ProblemConstants& constants, double tau_lo, double tau_hi, double p);

/// [lambda + tau g]_+ componentwise. lambda must be non-negative.
Vector dual_step(const Vector& lambda, const Vector& g_values, double tau);

/// z + theta (x_next - z). theta must lie in [0, 1].
Vector z_step(const Vector& z, const Vector& x_next, double theta);

struct RunResult {
  Vector x;
  Vector lambda;
  Vector z;
  SolverTrace trace;
  double max_lambda_norm = 0.0;
  bool hit_eps_target = false;
};

/// Inexact Moreau envelope Lagrangian loop: dual ascent step, accelerated
/// inner solve of the proximal Lagrangian to eps_t / 3 gradient mapping
/// accuracy (warm started at the previous iterate), averaging step on z.
/// Residuals recorded at x^{t+1} use the multiplier that produced it.
RunResult imela_run(const ProblemInstance& prob, const IMELaParams& params, OracleCounter& counter);

struct PotentialEstimate {
  double value = 0.0;
  bool reliable = true;  // false when an inner solve hit its step budget
  double v_gap = 0.0;    // upper minus lower bound bracket on the value term
};

/// Diagnostic estimate of the merit function
///   L_p(x, z, lambda) - 2 d(lambda, z) + 2 v(z)
/// where d is the partial minimum of the proximal Lagrangian over the set
/// and v the proximal value over the feasible region. d is solved to tol by
/// the accelerated method; v through a quadratic penalty path (rho = 1e6)
/// with a feasibility refined upper bracket.
PotentialEstimate potential(const ProblemInstance& prob, const IMELaState& state, const IMELaParams& params,
                            double tol = 1e-9);

}  // namespace imela
