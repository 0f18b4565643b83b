#pragma once

#include "imela/imela.hpp"

namespace imela {

/// Inexact proximal point penalty method. Iteration t solves
///   min_{u in X} f(u) + (rho_t/2) ||max(g(u), 0)||^2 + (p/2) ||u - x^t||^2
/// with rho_t = rho sqrt(t+1) to the gradient mapping tolerance derived from
/// eps_t = 1 / (rho_t (t+1)). Multipliers are reconstructed for reporting as
/// rho_t max(g(x^{t+1}), 0).
struct IPPPParams {
  double rho = 500.0;
  double p = 0.0;  // constant prox strength, must exceed L
  long long T = 1000;
  std::optional<double> eta;
  long long max_inner_steps = 1000000;
  std::optional<long long> inner_step_budget;
  std::optional<Vector> x0;
};

RunResult ippp_run(const ProblemInstance& prob, const IPPPParams& params, OracleCounter& counter);

/// Single-loop proximal Lagrangian variant: one dual ascent step followed by
/// one projected gradient step on the proximal Lagrangian and the averaging
/// update on z. One gradient unit per iteration.
struct SPLMParams {
  double tau = 0.0;
  double eta = 0.0;    // primal step, required positive
  double theta = 0.5;
  double p = 0.0;      // must exceed L
  long long T = 1000;
  std::optional<Vector> x0;
};

RunResult splm_run(const ProblemInstance& prob, const SPLMParams& params, OracleCounter& counter);

/// Switching subgradient method. If max_i g_i(x^t) <= eps_t the iteration
/// steps along grad f, otherwise along grad g_j for the smallest maximizing
/// index j. Static schedules keep (eps, eta) fixed; diminishing schedules use
/// eps_t = E1 / sqrt(t+1), eta_t = E2 / sqrt(t+1). Stationarity and
/// complementarity columns stay empty; the branch and the threshold that
/// drove each decision are recorded.
struct SSGParams {
  enum class Schedule { Static, Diminishing };
  Schedule schedule = Schedule::Static;
  double eps = 1e-6;  // threshold (Static) or E1 (Diminishing)
  double eta = 1e-3;  // step (Static) or E2 (Diminishing)
  long long T = 1000;
  std::optional<Vector> x0;
};

RunResult ssg_run(const ProblemInstance& prob, const SSGParams& params, OracleCounter& counter);

}  // namespace imela
