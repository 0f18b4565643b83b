#pragma once

#include "imela/problem.hpp"

namespace imela {

/// Strongly convex composite subproblem min_{x in X} F(x).
struct InnerProblem {
  SmoothOracle F;
  const FeasibleSet* set = nullptr;
  double mu = 0.0;   // strong convexity modulus (0 selects the non strongly convex scheme)
  double K_F = 0.0;  // smoothness constant of F
  Vector x0;         // warm start, must lie in the set
  std::optional<double> eta;  // step override; defaults to 1/K_F
};

struct InnerResult {
  Vector x;             // projected image of the final main iterate
  Vector pre_image;     // main iterate the stopping test was evaluated at
  long long steps = 0;  // gradient steps taken
  double final_gm_norm = 0.0;
  bool budget_exhausted = false;
};

/// Accelerated projected gradient with constant momentum
/// (sqrt(K_F) - sqrt(mu)) / (sqrt(K_F) + sqrt(mu)). Stops when the gradient
/// mapping norm at the current main iterate u^k drops to eps_prime and
/// returns x = project(u^k - eta grad F(u^k)). One gradient evaluation and
/// one projection per step.
InnerResult apg_solve(const InnerProblem& prob, double eps_prime, long long max_steps,
                      OracleCounter* counter = nullptr);

/// F(x) = f(x) + lambda^T g(x) + (p/2) ||x - z||^2 with mu = p - L and
/// K_F = L + L ||lambda||_1 + p. Each evaluation spends one objective and one
/// constraint unit on the counter. Requires p > L and lambda >= 0.
InnerProblem build_prox_lagrangian(const ProblemInstance& prob, const Vector& z, const Vector& lambda,
                                   double p, OracleCounter* counter = nullptr);

/// F(u) = f(u) + (rho/2) sum_i max(g_i(u), 0)^2 + (p_t/2) ||u - center||^2
/// with mu = p_t - L and K_F = L + rho B_g (B_g + L) + p_t. Same counting.
InnerProblem build_penalty(const ProblemInstance& prob, const Vector& center, double rho, double p_t,
                           OracleCounter* counter = nullptr);

}  // namespace imela
