#include <doctest.h>

#include "imela/inner_solver.hpp"
#include "imela/test_problems.hpp"
#include "support/oracles.hpp"

using namespace imela;

namespace {
Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }
}  // namespace

TEST_SUITE("inner_solver") {
  TEST_CASE("prox of a quadratic with interior optimum") {
    InnerProblem prob;
    prob.F = SmoothOracle(2, [](const Vector& u, Vector& grad) {
      grad = u - vec2(0.2, 0.1);
      return 0.5 * (u - vec2(0.2, 0.1)).squaredNorm();
    });
    auto set = FeasibleSet::box(Vector::Zero(2), Vector::Constant(2, 1.0));
    prob.set = &set;
    prob.mu = 1.0;
    prob.K_F = 1.0;
    prob.x0 = vec2(1, 1);
    auto res = apg_solve(prob, 1e-8, 100000);
    CHECK((res.x - vec2(0.2, 0.1)).norm() <= 1e-8);
    CHECK(res.final_gm_norm <= 1e-8);
    CHECK_FALSE(res.budget_exhausted);
    CHECK(res.steps < 100);
  }

  TEST_CASE("constrained quadratic lands on the boundary optimum") {
    InnerProblem prob;
    prob.F = SmoothOracle(2, [](const Vector& u, Vector& grad) {
      grad = vec2(u[0] + 1.0, u[1]);
      return 0.5 * (u[0] + 1.0) * (u[0] + 1.0) + 0.5 * u[1] * u[1];
    });
    auto set = FeasibleSet::box(vec2(0, -1), vec2(1, 1));
    prob.set = &set;
    prob.mu = 1.0;
    prob.K_F = 1.0;
    prob.x0 = vec2(1, 0);
    auto res = apg_solve(prob, 1e-10, 100000);
    // cross-checked against exhaustive grid search at resolution 1e-3
    Vector grid = testsupport::grid_argmin(prob.F, set.box_lower(), set.box_upper(), 1e-3);
    CHECK((res.x - vec2(0, 0)).norm() <= 1e-9);
    CHECK((grid - vec2(0, 0)).norm() <= 1e-9);
  }

  TEST_CASE("step count obeys the accelerated complexity bound") {
    // steps <= ceil(sqrt(K_F/mu) ln(C/eps')) + 10 with C = K_F D_X^2
    auto set = FeasibleSet::box(Vector::Constant(2, -2.0), Vector::Constant(2, 2.0));
    Vector diag(2);
    diag << 1.0, 40.0;
    InnerProblem prob;
    prob.F = testsupport::diag_quadratic(diag, vec2(0.5, -3.0));
    prob.set = &set;
    prob.mu = 1.0;
    prob.K_F = 40.0;
    prob.x0 = vec2(2, 2);
    const double D = set.bounding_box_diameter();
    for (double eps : {1e-4, 1e-6, 1e-8}) {
      auto res = apg_solve(prob, eps, 1000000);
      CHECK_FALSE(res.budget_exhausted);
      const double bound = std::ceil(std::sqrt(prob.K_F / prob.mu) * std::log(prob.K_F * D * D / eps)) + 10.0;
      CHECK(static_cast<double>(res.steps) <= bound);
    }
  }

  TEST_CASE("tolerance certificate holds at the returned pre-image") {
    auto set = FeasibleSet::l1_ball(3, 1.0);
    Vector diag(3);
    diag << 2.0, 5.0, 9.0;
    InnerProblem prob;
    prob.F = testsupport::diag_quadratic(diag, (Vector(3) << 1, -2, 3).finished());
    prob.set = &set;
    prob.mu = 2.0;
    prob.K_F = 9.0;
    prob.x0 = Vector::Zero(3);
    auto res = apg_solve(prob, 1e-7, 100000);
    const double eta = 1.0 / prob.K_F;
    auto gm = gradient_mapping(prob.F, set, res.pre_image, eta);
    CHECK(gm.norm <= 1e-7);
    CHECK((gm.mapped - res.x).norm() <= 1e-14);
    CHECK(set.contains(res.x, 1e-12));
  }

  TEST_CASE("budget exhaustion is reported honestly") {
    auto set = FeasibleSet::box(Vector::Constant(2, -5.0), Vector::Constant(2, 5.0));
    Vector diag(2);
    diag << 1.0, 1000.0;
    InnerProblem prob;
    prob.F = testsupport::diag_quadratic(diag, vec2(3, 3));
    prob.set = &set;
    prob.mu = 1.0;
    prob.K_F = 1000.0;
    prob.x0 = vec2(5, 5);
    auto res = apg_solve(prob, 1e-12, 5);
    CHECK(res.budget_exhausted);
    CHECK(res.steps == 5);
    CHECK(res.final_gm_norm > 1e-12);
  }

  TEST_CASE("oracle counting: one gradient and one projection per step") {
    auto set = FeasibleSet::box(Vector::Zero(2), Vector::Constant(2, 1.0));
    InnerProblem prob;
    prob.F = SmoothOracle(2, [](const Vector& u, Vector& grad) {
      grad = u;
      return 0.5 * u.squaredNorm();
    });
    prob.set = &set;
    prob.mu = 1.0;
    prob.K_F = 1.0;
    prob.x0 = vec2(1, 1);
    OracleCounter counter;
    auto res = apg_solve(prob, 1e-9, 1000, &counter);
    CHECK(counter.projections == res.steps);
  }

  TEST_CASE("prox lagrangian matches the hand value on the counterexample") {
    auto inst = counterexample();
    Vector lambda(1);
    lambda << 1.0;
    auto sub = build_prox_lagrangian(inst.problem, Vector::Zero(2), lambda, 5.0);
    CHECK(sub.F.value(vec2(1, 1)) == doctest::Approx(9.0));
  }

  TEST_CASE("prox lagrangian reduces to f with zero multiplier at the center") {
    auto inst = counterexample();
    Vector x = vec2(0.4, -0.2);
    auto sub = build_prox_lagrangian(inst.problem, x, Vector::Zero(1), 5.0);
    auto fe = sub.F.eval(x);
    auto ref = inst.problem.objective.eval(x);
    CHECK(fe.value == doctest::Approx(ref.value));
    CHECK((fe.gradient - ref.gradient).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("prox lagrangian gradient passes finite differences") {
    auto inst = convex_active();
    Rng rng(41);
    Vector lambda(1);
    lambda << 0.7;
    Vector z = vec2(0.3, 0.8);
    auto sub = build_prox_lagrangian(inst.problem, z, lambda, 3.0);
    for (int rep = 0; rep < 20; ++rep) {
      Vector x = rng.uniform_vector(2, 0.0, 1.0);
      CHECK(testsupport::rel_err(sub.F.eval(x).gradient, testsupport::fd_gradient(sub.F, x)) <= 1e-5);
    }
  }

  TEST_CASE("penalty term vanishes on the feasible side") {
    auto inst = counterexample();
    Vector center = vec2(0.5, 0.0);
    const double p_t = 3.0;
    auto sub = build_penalty(inst.problem, center, 100.0, p_t);
    Vector x = vec2(0.5, 0.2);  // g = -0.5 < 0: hinge inactive
    auto fe = sub.F.eval(x);
    auto ref = inst.problem.objective.eval(x);
    CHECK(fe.value == doctest::Approx(ref.value + 0.5 * p_t * (x - center).squaredNorm()));
    CHECK((fe.gradient - (ref.gradient + p_t * (x - center))).norm() <= 1e-14);
  }

  TEST_CASE("penalty hand check on an infeasible point") {
    // Variant of the counterexample on the box [-1,1]^2 so that g = -x_1 can
    // be violated: at u = (-0.5, 0), penalty = (rho/2) 0.25 and its gradient
    // is rho * 0.5 * (-1, 0).
    ProblemInstance prob;
    prob.name = "variant";
    prob.set = FeasibleSet::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
    prob.objective = SmoothOracle(2, [](const Vector& x, Vector& grad) {
      grad = vec2(2.0 * (x[0] + 1.0), 2.0 * x[1]);
      return (x[0] + 1.0) * (x[0] + 1.0) + x[1] * x[1];
    });
    prob.constraints.push_back(SmoothOracle(2, [](const Vector& x, Vector& grad) {
      grad = vec2(-1, 0);
      return -x[0];
    }));
    prob.constants.L = 2.0;
    prob.constants.B_f = 5.0;
    prob.constants.B_g = 1.0;
    prob.constants.D_X = std::sqrt(8.0);
    prob.constants.x_feas = vec2(1, 0);
    prob.constants.min_slack = 1.0;
    prob.validate();

    const double rho = 100.0, p_t = 3.0;
    Vector u = vec2(-0.5, 0.0), center = vec2(-0.5, 0.0);
    auto sub = build_penalty(prob, center, rho, p_t);
    auto fe = sub.F.eval(u);
    const double f_val = 0.25;  // (u_1 + 1)^2
    CHECK(fe.value == doctest::Approx(f_val + 0.5 * rho * 0.25));
    Vector expect = vec2(2.0 * 0.5, 0.0) + rho * 0.5 * vec2(-1, 0);
    CHECK((fe.gradient - expect).norm() <= 1e-12);
  }

  TEST_CASE("penalty gradient passes finite differences away from the hinge") {
    auto inst = convex_active();
    Rng rng(43);
    auto sub = build_penalty(inst.problem, vec2(0.5, 0.5), 50.0, 3.0);
    int checked = 0;
    while (checked < 20) {
      Vector x = rng.uniform_vector(2, 0.0, 1.0);
      if (std::abs(inst.problem.constraints[0].value(x)) < 1e-2) continue;  // skip the kink
      CHECK(testsupport::rel_err(sub.F.eval(x).gradient, testsupport::fd_gradient(sub.F, x)) <= 1e-5);
      ++checked;
    }
  }

  TEST_CASE("input guards") {
    auto set = FeasibleSet::box(Vector::Zero(2), Vector::Constant(2, 1.0));
    InnerProblem prob;
    prob.F = SmoothOracle(2, [](const Vector& u, Vector& grad) {
      grad = u;
      return 0.5 * u.squaredNorm();
    });
    prob.set = &set;
    prob.mu = 1.0;
    prob.K_F = 0.5;  // K_F < mu
    prob.x0 = vec2(0.5, 0.5);
    CHECK_THROWS_AS(apg_solve(prob, 1e-6, 100), ConfigError);
    prob.K_F = 1.0;
    CHECK_THROWS_AS(apg_solve(prob, 0.0, 100), InputError);
    prob.x0 = vec2(5, 5);  // infeasible start
    CHECK_THROWS_AS(apg_solve(prob, 1e-6, 100), InputError);

    auto inst = counterexample();
    CHECK_THROWS_AS(build_prox_lagrangian(inst.problem, Vector::Zero(2), Vector::Constant(1, -1.0), 5.0),
                    InputError);
    CHECK_THROWS_AS(build_prox_lagrangian(inst.problem, Vector::Zero(2), Vector::Zero(1), 1.0), ConfigError);
  }
}
