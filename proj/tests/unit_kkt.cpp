#include <doctest.h>

#include "imela/kkt.hpp"
#include "imela/test_problems.hpp"

using namespace imela;

namespace {
Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }
Vector vec1(double a) { return (Vector(1) << a).finished(); }
}  // namespace

TEST_SUITE("kkt") {
  TEST_CASE("counterexample origin with the certifying multiplier") {
    auto inst = counterexample();
    auto res = kkt_residuals(inst.problem, Vector::Zero(2), vec1(2.0));
    CHECK(res.stationarity == doctest::Approx(0.0));
    CHECK(res.infeasibility == doctest::Approx(0.0));
    CHECK(res.comp_slackness == doctest::Approx(0.0));
  }

  TEST_CASE("counterexample origin with zero multiplier") {
    // -grad f = (-2, 0) lies in the normal cone of the face x_1 = 0.
    auto inst = counterexample();
    auto res = kkt_residuals(inst.problem, Vector::Zero(2), vec1(0.0));
    CHECK(res.stationarity == doctest::Approx(0.0));
    CHECK(res.infeasibility == doctest::Approx(0.0));
    CHECK(res.comp_slackness == doctest::Approx(0.0));
  }

  TEST_CASE("interior point sees the raw gradient norm") {
    auto inst = counterexample();
    auto res = kkt_residuals(inst.problem, vec2(0.1, 0.0), vec1(0.0));
    CHECK(res.stationarity == doctest::Approx(2.2));
    CHECK(res.infeasibility == doctest::Approx(0.0));
    CHECK(res.comp_slackness == doctest::Approx(0.0));
  }

  TEST_CASE("feasible point with zero multiplier has zero cs and infeasibility") {
    auto inst = convex_interior();
    auto res = kkt_residuals(inst.problem, vec2(0.5, 0.5), vec1(0.0));
    CHECK(res.infeasibility == 0.0);
    CHECK(res.comp_slackness == 0.0);
  }

  TEST_CASE("violated constraint shows up in infeasibility and cs") {
    auto inst = convex_active();  // g = x1 + x2 - 1
    auto res = kkt_residuals(inst.problem, vec2(1.0, 0.5), vec1(2.0));
    CHECK(res.infeasibility == doctest::Approx(0.5));
    CHECK(res.comp_slackness == doctest::Approx(1.0));
  }

  TEST_CASE("combined and linear scores") {
    KKTResiduals r;
    r.stationarity = 3.0;
    r.infeasibility = 4.0;
    r.comp_slackness = 12.0;
    CHECK(r.combined_sq() == doctest::Approx(169.0));
    CHECK(r.linear_sum() == doctest::Approx(19.0));
  }

  TEST_CASE("multiplier validation") {
    auto inst = counterexample();
    CHECK_THROWS_AS(kkt_residuals(inst.problem, Vector::Zero(2), Vector::Zero(2)), InputError);
    CHECK_THROWS_AS(kkt_residuals(inst.problem, Vector::Zero(2), vec1(-0.1)), InputError);
  }

  TEST_CASE("active sets at the counterexample origin") {
    auto inst = counterexample();
    auto act = active_sets(inst.problem, Vector::Zero(2));
    REQUIRE(act.constraints.size() == 1);
    CHECK(act.constraints[0] == 0);
    // box rows: 0,1 upper; 2,3 lower. x = (0,0) touches the lower x_1 bound.
    REQUIRE(act.set_rows.size() == 1);
    CHECK(act.set_rows[0] == 2);
  }

  TEST_CASE("strict interior point has empty active sets") {
    auto inst = counterexample();
    auto act = active_sets(inst.problem, vec2(0.5, 0.5));
    CHECK(act.constraints.empty());
    CHECK(act.set_rows.empty());
  }

  TEST_CASE("active set tolerance is monotone") {
    auto inst = counterexample();
    Vector x = vec2(1e-7, 0.0);
    auto tight = active_sets(inst.problem, x, 1e-9);
    auto loose = active_sets(inst.problem, x, 1e-5);
    CHECK(tight.constraints.size() <= loose.constraints.size());
    CHECK(tight.set_rows.size() <= loose.set_rows.size());
    CHECK(loose.constraints.size() == 1);
  }

  TEST_CASE("l1 active sets report signs and boundary status") {
    auto inst = l1_quadratic();
    Vector x = Vector::Zero(5);
    x[0] = 1.0;  // on the boundary of the unit ball
    auto act = active_sets(inst.problem, x);
    CHECK(act.l1_boundary);
    CHECK(act.l1_signs[0] == 1);
    CHECK(act.l1_signs[1] == 0);
  }

  TEST_CASE("subset residual at exact membership is zero") {
    auto inst = counterexample();
    CHECK(subset_residual(inst.problem, Vector::Zero(2), {0}, {2}) == doctest::Approx(0.0));
  }

  TEST_CASE("subset residual measures the distance to the active system") {
    auto inst = counterexample();
    CHECK(subset_residual(inst.problem, vec2(0.1, 0.0), {0}, {}) == doctest::Approx(0.01));
  }

  TEST_CASE("subset residual ignores indices that are exactly active") {
    auto inst = counterexample();
    Vector x = vec2(0.1, 0.0);
    const double base = subset_residual(inst.problem, x, {0}, {});
    // row 3 (-x_2 <= 0 side is row index 3? lower bound of x_2 is -1) -> use
    // an exactly-active box row: none at x, so compare adding the inactive
    // upper row of x_2 at its exact value is not applicable; instead verify
    // on the origin where row 2 is exactly active.
    CHECK(subset_residual(inst.problem, Vector::Zero(2), {0}, {}) ==
          doctest::Approx(subset_residual(inst.problem, Vector::Zero(2), {0}, {2})));
    CHECK(base == doctest::Approx(0.01));
  }

  TEST_CASE("error bound probe: residual equals squared distance on the counterexample") {
    // For x = (s, 0) the nearest point of {g = 0} inside the box is the
    // origin-face point (0,0), so dist^2 = s^2 = |g(x)|^2.
    auto inst = counterexample();
    for (double s : {0.1, 0.05, 0.01, 0.001}) {
      CHECK(subset_residual(inst.problem, vec2(s, 0.0), {0}, {}) == doctest::Approx(s * s));
    }
  }

  TEST_CASE("best iterate: single row wins") {
    std::vector<MetricRow> rows(1);
    rows[0].objective = 1.0;
    rows[0].infeasibility = 0.5;
    rows[0].stationarity = 1.0;
    rows[0].comp_slackness = 0.1;
    auto sel = best_iterate(rows, BestIterateMode::PrimalDual);
    REQUIRE(sel.has_value());
    CHECK(sel->row == 0);
    CHECK(sel->score == doctest::Approx(1.6));
  }

  TEST_CASE("best iterate: argmin of the residual sum") {
    std::vector<MetricRow> rows(2);
    rows[0].stationarity = 0.5;
    rows[0].infeasibility = 0.25;
    rows[0].comp_slackness = 0.25;
    rows[1].stationarity = 0.05;
    rows[1].infeasibility = 0.025;
    rows[1].comp_slackness = 0.025;
    auto sel = best_iterate(rows, BestIterateMode::PrimalDual);
    REQUIRE(sel.has_value());
    CHECK(sel->row == 1);
  }

  TEST_CASE("best iterate: feasibility filter precedes the objective") {
    std::vector<MetricRow> rows(2);
    rows[0].objective = 0.1;
    rows[0].infeasibility = 1e-3;
    rows[1].objective = 0.5;
    rows[1].infeasibility = 1e-6;
    auto sel = best_iterate(rows, BestIterateMode::FeasibleObjective, 1e-5);
    REQUIRE(sel.has_value());
    CHECK(sel->row == 1);
    CHECK(sel->score == doctest::Approx(0.5));
  }

  TEST_CASE("best iterate: rows without stationarity are skipped in primal-dual mode") {
    std::vector<MetricRow> rows(2);
    rows[0].objective = 0.0;
    rows[0].infeasibility = 0.0;
    rows[1].objective = 0.0;
    rows[1].infeasibility = 0.1;
    rows[1].stationarity = 0.2;
    rows[1].comp_slackness = 0.0;
    auto sel = best_iterate(rows, BestIterateMode::PrimalDual);
    REQUIRE(sel.has_value());
    CHECK(sel->row == 1);
  }

  TEST_CASE("best iterate: nothing qualifies") {
    std::vector<MetricRow> rows(1);
    rows[0].objective = 1.0;
    rows[0].infeasibility = 1.0;
    CHECK_FALSE(best_iterate(rows, BestIterateMode::FeasibleObjective, 1e-5).has_value());
    CHECK_FALSE(best_iterate(rows, BestIterateMode::PrimalDual).has_value());
  }
}
