#include <doctest.h>

#include "imela/test_problems.hpp"
#include "imela/tuning.hpp"

using namespace imela;

TEST_SUITE("tuning") {
  TEST_CASE("method names round trip") {
    for (auto m : {Method::IMELa, Method::IPPP, Method::SPLM, Method::SSG}) {
      CHECK(parse_method(method_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_method("adam"), ConfigError);
  }

  TEST_CASE("run_method enforces budget semantics per method") {
    auto inst = counterexample();
    OracleCounter counter;

    // double-loop: budget caps cumulative inner steps
    auto im = run_method(inst.problem, Method::IMELa, {}, 200, counter);
    CHECK(im.trace.rows.back().cum_oracle >= 200);
    auto ip = run_method(inst.problem, Method::IPPP, {}, 200, counter);
    CHECK(ip.trace.rows.back().cum_oracle >= 200);

    // single-loop: budget is the outer iteration count
    auto sp = run_method(inst.problem, Method::SPLM, {{"eta", 0.05}}, 150, counter);
    CHECK(sp.trace.rows.size() == 150);
    CHECK(sp.trace.rows.back().cum_oracle == 150);
    auto sg = run_method(inst.problem, Method::SSG, {{"eps", 1e-5}, {"eta", 1e-3}}, 150, counter);
    CHECK(sg.trace.rows.size() == 150);
  }

  TEST_CASE("imela tuning budget stops at the crossing iteration") {
    auto inst = counterexample();
    OracleCounter counter;
    auto run = run_method(inst.problem, Method::IMELa, {{"c", 10.0}}, 500, counter);
    const auto& rows = run.trace.rows;
    CHECK(rows.back().cum_oracle >= 500);
    if (rows.size() > 1) CHECK(rows[rows.size() - 2].cum_oracle < 500);
  }

  TEST_CASE("explicit T overrides the budget") {
    auto inst = counterexample();
    OracleCounter counter;
    auto run = run_method(inst.problem, Method::SPLM, {{"eta", 0.05}, {"T", 17.0}}, 500, counter);
    CHECK(run.trace.rows.size() == 17);
  }

  TEST_CASE("unknown parameters are rejected with the method name") {
    auto inst = counterexample();
    OracleCounter counter;
    try {
      run_method(inst.problem, Method::IPPP, {{"momentum", 0.9}}, 100, counter);
      FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
      CHECK(std::string(err.what()).find("ippp") != std::string::npos);
      CHECK(std::string(err.what()).find("momentum") != std::string::npos);
    }
    CHECK_THROWS_AS(run_method(inst.problem, Method::SPLM, {}, 100, counter), ConfigError);  // eta missing
    CHECK_THROWS_AS(run_method(inst.problem, Method::SSG, {{"diminishing", 0.5}}, 100, counter), ConfigError);
  }

  TEST_CASE("degenerate single-point grid returns that point") {
    auto inst = counterexample();
    TuneOptions opts;
    opts.budget = 200;
    auto result = tune(inst.problem, Method::IPPP, {GridMap{{"rho", {500.0}}}}, opts);
    REQUIRE(result.candidates.size() == 1);
    CHECK(result.winner == 0);
    CHECK(result.candidates[0].params.at("rho") == 500.0);
    CHECK_FALSE(result.candidates[0].failed);
  }

  TEST_CASE("the smaller residual sum wins") {
    auto inst = convex_active();
    TuneOptions opts;
    opts.budget = 400;
    // An absurd dual step keeps the multiplier oscillating, so the sane
    // candidate must win on the residual score.
    auto result = tune(inst.problem, Method::IMELa, {GridMap{{"tau", {1e6, 0.125}}}}, opts);
    REQUIRE(result.candidates.size() == 2);
    CHECK(result.candidates[1].score < result.candidates[0].score);
    CHECK(result.winner == 1);
  }

  TEST_CASE("failed candidates do not abort the sweep") {
    auto inst = counterexample();
    TuneOptions opts;
    opts.budget = 200;
    // p = 1 < L makes the first candidate throw; the second succeeds.
    auto result = tune(inst.problem, Method::IMELa, {GridMap{{"p", {1.0, 4.0}}}}, opts);
    REQUIRE(result.candidates.size() == 2);
    CHECK(result.candidates[0].failed);
    CHECK_FALSE(result.candidates[0].failure.empty());
    CHECK(result.winner == 1);
  }

  TEST_CASE("tuning fails loudly when every candidate fails") {
    auto inst = counterexample();
    TuneOptions opts;
    opts.budget = 100;
    CHECK_THROWS_AS(tune(inst.problem, Method::IMELa, {GridMap{{"p", {0.5, 1.0}}}}, opts), ConfigError);
  }

  TEST_CASE("union of grids concatenates candidates in order") {
    auto inst = counterexample();
    TuneOptions opts;
    opts.budget = 150;
    auto grids = std::vector<GridMap>{GridMap{{"diminishing", {0.0}}, {"eps", {1e-5}}, {"eta", {1e-3}}},
                                      GridMap{{"diminishing", {1.0}}, {"eps", {1e-4}}, {"eta", {0.1}}}};
    auto result = tune(inst.problem, Method::SSG, grids, opts);
    REQUIRE(result.candidates.size() == 2);
    CHECK(result.candidates[0].params.at("diminishing") == 0.0);
    CHECK(result.candidates[1].params.at("diminishing") == 1.0);
  }

  TEST_CASE("ssg scoring keeps feasible iterates only") {
    auto inst = convex_active();
    TuneOptions opts;
    opts.budget = 300;
    auto result = tune(inst.problem, Method::SSG, default_grids(Method::SSG), opts);
    const auto& win = result.candidates[result.winner];
    REQUIRE(win.best_row.has_value());
    CHECK_FALSE(win.failed);
    // winner's score is an objective value, bounded below by the optimum
    CHECK(win.score >= 0.25 - 1e-6);
  }

  TEST_CASE("default grids match the benchmark protocol") {
    auto imela_grids = default_grids(Method::IMELa);
    REQUIRE(imela_grids.size() == 1);
    CHECK(imela_grids[0].at("tau") == std::vector<double>{5, 10, 20, 50});
    CHECK(imela_grids[0].at("theta") == std::vector<double>{0.5, 0.75, 1.0});
    CHECK(imela_grids[0].at("c") == std::vector<double>{1, 2, 5, 10});
    CHECK(default_grids(Method::IPPP)[0].at("rho") == std::vector<double>{200, 500, 1000, 1500});
    CHECK(default_grids(Method::SSG).size() == 2);
    // step axes scale with the data
    auto scaled = default_grids(Method::SPLM, 2.0);
    CHECK(scaled[0].at("eta")[0] == doctest::Approx(0.01));
  }
}
