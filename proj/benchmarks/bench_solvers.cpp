#include <benchmark/benchmark.h>

#include "imela/imela.hpp"
#include "imela/test_problems.hpp"

using namespace imela;

namespace {

void bm_inner_solve(benchmark::State& state) {
  const Index d = static_cast<Index>(state.range(0));
  Rng rng(17);
  auto set = FeasibleSet::box(Vector::Constant(d, -1.0), Vector::Constant(d, 1.0));
  Vector diag = rng.uniform_vector(d, 1.0, 40.0);
  Vector lin = rng.normal_vector(d);
  InnerProblem prob;
  prob.F = SmoothOracle(d, [diag, lin](const Vector& x, Vector& grad) {
    grad = diag.cwiseProduct(x) - lin;
    return 0.5 * x.dot(diag.cwiseProduct(x)) - lin.dot(x);
  });
  prob.set = &set;
  prob.mu = 1.0;
  prob.K_F = 40.0;
  prob.x0 = Vector::Zero(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apg_solve(prob, 1e-8, 100000));
  }
}

void bm_outer_loop(benchmark::State& state) {
  auto inst = counterexample();
  auto params = default_params(inst.problem.constants, 2.0 * inst.problem.constants.L);
  params.T = static_cast<long long>(state.range(0));
  for (auto _ : state) {
    OracleCounter counter;
    benchmark::DoNotOptimize(imela_run(inst.problem, params, counter));
  }
}

}  // namespace

BENCHMARK(bm_inner_solve)->Arg(8)->Arg(64)->Arg(512);
BENCHMARK(bm_outer_loop)->Arg(10)->Arg(100);

BENCHMARK_MAIN();
