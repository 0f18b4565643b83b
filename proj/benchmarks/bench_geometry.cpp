#include <benchmark/benchmark.h>

#include "imela/set.hpp"

using namespace imela;

namespace {

void bm_l1_projection(benchmark::State& state) {
  const Index d = static_cast<Index>(state.range(0));
  Rng rng(7);
  Vector v = rng.normal_vector(d) * 3.0;
  const double r = 0.05 * static_cast<double>(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_l1_ball(v, r));
  }
  state.SetComplexityN(state.range(0));
}

void bm_l1_normal_cone(benchmark::State& state) {
  const Index d = static_cast<Index>(state.range(0));
  Rng rng(11);
  auto set = FeasibleSet::l1_ball(d, 1.0);
  Vector x = project_l1_ball(rng.normal_vector(d) * 2.0, 1.0);  // boundary point
  Vector v = rng.normal_vector(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(set.normal_cone_distance(x, v));
  }
  state.SetComplexityN(state.range(0));
}

void bm_polytope_projection(benchmark::State& state) {
  // unit box plus random cuts through the interior, so the set stays bounded
  Rng rng(13);
  const Index d = 4;
  Matrix A(2 * d + 4, d);
  Vector b(2 * d + 4);
  A.topRows(d) = Matrix::Identity(d, d);
  A.middleRows(d, d) = -Matrix::Identity(d, d);
  b.head(2 * d).setOnes();
  for (Index i = 0; i < 4; ++i) {
    A.row(2 * d + i) = rng.normal_vector(d).transpose();
    b[2 * d + i] = 0.5 + rng.uniform();
  }
  auto set = FeasibleSet::polytope(A, b);
  Vector v = rng.normal_vector(d) * 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(set.project(v));
  }
}

}  // namespace

BENCHMARK(bm_l1_projection)->RangeMultiplier(10)->Range(10, 100000)->Complexity();
BENCHMARK(bm_l1_normal_cone)->RangeMultiplier(10)->Range(10, 10000)->Complexity();
BENCHMARK(bm_polytope_projection);
