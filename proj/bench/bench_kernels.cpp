#include <random>

#include <benchmark/benchmark.h>

#include "dichotomy/kernels.hpp"
#include "dichotomy/generator.hpp"

using namespace dichotomy;

namespace {

Mat bench_matrix(Eigen::Index n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Mat A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = cplx(nd(rng), nd(rng)) / std::sqrt(2.0 * n);
  return A - 0.5 * Mat::Identity(n, n);
}

template <bool Parallel>
void fejer(benchmark::State& state) {
  const Generator g(bench_matrix(8));
  const ResolventSampler rs(g);
  const Vec ones = Vec::Ones(8);
  const kernels::SampleFn f = [&](double s, Mat& out) { out = rs.apply(cplx(0.0, s), ones); };
  const kernels::FejerGrid grid{static_cast<double>(state.range(0)), 0.025, 8, 1};
  const std::vector<double> times{-1.0, -0.25, 0.25, 1.0};
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::fejer_transform(f, grid, times)
                      : kernels::serial::fejer_transform(f, grid, times);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * kernels::fejer_points(grid));
}

template <bool Parallel>
void map(benchmark::State& state) {
  const Generator g(bench_matrix(8));
  const ResolventSampler rs(g);
  const Vec ones = Vec::Ones(8);
  const std::function<Vec(Eigen::Index)> fn = [&](Eigen::Index k) {
    return rs.apply(cplx(0.0, 0.01 * static_cast<double>(k)), ones);
  };
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::map_vectors(state.range(0), fn)
                      : kernels::serial::map_vectors(state.range(0), fn);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(fejer<false>)->Name("fejer_transform/serial")->Arg(200)->Arg(2000);
BENCHMARK(fejer<true>)->Name("fejer_transform/parallel")->Arg(200)->Arg(2000);
BENCHMARK(map<false>)->Name("map_vectors/serial")->Arg(1 << 14);
BENCHMARK(map<true>)->Name("map_vectors/parallel")->Arg(1 << 14);

BENCHMARK_MAIN();
