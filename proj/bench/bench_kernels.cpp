#include <benchmark/benchmark.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "rsm/kernels.hpp"
#include "rsm/stable_noise.hpp"

namespace {

using namespace rsm;


struct Setup {
  kernels::ConvolutionTable table;
  Mat step;
  Vec prefactor;
  LevyPath path;
  std::size_t taps;
  std::size_t n_out;
};

// Two fast components, F = [[-1, 0.3], [-0.3, -1.5]], dt = 1e-2, lookback 18.4.
Setup make_setup(std::size_t n_out) {
  Mat F(2, 2);
  F << -1.0, 0.3, -0.3, -1.5;
  const double dt = 1e-2;
  const std::size_t taps = 1842;
  const double t_max = static_cast<double>(taps + n_out) * dt;
  auto path = generate_path(StableSpec::uniform(1.8, 2), 0.0, t_max, dt, 7);
  const Vec pre = Vec::Ones(2);
  auto table = kernels::ConvolutionTable::build(F, pre, dt, taps);
  const Mat step = (F * dt).exp();
  return Setup{std::move(table), step, pre, std::move(path), taps, n_out};
}

void BM_serial(benchmark::State& state) {
  const auto s = make_setup(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(s.n_out * 2);
  for (auto _ : state) {
    kernels::convolve_serial(s.table, s.path.increments(), s.taps, s.n_out, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.n_out));
}

void BM_omp(benchmark::State& state) {
  const auto s = make_setup(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(s.n_out * 2);
  for (auto _ : state) {
    kernels::convolve_omp(s.table, s.path.increments(), s.taps, s.n_out, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.n_out));
}

void BM_recursive(benchmark::State& state) {
  const auto s = make_setup(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(s.n_out * 2);
  for (auto _ : state) {
    kernels::convolve_recursive(s.step, s.prefactor, s.path.increments(), 0, s.taps, s.n_out, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.n_out));
}

void BM_generate_path(benchmark::State& state) {
  const auto cells = state.range(0);
  for (auto _ : state) {
    auto p = generate_path(StableSpec::uniform(1.8, 1), 0.0, static_cast<double>(cells) * 1e-3,
                           1e-3, 11);
    benchmark::DoNotOptimize(p.increments().data());
  }
  state.SetItemsProcessed(state.iterations() * cells);
}

}  // namespace

BENCHMARK(BM_serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_omp)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_recursive)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_generate_path)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
