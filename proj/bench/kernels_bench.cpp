// Serial reference vs OpenMP variant of each kernel. Arguments are problem
// sizes; compare the *_serial and *_omp rows of the same size.
#include <benchmark/benchmark.h>

#include <vector>

#include "spcv/kernels.hpp"
#include "spcv/rng.hpp"

namespace {

using spcv::Matrix;
using spcv::Point;

std::vector<Point> points(std::size_t n, std::uint64_t seed) {
  spcv::Rng r(seed);
  std::vector<Point> p(n);
  for (auto& q : p) q = {r.uniform(), r.uniform()};
  return p;
}

Matrix features(std::size_t n, std::size_t p, std::uint64_t seed) {
  spcv::Rng r(seed);
  Matrix m(n, p);
  for (auto& v : m.values()) v = r.normal();
  return m;
}

template <auto Kernel>
void assign_nearest(benchmark::State& state) {
  const auto p = points(static_cast<std::size_t>(state.range(0)), 1);
  const auto c = points(5, 2);
  std::vector<int> labels(p.size());
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(p, c, labels));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void covariance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = points(n, 3);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    Kernel(p, 0.3, 1.0, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <auto Kernel>
void minkowski(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = features(n, 21, 4), b = features(n, 21, 5);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    Kernel(a, b, 2, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <auto Kernel>
void squared(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = features(n, 21, 6);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    Kernel(a, a, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(assign_nearest<spcv::kernels::assign_nearest_serial>)->Name("assign_nearest_serial")->Arg(600)->Arg(20000);
BENCHMARK(assign_nearest<spcv::kernels::assign_nearest_omp>)->Name("assign_nearest_omp")->Arg(600)->Arg(20000);
BENCHMARK(covariance<spcv::kernels::exponential_covariance_serial>)->Name("covariance_serial")->Arg(600)->Arg(2000);
BENCHMARK(covariance<spcv::kernels::exponential_covariance_omp>)->Name("covariance_omp")->Arg(600)->Arg(2000);
BENCHMARK(minkowski<spcv::kernels::minkowski_distances_serial>)->Name("minkowski_serial")->Arg(120)->Arg(480);
BENCHMARK(minkowski<spcv::kernels::minkowski_distances_omp>)->Name("minkowski_omp")->Arg(120)->Arg(480);
BENCHMARK(squared<spcv::kernels::squared_distances_serial>)->Name("squared_distances_serial")->Arg(120)->Arg(480);
BENCHMARK(squared<spcv::kernels::squared_distances_omp>)->Name("squared_distances_omp")->Arg(120)->Arg(480);

BENCHMARK_MAIN();
