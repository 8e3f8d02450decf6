// Serial reference vs OpenMP kernels: assembly, matrix-vector product and the
// Cholesky certificate, over growing sphere-shell discretizations.
#include <condcap/condenser.hpp>
#include <condcap/kernels.hpp>

#include <benchmark/benchmark.h>

#include <vector>

using namespace condcap;

namespace {

PointCloud shell_points(std::size_t n) {
  const std::vector<PlateSpec> specs{PlateSpec{1, 1, SphereShell{{0, 0, 0}, 1.0}, n, 1.0}};
  return discretize(specs, WeightFunction::constant(1.0), 0).global_points();
}

const KernelSpec kSpec = KernelSpec::riesz(1.5, 3, 0.05);

void BM_AssembleSerial(benchmark::State& state) {
  const auto pts = shell_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::assemble_matrix(kSpec, pts));
}

void BM_AssembleOpenMP(benchmark::State& state) {
  const auto pts = shell_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_matrix(kSpec, pts));
}

void BM_MatvecSerial(benchmark::State& state) {
  const auto K = assemble_matrix(kSpec, shell_points(static_cast<std::size_t>(state.range(0))));
  std::vector<double> x(K.size(), 1.0), y(K.size());
  for (auto _ : state) {
    reference::matvec(K, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_MatvecOpenMP(benchmark::State& state) {
  const auto K = assemble_matrix(kSpec, shell_points(static_cast<std::size_t>(state.range(0))));
  std::vector<double> x(K.size(), 1.0), y(K.size());
  for (auto _ : state) {
    matvec(K, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_CertifySerial(benchmark::State& state) {
  const auto K = assemble_matrix(kSpec, shell_points(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(reference::certify_positive_definite(K.entries(), K.size()));
}

void BM_CertifyOpenMP(benchmark::State& state) {
  const auto K = assemble_matrix(kSpec, shell_points(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(certify_positive_definite(K.entries(), K.size()));
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleOpenMP)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MatvecSerial)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MatvecOpenMP)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_CertifySerial)->RangeMultiplier(2)->Range(256, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CertifyOpenMP)->RangeMultiplier(2)->Range(256, 1024)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
