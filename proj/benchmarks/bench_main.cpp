// Micro benchmarks for the hot paths: tensor algebra, table generation,
// witness evaluation and the LP based feasibility tests.

#include <benchmark/benchmark.h>

#include <vector>

#include "fusionlab/feasibility.hpp"
#include "fusionlab/linalg.hpp"
#include "fusionlab/quantum.hpp"
#include "fusionlab/witness.hpp"

using namespace fusionlab;

namespace {

DataBundle bundle(ProtocolId id, double v) { return generate_bundle(build_protocol({id, v}), default_targets(id)); }

void BM_Kron(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<ComplexMatrix> f(n, pauli::X() * pauli::Z());
  for (auto _ : state) benchmark::DoNotOptimize(kron(f));
  state.SetLabel(std::to_string(1 << n) + "x" + std::to_string(1 << n));
}
BENCHMARK(BM_Kron)->DenseRange(2, 6, 2);

void BM_HermitianEigenvalues(benchmark::State& state) {
  const auto rho = kron(phi_plus(), phi_plus());
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigenvalues(rho));
}
BENCHMARK(BM_HermitianEigenvalues);

void BM_GenerateBundle(benchmark::State& state) {
  const auto id = static_cast<ProtocolId>(state.range(0));
  const auto m = build_protocol({id, 0.8});
  const auto t = default_targets(id);
  for (auto _ : state) benchmark::DoNotOptimize(generate_bundle(m, t));
}
BENCHMARK(BM_GenerateBundle)
    ->Arg(static_cast<int>(ProtocolId::UcRelaxation))
    ->Arg(static_cast<int>(ProtocolId::Chain))
    ->Arg(static_cast<int>(ProtocolId::FritzEdgeTriangle));

void BM_WitnessW(benchmark::State& state) {
  const auto b = bundle(ProtocolId::UcRelaxation, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(eval_W(b));
}
BENCHMARK(BM_WitnessW);

void BM_WitnessD(benchmark::State& state) {
  const auto b = bundle(ProtocolId::Chain, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(eval_D(b));
}
BENCHMARK(BM_WitnessD);

void BM_Sweep(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sweep(ProtocolId::UcRelaxation, WitnessId::W, 0.0, 1.0, 101, 1));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

void BM_ChainLp(benchmark::State& state) {
  const auto b = bundle(ProtocolId::Chain, 1.0);
  LpOptions o;
  o.exact = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(lp_membership(b, o));
}
BENCHMARK(BM_ChainLp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_UcInflation(benchmark::State& state) {
  const auto b = bundle(ProtocolId::UcRelaxation, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(inflation_lp(b));
}
BENCHMARK(BM_UcInflation)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
