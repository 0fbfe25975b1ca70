#include "pgap/certify.hpp"
#include "pgap/gibbs.hpp"
#include "pgap/mixing.hpp"
#include "pgap/purified.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace pgap;

static void BM_PurifiedMatvec(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityMatrix sigma = gibbs_state(ising_ring(n), 1.0);
  const SuperOperator h = purified_hamiltonian(sigma, all_sites(n));
  const Mat q = sigma.sqrt() + Mat::Identity(sigma.dim(), sigma.dim());
  for (auto _ : state) benchmark::DoNotOptimize(h.apply(q));
}
BENCHMARK(BM_PurifiedMatvec)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_SpectralGap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityMatrix sigma = gibbs_state(ising_ring(n), 1.0);
  const SuperOperator h = purified_hamiltonian(sigma, all_sites(n));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(h).gap);
}
BENCHMARK(BM_SpectralGap)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_DeltaDirect(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  const DensityMatrix sigma = gibbs_state(ising_ring(8), 1.0);
  const Partition p = ring_shield_partition(8, 0, 1, ell, 1, ShieldD::i1);
  for (auto _ : state) benchmark::DoNotOptimize(delta_direct(sigma, p).delta);
}
BENCHMARK(BM_DeltaDirect)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_TailProduct(benchmark::State& state) {
  const double beta = 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(tail_product([beta](long long k) { return ising_delta(k + 1, beta); }).value);
}
BENCHMARK(BM_TailProduct);

static void BM_IsingCertificate(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(certificate_1d(ising_envelope(0.5), std::exp(9.0), 1000, 9).lower_bound);
}
BENCHMARK(BM_IsingCertificate);

BENCHMARK_MAIN();
