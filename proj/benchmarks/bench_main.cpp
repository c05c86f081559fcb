#include <map>

#include <benchmark/benchmark.h>

#include "transverse/dns.hpp"
#include "transverse/hill.hpp"
#include "transverse/instability.hpp"
#include "transverse/wave.hpp"

using namespace transverse;

namespace {

const WaveProfile& even_wave(int modes) {
  static std::map<int, WaveProfile> cache;
  auto it = cache.find(modes);
  if (it == cache.end()) it = cache.emplace(modes, solve_wave(ProblemParams{}, modes)).first;
  return it->second;
}

void BM_SolveWave(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_wave(ProblemParams{}, modes));
}
BENCHMARK(BM_SolveWave)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_AssembleL1(benchmark::State& state) {
  const WaveProfile& w = even_wave(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_hill(w, HillKind::L1, BasisKind::full_fourier));
}
BENCHMARK(BM_AssembleL1)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_HillSpectrum(benchmark::State& state) {
  const OperatorMatrix op = build_hill(even_wave(static_cast<int>(state.range(0))), HillKind::L1,
                                       BasisKind::full_fourier);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(op));
}
BENCHMARK(BM_HillSpectrum)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_InstabilitySolve(benchmark::State& state) {
  const InstabilityProblem p(even_wave(static_cast<int>(state.range(0))), Sector::full);
  for (auto _ : state) benchmark::DoNotOptimize(p.solve(1.2));
}
BENCHMARK(BM_InstabilitySolve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Scan(benchmark::State& state) {
  const WaveProfile& w = even_wave(128);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_kappa(w, 0.05, 3.0, 20, Sector::full, workers));
}
BENCHMARK(BM_Scan)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_EvolveRK4(benchmark::State& state) {
  const WaveProfile& w = even_wave(64);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_and_fit(w, 1.2));
}
BENCHMARK(BM_EvolveRK4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
