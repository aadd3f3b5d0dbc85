#include <benchmark/benchmark.h>

#include <numbers>

#include "nctopo/invariants.hpp"
#include "nctopo/lattice_model.hpp"
#include "nctopo/spectral.hpp"

namespace {

using namespace nctopo;

// n x n Dirichlet box with B = 2 pi / 8.
ModelConfig landau(int n) {
  ModelConfig m;
  m.dim = 2;
  m.spacing = 1.0;
  m.box_length = n;
  const double b = 2.0 * std::numbers::pi / 8.0;
  m.field[0][1] = b;
  m.field[1][0] = -b;
  m.boundary = Boundary::dirichlet_all;
  return m;
}

Projection landau_projection(int n) {
  const auto m = landau(n);
  return fermi_projection(diagonalize(build_bulk_hamiltonian(m, sample_disorder(m, 0))), std::numbers::pi / 2.0);
}

void BM_diagonalize(benchmark::State& state) {
  const auto m = landau(int(state.range(0)));
  const auto h = build_bulk_hamiltonian(m, sample_disorder(m, 0));
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize(h));
}
BENCHMARK(BM_diagonalize)->Arg(12)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_even_chern(benchmark::State& state) {
  const auto p = landau_projection(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(even_chern(p, {0.5, 0}));
}
BENCHMARK(BM_even_chern)->Arg(12)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_kitaev_triple(benchmark::State& state) {
  const auto p = landau_projection(int(state.range(0)));
  const auto sectors = kitaev_sectors(p.grid, {0.5, 0});
  for (auto _ : state) benchmark::DoNotOptimize(kitaev_triple(p, sectors));
}
BENCHMARK(BM_kitaev_triple)->Arg(12)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_fredholm_index(benchmark::State& state) {
  const auto p = landau_projection(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fredholm_index(p));
}
BENCHMARK(BM_fredholm_index)->Arg(12)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
