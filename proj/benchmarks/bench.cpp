#include <benchmark/benchmark.h>

#include <memory>
#include <numbers>

#include "llhmm/cell.hpp"
#include "llhmm/kernels.hpp"
#include "llhmm/micro.hpp"
#include "llhmm/upscaling.hpp"

using namespace llhmm;

namespace {

VectorField helix_field(const PeriodicGrid& g) { return sample_macro(macro_helix(), g); }

void BM_FluxApply1D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  PeriodicGrid g(1, n);
  FluxStencil op(g, Coefficient::paper_1d(8.0 * g.h));
  VectorField u = helix_field(g), out(g);
  for (auto _ : state) {
    op.apply(u, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_FluxApply1D)->Arg(1 << 10)->Arg(1 << 14);

void BM_FluxApply2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  PeriodicGrid g(2, n);
  FluxStencil op(g, Coefficient::paper_2d(8.0 * g.h));
  VectorField u(g, normalized({1.0, 1.0, 0.0})), out(g);
  for (auto _ : state) {
    op.apply(u, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_FluxApply2D)->Arg(128)->Arg(320);

void BM_RK4Step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  PeriodicGrid g(1, n);
  auto op = std::make_shared<FluxStencil>(g, Coefficient::paper_1d(8.0 * g.h));
  LLState s(helix_field(g), 0.1, op);
  StepControl ctl = StepControl::for_window(*op, 1.0);
  for (auto _ : state) {
    step(s, ctl);
    benchmark::DoNotOptimize(s.m.values().data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_RK4Step)->Arg(1 << 10)->Arg(1 << 13);

void BM_KernelBuild(benchmark::State& state) {
  for (auto _ : state) {
    Kernel k = Kernel::one_sided(5, 7);
    benchmark::DoNotOptimize(k.ansatz_coeffs().data());
  }
}
BENCHMARK(BM_KernelBuild);

void BM_CellSolve1D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Coefficient a = Coefficient::paper_1d(1.0);
  for (auto _ : state) {
    CellSolution sol = solve_cell(a, n);
    benchmark::DoNotOptimize(sol.AH(0, 0));
  }
}
BENCHMARK(BM_CellSolve1D)->Arg(256)->Arg(1024);

void BM_SpaceAverage(benchmark::State& state) {
  PeriodicGrid g(1, 1120);
  const Kernel k = Kernel::symmetric(5, 7);
  SpaceAverager avg(g, k, 0.03);
  VectorField u = helix_field(g);
  for (auto _ : state) {
    Vec3 v = avg.average(u);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_SpaceAverage);

}  // namespace

BENCHMARK_MAIN();
