#include <benchmark/benchmark.h>

#include "simcurv/asymptotic.hpp"
#include "simcurv/models.hpp"
#include "simcurv/sweep.hpp"

using namespace simcurv;

namespace {

struct Workload {
  SystemPtr system;
  IvfPtr a;
  GridSpec grid;
};

// Shooting-backed graph: the enzyme model with an asymptotic lift.
Workload enzyme() {
  const auto en = make_enzyme_mmh(0.5, 1.0, 0.5);
  return {en, asymptotic_lift(en, 2), GridSpec::uniform(1, 0, 2, 10, 0, 3, 20)};
}

// Closed-form graph: the (3,2) model over a 4-D grid.
Workload model32() {
  const auto m = make_model_3_2(0.01);
  return {m, m->critical_manifold(), GridSpec::uniform(3, 0, 1, 8, 0.1, 1.5, 8)};
}

void serial(benchmark::State& state, Workload (*make)()) {
  const Workload w = make();
  for (auto _ : state) benchmark::DoNotOptimize(curvature_sweep_serial(w.system, w.a, w.grid, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.grid.node_count()));
}

void parallel(benchmark::State& state, Workload (*make)()) {
  const Workload w = make();
  SweepOptions o;
  o.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(curvature_sweep(w.system, w.a, w.grid, o));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.grid.node_count()));
}

}  // namespace

BENCHMARK_CAPTURE(serial, enzyme, enzyme)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(parallel, enzyme, enzyme)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(serial, model32, model32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(parallel, model32, model32)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
