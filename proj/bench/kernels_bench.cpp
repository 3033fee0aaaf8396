// Serial reference kernels against their OpenMP counterparts on one
// synthetic day. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "lobrep/eval.hpp"
#include "lobrep/perturb.hpp"
#include "lobrep/represent.hpp"
#include "lobrep/synth.hpp"

namespace lobrep {
namespace {

const SnapshotSeries& day() {
  static const SnapshotSeries series = [] {
    SynthConfig cfg;
    cfg.days = 1;
    cfg.events_per_day = 40'000;
    ReplayOptions replay;
    replay.stride = 5;
    return generate_series(cfg, replay);
  }();
  return series;
}

const std::vector<std::size_t>& ends() {
  static const auto e = window_ends(day(), WindowConfig{}.history, kDefaultHorizon);
  return e;
}

void BM_BuildWindows(benchmark::State& state) {
  const auto scheme = static_cast<Scheme>(state.range(0));
  const auto exec = static_cast<Exec>(state.range(1));
  const WindowConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_windows(day(), ends(), scheme, cfg, exec));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ends().size()));
  state.SetLabel(std::string(to_string(scheme)) + (exec == Exec::Serial ? " serial" : " parallel"));
}

void BM_PerturbSeries(benchmark::State& state) {
  const auto exec = static_cast<Exec>(state.range(0));
  PerturbationSpec spec;
  spec.paradigm = Paradigm::Both;
  for (auto _ : state) benchmark::DoNotOptimize(perturb_series(day(), spec, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(day().size()));
  state.SetLabel(exec == Exec::Serial ? "serial" : "parallel");
}

BENCHMARK(BM_BuildWindows)
    ->ArgsProduct({{0, 1, 2, 3}, {0, 1}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PerturbSeries)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace lobrep

BENCHMARK_MAIN();
