// Serial reference vs OpenMP runner on the two ensemble kernels the
// experiments spend their time in.

#include <benchmark/benchmark.h>

#include <vector>

#include "peelkit/peeling/exploration.hpp"
#include "peelkit/rng.hpp"
#include "peelkit/verify/continuum.hpp"
#include "peelkit/verify/experiments.hpp"
#include "peelkit/verify/parallel.hpp"

using namespace peelkit;
using namespace peelkit::verify;

namespace {

const boltzmann::PeelingModel& model() { return shared_model(ModelRef{"budd-o2-example", 256}); }

void peeling_ensemble(benchmark::State& state, Execution exec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const long ell = 256;
  model();
  std::vector<long> steps(n);
  for (auto _ : state) {
    run_replicates(
        n,
        [&](std::size_t i) {
          Rng rng = Rng::stream(7, 1, i);
          const peeling::ExplorationTrace tr =
              peeling::run_exploration(model(), ell, peeling::Algorithm::layers, boltzmann::Mode::finite, rng);
          steps[i] = tr.steps();
        },
        exec);
    benchmark::DoNotOptimize(steps.data());
  }
  state.SetItemsProcessed(static_cast<long>(state.iterations()) * static_cast<long>(n));
  state.counters["threads"] = exec == Execution::serial ? 1 : worker_count();
}

void lamperti_ensemble_bench(benchmark::State& state, Execution exec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> times = {0.125, 0.25, 0.5};
  for (auto _ : state) {
    ColumnSet cols = lamperti_ensemble(1.0, times, 0.01, {n, 11, exec, 0});
    benchmark::DoNotOptimize(cols);
  }
  state.SetItemsProcessed(static_cast<long>(state.iterations()) * static_cast<long>(n));
}

void BM_PeelingSerial(benchmark::State& s) { peeling_ensemble(s, Execution::serial); }
void BM_PeelingParallel(benchmark::State& s) { peeling_ensemble(s, Execution::parallel); }
void BM_LampertiSerial(benchmark::State& s) { lamperti_ensemble_bench(s, Execution::serial); }
void BM_LampertiParallel(benchmark::State& s) { lamperti_ensemble_bench(s, Execution::parallel); }

}  // namespace

BENCHMARK(BM_PeelingSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PeelingParallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LampertiSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LampertiParallel)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
