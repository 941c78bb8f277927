#include <vector>

#include <benchmark/benchmark.h>

#include "deadbeat/frequency.hpp"
#include "deadbeat/observer.hpp"
#include "deadbeat/plant_sim.hpp"
#include "deadbeat/reactor.hpp"
#include "deadbeat/window_kernel.hpp"

namespace {

using deadbeat::Vector;

Vector Vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

void BM_ComputeWindowFrequency(benchmark::State& state) {
  deadbeat::FrequencyScenario scn;
  scn.phase = 1.0;
  const double h = scn.r / static_cast<double>(state.range(0));
  const deadbeat::IoWindow w = deadbeat::scenario_window(scn, h);
  const deadbeat::SystemSpec spec = deadbeat::freq_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(deadbeat::compute_window(spec, w));
  }
}
BENCHMARK(BM_ComputeWindowFrequency)->Arg(500)->Arg(2000)->Arg(8000);

void BM_ApplyPFrequency(benchmark::State& state) {
  deadbeat::FrequencyScenario scn;
  scn.phase = 1.0;
  const deadbeat::IoWindow w = deadbeat::scenario_window(scn, 5e-4);
  const deadbeat::SystemSpec spec = deadbeat::freq_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(deadbeat::apply_p(spec, w));
  }
}
BENCHMARK(BM_ApplyPFrequency);

void BM_FreqClosedForm(benchmark::State& state) {
  deadbeat::FrequencyScenario scn;
  scn.phase = 1.0;
  const deadbeat::IoWindow w = deadbeat::scenario_window(scn, 5e-4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(deadbeat::freq_closed_form(w));
  }
}
BENCHMARK(BM_FreqClosedForm);

void BM_RunObserverReactor(benchmark::State& state) {
  const auto p = deadbeat::ReactorParams::canonical();
  const auto spec = deadbeat::reactor_spec(p);
  deadbeat::ObserverConfig cfg;
  cfg.r = deadbeat::min_window_reactor(p);
  cfg.h = cfg.r / 2000;
  const auto tr = deadbeat::simulate_plant(
      spec, deadbeat::InputSignal::none(),
      {10 * cfg.r, cfg.h, Vec({0.9, 0.05}), Vec({325.0})});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        deadbeat::run_observer(spec, cfg, tr, Vec({0.5, 0.5}), Vector()));
  }
}
BENCHMARK(BM_RunObserverReactor)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
