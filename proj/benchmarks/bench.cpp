#include <benchmark/benchmark.h>

#include "dcsim/config.hpp"
#include "dcsim/engine.hpp"
#include "dcsim/forecast.hpp"
#include "dcsim/machine.hpp"
#include "dcsim/power_chain.hpp"
#include "dcsim/power_models.hpp"

#include <filesystem>
#include <random>
#include <vector>

namespace {

const std::filesystem::path kScenario =
    std::filesystem::path(DCSIM_SCENARIO_DIR) / "demo" / "scenario.conf";

void bm_eval_power(benchmark::State& state) {
  dcsim::PowerModelSpec model;
  model.kind = static_cast<dcsim::PowerModelKind>(state.range(0));
  model.p_idle_w = 100.0;
  model.p_max_w = 250.0;
  double u = 0.0;
  for (auto _ : state) {
    u += 1e-4;
    if (u > 1.0) u = 0.0;
    benchmark::DoNotOptimize(dcsim::eval_power(model, u));
  }
}
BENCHMARK(bm_eval_power)
    ->Arg(static_cast<int>(dcsim::PowerModelKind::Linear))
    ->Arg(static_cast<int>(dcsim::PowerModelKind::Mse))
    ->Arg(static_cast<int>(dcsim::PowerModelKind::AsymptoticDvfs));

void bm_psu_step(benchmark::State& state) {
  dcsim::PsuSpec psu;
  double p = 0.0;
  for (auto _ : state) {
    p += 3.7;
    if (p > psu.rated_output_w) p = 0.0;
    benchmark::DoNotOptimize(dcsim::psu_step(psu, p, 300.0));
  }
}
BENCHMARK(bm_psu_step);

void bm_maxmin_share(benchmark::State& state) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> d(0.0, 100.0);
  std::vector<double> demands(static_cast<std::size_t>(state.range(0)));
  for (auto& v : demands) v = d(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(dcsim::maxmin_share(25.0 * demands.size(), demands));
}
BENCHMARK(bm_maxmin_share)->Arg(8)->Arg(64)->Arg(512);

void bm_step_host(benchmark::State& state) {
  dcsim::HostState host;
  host.core_count = 8;
  host.max_frequency_mhz = 3000.0;
  host.current_frequency_mhz = 2200.0;
  host.vm_demands_mhz = {4000.0, 2500.0, 1200.0, 5200.0};
  for (auto _ : state) benchmark::DoNotOptimize(dcsim::step_host(host, 300.0));
}
BENCHMARK(bm_step_host);

void bm_synth_forecast(benchmark::State& state) {
  std::vector<double> actual(4096, 42.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(dcsim::synth_forecast(actual, 100.0, 7));
}
BENCHMARK(bm_synth_forecast);

void bm_full_run(benchmark::State& state) {
  auto cfg = dcsim::ScenarioConfig::from_config(dcsim::Config::load(kScenario));
  for (auto _ : state) benchmark::DoNotOptimize(dcsim::run(cfg));
}
BENCHMARK(bm_full_run)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
