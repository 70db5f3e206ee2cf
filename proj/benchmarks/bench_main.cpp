#include <benchmark/benchmark.h>

#include "beamsurfer/baselines.hpp"
#include "beamsurfer/channel.hpp"
#include "beamsurfer/engine.hpp"
#include "beamsurfer/scenarios.hpp"

using namespace beamsurfer;

namespace {

LinkBudget calibrated(const BeamCodebook& tx, const BeamCodebook& rx)
{
  LinkBudget b;
  b.tx_power_dbm = calibrate_tx_power(b, tx, rx, 5.0);
  return b;
}

void BM_ComputeRss(benchmark::State& state)
{
  const Environment env = default_scene();
  const BeamCodebook tx = BeamCodebook::narrow(), rx = BeamCodebook::wide();
  const LinkBudget budget = calibrated(tx, rx);
  const MobileState m{{5.0, -0.5}, 175.0, 0.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_rss(env, budget, tx, rx, 12, 12, m, 0.0));
}
BENCHMARK(BM_ComputeRss);

void BM_Snapshot(benchmark::State& state)
{
  const Environment env = default_scene();
  const BeamCodebook tx = BeamCodebook::narrow(), rx = BeamCodebook::wide();
  const LinkBudget budget = calibrated(tx, rx);
  const MobileState m{{5.0, -0.5}, 175.0, 0.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(ChannelSnapshot(env, budget, tx, rx, m, 0.0));
}
BENCHMARK(BM_Snapshot);

// Full 25 x 25 search on a prepared snapshot.
void BM_OracleBestPair(benchmark::State& state)
{
  const Environment env = default_scene();
  const BeamCodebook tx = BeamCodebook::narrow(), rx = BeamCodebook::wide();
  const ChannelSnapshot snap(env, calibrated(tx, rx), tx, rx, {{5.0, -0.5}, 175.0, 0.0}, 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle_best_pair(snap));
}
BENCHMARK(BM_OracleBestPair);

void BM_RunMobility(benchmark::State& state)
{
  const auto mobility = static_cast<Mobility>(state.range(0));
  const ScenarioConfig c = mobility_scenario(mobility, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(run(c));
  state.SetLabel(to_string(mobility));
}
BENCHMARK(BM_RunMobility)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_BlockageTrial(benchmark::State& state)
{
  const ScenarioConfig c = blockage_trial(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(run(c));
}
BENCHMARK(BM_BlockageTrial)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
