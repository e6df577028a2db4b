#include <benchmark/benchmark.h>

#include "pulsepair/channelizer.hpp"
#include "pulsepair/correlator.hpp"
#include "pulsepair/candidates.hpp"
#include "pulsepair/skysim.hpp"

using namespace pulsepair;

namespace {

SimConfig bench_config(std::size_t fft_len) {
  SimConfig cfg = desk_sim_config();
  cfg.fft_len = fft_len;
  cfg.quantize_bits = 0;
  cfg.seed = 1234;
  return cfg;
}

FrameGenerator bench_generator(const SimConfig& cfg) {
  ObservatoryClock clock;
  return FrameGenerator(cfg, BaselineGeometry{}, {}, {}, clock, Pointing{},
                        60284.0, 1 << 20, 0);
}

}  // namespace

static void BM_GenerateFramePair(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<std::size_t>(state.range(0)));
  auto gen = bench_generator(cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen.generate(i++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_GenerateFramePair)->RangeMultiplier(4)->Range(1 << 14, 1 << 18);

static void BM_Channelize(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<std::size_t>(state.range(0)));
  auto gen = bench_generator(cfg);
  const FramePair fp = gen.generate(0);
  Channelizer chan(cfg.fft_len);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chan.channelize(fp.east));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Channelize)->RangeMultiplier(4)->Range(1 << 14, 1 << 18);

static void BM_FirstLevelFilter(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<std::size_t>(state.range(0)));
  auto gen = bench_generator(cfg);
  const FramePair fp = gen.generate(0);
  Channelizer chan(cfg.fft_len);
  const SpectralFrame east = chan.channelize(fp.east);
  const SpectralFrame west = chan.channelize(fp.west);
  const NotchSet notches;
  for (auto _ : state) {
    SegmentLedger ledger(east.n_segments());
    benchmark::DoNotOptimize(
        first_level_filter(east, west, notches, ledger, 5.25));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FirstLevelFilter)->RangeMultiplier(4)->Range(1 << 14, 1 << 18);

static void BM_CrossCorrelate(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<std::size_t>(state.range(0)));
  auto gen = bench_generator(cfg);
  const FramePair fp = gen.generate(0);
  Channelizer chan(cfg.fft_len);
  const SpectralFrame east = chan.channelize(fp.east);
  const SpectralFrame west = chan.channelize(fp.west);
  Correlator corr(cfg.fft_len);
  for (auto _ : state) {
    benchmark::DoNotOptimize(corr.cross_correlate(east, west));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CrossCorrelate)->RangeMultiplier(4)->Range(1 << 14, 1 << 18);

// Whole detection tick at desk scale: generate + 2x FFT + dual threshold.
static void BM_DetectTick(benchmark::State& state) {
  const auto cfg = bench_config(1 << 18);
  auto gen = bench_generator(cfg);
  Channelizer chan(cfg.fft_len);
  const NotchSet notches;
  SegmentLedger ledger(cfg.fft_len / kBinsPerSegment);
  std::size_t i = 0;
  for (auto _ : state) {
    const FramePair fp = gen.generate(i++);
    const SpectralFrame east = chan.channelize(fp.east);
    const SpectralFrame west = chan.channelize(fp.west);
    benchmark::DoNotOptimize(
        first_level_filter(east, west, notches, ledger, 5.25));
  }
  state.SetItemsProcessed(state.iterations() * cfg.fft_len * 2);
}
BENCHMARK(BM_DetectTick);

BENCHMARK_MAIN();
