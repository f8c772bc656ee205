// Serial-reference vs OpenMP kernel benchmarks.
//
//   cmake --build build --target uloop_bench && ./build/bench/uloop_bench
//
// The "_Omp/1" rows pin the kernels to one thread, "_Omp/0" uses every
// hardware thread, and the "_Reference" rows run the long-double scalar
// implementations the tests validate against.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <vector>

#include <omp.h>

#include "uloop/calibration.hpp"
#include "uloop/metrics.hpp"
#include "uloop/reference.hpp"
#include "uloop/simulator.hpp"
#include "uloop/types.hpp"

namespace {

void set_threads(benchmark::State& state) {
  const auto requested = static_cast<int>(state.range(0));
  omp_set_num_threads(requested == 0 ? omp_get_num_procs() : requested);
}

std::vector<uloop::TokenObservation> make_stream(std::size_t length, int k) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-5.0, 0.0);
  std::vector<uloop::TokenObservation> stream;
  stream.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<double> logprobs(static_cast<std::size_t>(k));
    for (auto& lp : logprobs) lp = dist(rng);
    std::sort(logprobs.begin(), logprobs.end(), std::greater<>());
    uloop::TokenObservation token;
    token.position = i;
    token.text = "t" + std::to_string(i);
    token.logprob = logprobs[0];
    for (int j = 0; j < k; ++j) {
      token.alternatives.push_back(
          {j == 0 ? token.text : token.text + "~" + std::to_string(j),
           logprobs[static_cast<std::size_t>(j)]});
    }
    stream.push_back(std::move(token));
  }
  return stream;
}

const std::vector<uloop::TokenObservation>& stream_50k() {
  static const auto stream = make_stream(50000, 5);
  return stream;
}

std::vector<double> make_entropies(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 1.609);
  std::vector<double> values(n);
  for (auto& v : values) v = dist(rng);
  return values;
}

}  // namespace

static void BM_SequenceMetrics_Reference(benchmark::State& state) {
  const auto& stream = stream_50k();
  for (auto _ : state) {
    auto m = uloop::reference::sequence_metrics(stream);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(stream.size()));
}
BENCHMARK(BM_SequenceMetrics_Reference)->Unit(benchmark::kMillisecond);

static void BM_SequenceMetrics_Omp(benchmark::State& state) {
  const auto& stream = stream_50k();
  set_threads(state);
  for (auto _ : state) {
    auto m = uloop::metrics::sequence_metrics(stream);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(stream.size()));
}
BENCHMARK(BM_SequenceMetrics_Omp)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

static void BM_EntropyHistogram_Reference(benchmark::State& state) {
  const auto values = make_entropies(1000000);
  for (auto _ : state) {
    auto counts = uloop::reference::histogram_counts(values, 0.1, 17);
    benchmark::DoNotOptimize(counts);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(values.size()));
}
BENCHMARK(BM_EntropyHistogram_Reference)->Unit(benchmark::kMillisecond);

static void BM_EntropyHistogram_Omp(benchmark::State& state) {
  const auto values = make_entropies(1000000);
  set_threads(state);
  for (auto _ : state) {
    auto hist = uloop::calibration::entropy_histogram(values, 0.1);
    benchmark::DoNotOptimize(hist);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(values.size()));
}
BENCHMARK(BM_EntropyHistogram_Omp)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

static void BM_SampleStream_Omp(benchmark::State& state) {
  const auto profile = uloop::simulator::bimodal_profile(50000, 42);
  set_threads(state);
  for (auto _ : state) {
    auto stream = uloop::simulator::sample_stream(profile);
    benchmark::DoNotOptimize(stream);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 50000);
}
BENCHMARK(BM_SampleStream_Omp)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
