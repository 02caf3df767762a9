// Microbenchmarks for the two LCS kernels and the two scorer paths. Run the
// binary directly; `--benchmark_filter=kernel` or `=scorer` narrows it.

#include <benchmark/benchmark.h>

#include <thread>
#include <vector>

#include "logknn/knn_scorer.hpp"
#include "logknn/lcs_kernel.hpp"
#include "logknn/synthgen.hpp"

namespace {

using logknn::Symbol;

constexpr std::size_t kAlphabet = 39;  // incident-log sized

std::vector<Symbol> random_sequence(logknn::Rng& rng, std::size_t len) {
  std::vector<Symbol> seq(len);
  for (auto& s : seq) s = static_cast<Symbol>(rng.uniform(kAlphabet));
  return seq;
}

void kernel_dp(benchmark::State& state) {
  logknn::Rng rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = random_sequence(rng, len);
  const auto b = random_sequence(rng, len);
  for (auto _ : state) benchmark::DoNotOptimize(logknn::lcs_length_dp(a, b));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(len * len));
}
BENCHMARK(kernel_dp)->Arg(16)->Arg(64)->Arg(256);

void kernel_bitparallel(benchmark::State& state) {
  logknn::Rng rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = random_sequence(rng, len);
  const auto b = random_sequence(rng, len);
  for (auto _ : state)
    benchmark::DoNotOptimize(logknn::lcs_length_bitparallel(a, b, kAlphabet));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(len * len));
}
BENCHMARK(kernel_bitparallel)->Arg(16)->Arg(64)->Arg(256);

// Mask construction amortized across many comparisons, the scorer's pattern.
void kernel_bitparallel_reused(benchmark::State& state) {
  logknn::Rng rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = random_sequence(rng, len);
  const auto b = random_sequence(rng, len);
  const logknn::MatchMasks masks(a, kAlphabet);
  for (auto _ : state) benchmark::DoNotOptimize(masks.lcs_with(b));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(len * len));
}
BENCHMARK(kernel_bitparallel_reused)->Arg(16)->Arg(64)->Arg(256);

logknn::SequenceCorpus bench_corpus(std::size_t n) {
  logknn::SynthSpec spec;
  spec.alphabet_size = kAlphabet;
  spec.seed = 7;
  spec.noise_prob = 0.08;
  spec.normal_variants = {
      {{0, 1, 2, 3, 4, 5, 6, 7}, 3.0},
      {{0, 1, 2, 8, 9, 4, 5, 6, 7, 10}, 2.0},
      {{0, 1, 2, 3, 11, 12, 4, 5, 6, 7, 13, 14, 15, 16}, 2.0},
      {{17, 18, 19, 0, 1, 2, 3, 4, 5, 6, 7, 20, 21, 22, 23, 24}, 1.0},
  };
  auto result = logknn::generate(spec, n);
  return logknn::build_corpus(result.cases);
}

void scorer_reference(benchmark::State& state) {
  const auto corpus = bench_corpus(static_cast<std::size_t>(state.range(0)));
  logknn::KnnConfig config;
  config.k = 25;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        logknn::score_corpus_reference(corpus, config, logknn::KernelBackend::bit_parallel));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(scorer_reference)->Arg(400)->Unit(benchmark::kMillisecond);

void scorer_dedup(benchmark::State& state) {
  const auto corpus = bench_corpus(static_cast<std::size_t>(state.range(0)));
  logknn::KnnConfig config;
  config.k = 25;
  logknn::ScoringOptions options;
  options.threads = static_cast<int>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        logknn::score_corpus(corpus, config, logknn::KernelBackend::bit_parallel, options));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(scorer_dedup)
    ->Args({400, 1})
    ->Args({2000, 1})
    ->Args({2000, static_cast<std::int64_t>(std::thread::hardware_concurrency())})
    ->Args({8000, static_cast<std::int64_t>(std::thread::hardware_concurrency())})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
