#include <benchmark/benchmark.h>

#include <random>

#include "neuropath/architecture.hpp"
#include "neuropath/localization.hpp"
#include "neuropath/synthesis.hpp"

using namespace neuropath;

namespace {

std::vector<double> random_input(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(0, 1);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

const Network& mnist3() {
  static const Network net = build_network({1, 28, 28}, reference_architecture("MNIST_3"), 0);
  return net;
}

void BM_Forward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto x = random_input(rng, 784);
  for (auto _ : state) benchmark::DoNotOptimize(forward(mnist3(), x));
}
BENCHMARK(BM_Forward);

void BM_InputGradient(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto x = random_input(rng, 784);
  const std::vector<ObjectiveTerm> terms{{0, 3, -1}, {2, 5, -1}, {6, 1, -1}};
  for (auto _ : state) benchmark::DoNotOptimize(input_gradient(mnist3(), x, terms));
}
BENCHMARK(BM_InputGradient);

void BM_Relevance(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto trace = forward(mnist3(), random_input(rng, 784));
  for (auto _ : state)
    benchmark::DoNotOptimize(propagate_relevance(mnist3(), trace, trace.predicted_class));
}
BENCHMARK(BM_Relevance);

void BM_AccumulateSpectrum(benchmark::State& state) {
  std::mt19937_64 rng(4);
  Dataset data("bench", {1, 28, 28});
  for (int i = 0; i < state.range(0); ++i) data.add(random_input(rng, 784), i % 10);
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_spectrum(mnist3(), data, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AccumulateSpectrum)->Arg(256);

void BM_SynthesizeMga(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto x = random_input(rng, 784);
  const std::size_t label = predict(mnist3(), x).predicted_class;
  LayerScores scores;
  scores.layers = mnist3().hidden_layers();
  for (auto l : scores.layers) scores.per_layer.push_back(random_input(rng, mnist3().layer(l).out_size()));
  const auto targets = rank_top_k(scores, 5, SelectionMode::pathway);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(mnist3(), x, label, targets, {}));
}
BENCHMARK(BM_SynthesizeMga);

}  // namespace
BENCHMARK_MAIN();
