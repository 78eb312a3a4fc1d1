#include <benchmark/benchmark.h>

#include "ccnrank/layers.hpp"
#include "ccnrank/ops.hpp"

namespace {

using namespace ccnrank;

Tensor random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t(Shape{rows, cols});
  for (double& v : t.data()) v = rng.uniform(-0.5, 0.5);
  return t;
}

void BM_LstmEncode(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto len = static_cast<std::size_t>(state.range(1));
  Rng rng(1);
  ParameterSet params;
  layers::add_lstm(params, "lstm", n, n, rng);
  const Tensor x = random_matrix(n, len, rng);
  for (auto _ : state) {
    Graph g;
    Var h = layers::lstm_encode(g, g.constant(x), len, layers::lstm_params(g, params, "lstm"));
    benchmark::DoNotOptimize(g.value(h).data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(len));
}
BENCHMARK(BM_LstmEncode)->Args({32, 40})->Args({128, 80})->Args({256, 160});

void BM_LstmEncodeBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto len = static_cast<std::size_t>(state.range(1));
  Rng rng(1);
  ParameterSet params;
  layers::add_lstm(params, "lstm", n, n, rng);
  const Tensor x = random_matrix(n, len, rng);
  for (auto _ : state) {
    Graph g;
    Var h = layers::lstm_encode(g, g.constant(x), len, layers::lstm_params(g, params, "lstm"));
    g.backward(ops::sum(g, h));
  }
  params.zero_grad();
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(len));
}
BENCHMARK(BM_LstmEncodeBackward)->Args({32, 40})->Args({128, 80});

void BM_CrossConvolution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto len = static_cast<std::size_t>(state.range(1));
  const auto k = static_cast<std::size_t>(state.range(2));
  Rng rng(2);
  ParameterSet params;
  params.add("a", Tensor(Shape{k * len}, 0.01));
  params.add("b", Tensor::scalar(0.0));
  const Tensor c = random_matrix(n, len, rng);
  const Tensor r = random_matrix(n, len, rng);
  for (auto _ : state) {
    Graph g;
    layers::CcnParams p{g.param(params, "a"), g.param(params, "b"), k,
                        layers::CcnActivation::kSigmoid, std::nullopt, std::nullopt};
    auto out = layers::cross_convolution(g, g.constant(c), len, g.constant(r), p);
    benchmark::DoNotOptimize(g.value(out.score).item());
  }
}
BENCHMARK(BM_CrossConvolution)->Args({32, 40, 1})->Args({300, 160, 1})->Args({300, 160, 3});

void BM_Kmax(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  Rng rng(3);
  std::vector<double> values(n);
  for (double& v : values) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(layers::kmax(values, k));
}
BENCHMARK(BM_Kmax)->Args({160, 1})->Args({160, 5});

}  // namespace
