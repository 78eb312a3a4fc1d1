#include <benchmark/benchmark.h>

#include "ccnrank/evaluation.hpp"
#include "ccnrank/random.hpp"
#include "ccnrank/synthetic.hpp"
#include "ccnrank/training.hpp"

namespace {

using namespace ccnrank;

struct Fixture {
  std::shared_ptr<const Vocabulary> vocab;
  std::unique_ptr<Featurizer> featurizer;
  std::vector<PairFeatures> inputs;
  std::vector<int> labels;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    const auto corpus = generate_synthetic(7, 512, 10);
    out.vocab = std::make_shared<const Vocabulary>(build_vocab(corpus.train));
    out.featurizer = std::make_unique<Featurizer>(out.vocab, 40, kDefaultFrequencyThreshold);
    for (std::size_t i = 0; i < 64; ++i) {
      out.inputs.push_back((*out.featurizer)(corpus.train[i].context, corpus.train[i].response));
      out.labels.push_back(corpus.train[i].label);
    }
    return out;
  }();
  return f;
}

Model make_model(Architecture arch) {
  ModelConfig c;
  c.architecture = arch;
  c.embedding_dim = 32;
  c.hidden_size = 32;
  c.max_length = 40;
  return Model(c, fixture().vocab->size(), fixture().vocab->hash());
}

void BM_Predict(benchmark::State& state) {
  const Model model = make_model(static_cast<Architecture>(state.range(0)));
  const auto& x = fixture().inputs.front();
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(x));
}
BENCHMARK(BM_Predict)->DenseRange(0, 2);

// One optimizer-free training batch of 64 pairs: forward and backward.
void BM_TrainBatch(benchmark::State& state) {
  Model model = make_model(static_cast<Architecture>(state.range(0)));
  const auto& f = fixture();
  for (auto _ : state) {
    for (std::size_t i = 0; i < f.inputs.size(); ++i) {
      Graph g;
      g.backward(squared_error(g, model.forward(g, f.inputs[i]), f.labels[i]));
    }
    model.parameters().zero_grad();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.inputs.size()));
}
BENCHMARK(BM_TrainBatch)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_RankCandidates(benchmark::State& state) {
  Rng rng(4);
  CandidateScores scores{};
  for (double& s : scores) s = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(rank_candidates(scores));
}
BENCHMARK(BM_RankCandidates);

}  // namespace
