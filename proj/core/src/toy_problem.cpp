#include "ccnrank/toy_problem.hpp"

#include <string>
#include <utility>

#include "ccnrank/random.hpp"
#include "ccnrank/training.hpp"

namespace ccnrank {
namespace {

std::shared_ptr<const Vocabulary> toy_vocabulary(std::size_t words, std::size_t threshold) {
  std::vector<std::pair<std::string, std::size_t>> counts;
  for (std::size_t i = 0; i < words; ++i) {
    // First half above the threshold, second half at or below it.
    const std::size_t n = i < words / 2 ? threshold + 1 + i : 1 + i % threshold;
    counts.emplace_back("t" + std::to_string(i), n);
  }
  return std::make_shared<const Vocabulary>(Vocabulary::from_counts(std::move(counts)));
}

TokenSequence random_tokens(Rng& rng, std::size_t words, std::size_t n) {
  TokenSequence out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("t" + std::to_string(rng.below(words)));
  return out;
}

}  // namespace

ToyProblem make_toy_problem(const ToyProblemConfig& config) {
  ModelConfig mc;
  mc.architecture = config.architecture;
  mc.ccn_head = config.ccn_head;
  mc.embedding_dim = config.embedding_dim;
  mc.hidden_size = config.hidden_size;
  mc.max_length = config.max_length;
  mc.k = config.k;
  mc.seed = config.seed;
  mc.embedding_init = config.embedding_init;
  mc.weight_init = config.weight_init;
  mc.validate();

  auto vocab = toy_vocabulary(config.word_count, mc.frequency_threshold);
  const Featurizer featurizer(vocab, mc.max_length, mc.frequency_threshold);
  ToyProblem problem{vocab, Model(mc, vocab->size(), vocab->hash()), {}, {}};

  Rng rng(Rng::derive_seed(config.seed, 1));
  const std::size_t len = config.max_length;
  for (std::size_t b = 0; b < config.batch_size; ++b) {
    TokenSequence context = random_tokens(rng, config.word_count, len - 3 + rng.below(4));
    TokenSequence response = random_tokens(rng, config.word_count, len / 2 + rng.below(len / 4));
    // Copy two context words so both common-word sequences are non-trivial.
    response.push_back(context[rng.below(context.size())]);
    response.push_back(context[rng.below(context.size())]);
    problem.inputs.push_back(featurizer(context, response));
    problem.labels.push_back(b % 3 == 2 ? 0 : 1);
  }
  return problem;
}

GradCheckReport check_gradients(ToyProblem& problem, const GradCheckOptions& options) {
  return finite_diff_check(
      [&](Graph& g, ParameterSet&) {
        return batch_loss(g, problem.model, problem.inputs, problem.labels);
      },
      problem.model.parameters(), options);
}

}  // namespace ccnrank
