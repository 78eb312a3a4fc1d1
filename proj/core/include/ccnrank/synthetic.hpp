#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccnrank/corpus.hpp"

namespace ccnrank {

/// Knobs of the desk-scale dialogue generator.
///
/// Every dialogue belongs to one topic. Topics own disjoint pools of rare
/// keyword tokens and a preferred block of the shared filler vocabulary.
/// Keyword occurrences in the training split are budgeted so that no keyword
/// is counted more than `frequency_threshold` times, which places every
/// keyword in the low-frequency band and every filler above it.
struct SyntheticConfig {
  std::size_t topics = 20;
  std::size_t keywords_per_topic = 200;
  std::size_t filler_vocab_size = 200;
  std::size_t context_turns = 3;
  std::uint64_t seed = 7;  // used by callers that do not pass a seed

  std::size_t frequency_threshold = 5;
  // Probability that a filler slot draws from the topic's preferred block.
  double topic_filler_rate = 0.8;
  std::size_t min_utterance_length = 4;
  std::size_t max_utterance_length = 8;

  void validate() const;  // throws ConfigError
};

// `key = value` lines; '#' starts a comment. Unknown keys are errors.
SyntheticConfig parse_synthetic_config(std::istream& in,
                                       SyntheticConfig base = {});
SyntheticConfig load_synthetic_config(const std::filesystem::path& path,
                                      SyntheticConfig base = {});
std::string format_synthetic_config(const SyntheticConfig& config);

struct SyntheticCorpus {
  std::vector<TrainInstance> train;      // alternating positive / negative
  std::vector<EvalInstance> validation;  // same size as eval
  std::vector<EvalInstance> eval;
};

/// Deterministic given (seed, sizes, config). Each positive train pair and
/// each ground-truth eval candidate shares at least one keyword of the
/// context's topic with the context; negatives and distractors are generated
/// from other topics.
SyntheticCorpus generate_synthetic(std::uint64_t seed, std::size_t n_train,
                                   std::size_t n_eval,
                                   const SyntheticConfig& config = {});

// Keyword token test for the generator's naming scheme.
bool is_synthetic_keyword(std::string_view token) noexcept;

}  // namespace ccnrank
