#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ccnrank/gradcheck.hpp"
#include "ccnrank/models.hpp"

namespace ccnrank {

/// Small random batch for gradient verification.
///
/// The default sizes give V = 50 with half of the words above the frequency
/// threshold. Initialization ranges default to 1 because the standard ranges
/// leave many gradients below 1e-8, where central differences are dominated
/// by rounding and the relative error stops being informative.
struct ToyProblemConfig {
  Architecture architecture = Architecture::kDualLstm;
  CcnHead ccn_head = CcnHead::kSigmoid;
  std::size_t embedding_dim = 8;
  std::size_t hidden_size = 8;
  std::size_t max_length = 12;
  std::size_t word_count = 48;
  std::size_t batch_size = 4;
  std::size_t k = 2;
  // Seeds whose batch contains a gradient below ~3e-8 fail the relative
  // check through rounding alone; this one is well conditioned for all heads.
  std::uint64_t seed = 1;
  double embedding_init = 1.0;
  double weight_init = 1.0;
};

struct ToyProblem {
  std::shared_ptr<const Vocabulary> vocab;
  Model model;
  std::vector<PairFeatures> inputs;
  std::vector<int> labels;
};

ToyProblem make_toy_problem(const ToyProblemConfig& config);

/// Finite-difference check of the mean batch loss over every parameter.
GradCheckReport check_gradients(ToyProblem& problem, const GradCheckOptions& options);

}  // namespace ccnrank
