#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccnrank/autodiff.hpp"
#include "ccnrank/random.hpp"
#include "ccnrank/vocab.hpp"

namespace ccnrank::layers {

// Gate blocks of the LSTM weight matrices, top to bottom.
enum LstmGate : std::size_t { kInputGate = 0, kForgetGate, kCellGate, kOutputGate };

struct LstmParams {
  Var input_weights;      // [4H x N]
  Var recurrent_weights;  // [4H x H]
  Var bias;               // [4H]
};

enum class CcnActivation { kSigmoid, kLinear };

struct CcnParams {
  Var weights;  // a: [k * L]
  Var bias;     // b: scalar
  std::size_t k = 1;
  CcnActivation activation = CcnActivation::kSigmoid;
  // Optional parallel sigmoid head (a', b'); its output enters the score as
  // sigmoid(a'.x + b') - 1/2 so that zero parameters stay neutral.
  std::optional<Var> parallel_weights;
  std::optional<Var> parallel_bias;
};

struct BilinearParams {
  Var m;  // [H x H]
};

struct DenseScorerParams {
  Var d;  // [H]
};

struct CcnOutput {
  Var score;        // s3
  Var probability;  // f(s3)
};

// --- parameter creation -----------------------------------------------------

/// V x N table, uniform in [-scale, scale]; row 0 (padding) is zero.
void add_embedding(ParameterSet& params, const std::string& name,
                   std::size_t vocab_size, std::size_t dim, Rng& rng,
                   double scale = 0.1);
/// Weights uniform in [-scale, scale]; forget-gate bias 1, other biases 0.
void add_lstm(ParameterSet& params, const std::string& prefix,
              std::size_t input_dim, std::size_t hidden, Rng& rng,
              double scale = 0.08);
LstmParams lstm_params(Graph& g, ParameterSet& params, const std::string& prefix);

/// Overwrites rows of `table` for words found in a `word v1 ... vN` text
/// file. Only ids accepted by `accept` are touched. Returns rows filled.
std::size_t load_pretrained_embeddings(const std::filesystem::path& path,
                                       const Vocabulary& vocab, Tensor& table,
                                       const std::function<bool(TokenId)>& accept);

// --- forward operations -----------------------------------------------------

/// Column i of the [N x L] result is row ids[i] of the table. Padding ids
/// give zero columns and never receive gradient.
Var embed_lookup(Graph& g, Var table, const EncodedSequence& ids);

/// Runs the recurrence over the first `true_length` columns of X [N x L] and
/// returns the final hidden state [H]; zero when true_length is 0.
///   z = W x_t + U h_{t-1} + b;  i,f,o = sigmoid, g = tanh
///   c_t = f*c_{t-1} + i*g;      h_t = o*tanh(c_t)
Var lstm_encode(Graph& g, Var x, std::size_t true_length, const LstmParams& p);

Var bilinear_score(Graph& g, Var c, Var r, const BilinearParams& p);  // c^T M r
Var dense_score(Graph& g, Var h, const DenseScorerParams& p);         // d^T h

/// k largest values in descending order; ties keep the earlier position.
/// Slots beyond values.size() are 0.
std::vector<double> kmax(std::span<const double> values, std::size_t k);
// Positions selected by kmax (at most k of them).
std::vector<std::size_t> kmax_positions(std::span<const double> values,
                                        std::size_t k);

/// Row-wise k-max over the first `valid_cols` columns of S [rows x cols],
/// concatenated row by row into a [rows * k] vector.
Var kmax_pool_rows(Graph& g, Var s, std::size_t valid_cols, std::size_t k);

/// Cross convolution of context C [N x L] with response R [N x L]:
/// S = R^T C, per-response-word k-max over the real context positions,
/// then s3 = a . pooled + b and p3 = f(s3). Throws ConfigError if k > L.
CcnOutput cross_convolution(Graph& g, Var context, std::size_t context_length,
                            Var response, const CcnParams& p);

}  // namespace ccnrank::layers
