#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ccnrank/autodiff.hpp"
#include "ccnrank/corpus.hpp"
#include "ccnrank/vocab.hpp"

namespace ccnrank {

enum class Architecture { kDualLstm, kMfcwLstm, kCcnLstm };

std::string_view architecture_name(Architecture arch) noexcept;
// Throws ConfigError listing the valid names.
Architecture parse_architecture(std::string_view name);

enum class CcnHead {
  kSigmoid,        // single dense head
  kLinearSigmoid,  // parallel linear and sigmoid heads, scores summed
};

std::string_view ccn_head_name(CcnHead head) noexcept;
CcnHead parse_ccn_head(std::string_view name);

struct ModelConfig {
  Architecture architecture = Architecture::kDualLstm;
  std::size_t embedding_dim = 300;
  std::size_t hidden_size = 256;
  std::size_t max_length = kDefaultMaxLength;
  std::size_t k = 1;
  std::size_t frequency_threshold = kDefaultFrequencyThreshold;
  std::uint64_t seed = 0;
  std::string precision = "f64";
  CcnHead ccn_head = CcnHead::kSigmoid;
  // Initialization ranges; scale of the uniform draws.
  double embedding_init = 0.1;
  double weight_init = 0.08;

  void validate() const;  // throws ConfigError
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Band-filtered id sequences for one (context, response) pair. Every model
/// reads the subset it needs.
struct PairFeatures {
  EncodedSequence context_high;
  EncodedSequence response_high;
  EncodedSequence context_low;
  EncodedSequence response_low;
  EncodedSequence common_high;
  EncodedSequence common_low;
};

/// Turns token sequences into PairFeatures for one vocabulary, length and
/// frequency threshold.
class Featurizer {
 public:
  Featurizer(std::shared_ptr<const Vocabulary> vocab, std::size_t max_length,
             std::size_t threshold);

  PairFeatures operator()(const TokenSequence& context,
                          const TokenSequence& response) const;

  const Vocabulary& vocabulary() const noexcept { return *vocab_; }
  const FrequencySplit& split() const noexcept { return split_; }
  std::size_t max_length() const noexcept { return max_length_; }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  FrequencySplit split_;
  std::size_t max_length_;
};

/// One of the three ranking architectures with its parameters.
///
/// Parameter groups by architecture (names in the checkpoint manifest):
///   dual_lstm  emb_high, lstm_high.{W,U,b}, M_high
///   mfcw_lstm  emb_high, emb_low, lstm_high, lstm_low, lstm_common_high,
///              lstm_common_low, M_high, M_low, d_high, d_low, alpha[4]
///   ccn_lstm   emb_high, emb_ccn, lstm_high, M_high, ccn.a, ccn.b,
///              (ccn.a2, ccn.b2), alpha[2]
/// Context and response always share one encoder per band, so tied weights
/// are the same parameter entries.
class Model {
 public:
  Model(ModelConfig config, std::size_t vocab_size, std::uint64_t vocab_hash);

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t vocabulary_size() const noexcept { return vocab_size_; }
  std::uint64_t vocabulary_hash() const noexcept { return vocab_hash_; }
  ParameterSet& parameters() noexcept { return params_; }
  const ParameterSet& parameters() const noexcept { return params_; }

  // Probability that the response is correct, recorded on `g` so that
  // backward() reaches this model's parameters.
  Var forward(Graph& g, const PairFeatures& x);
  // Inference only; safe to call concurrently.
  double predict(const PairFeatures& x) const;

  // Fills the high-frequency table from a pretrained vector file; returns
  // the number of rows covered.
  std::size_t load_pretrained(const std::filesystem::path& path,
                              const Featurizer& featurizer);

 private:
  ModelConfig config_;
  std::size_t vocab_size_;
  std::uint64_t vocab_hash_;
  ParameterSet params_;
};

// Architecture-specific entry points; each throws ContractError when the
// model has a different architecture.
Var dual_forward(Graph& g, Model& model, const PairFeatures& x);
Var mfcw_forward(Graph& g, Model& model, const PairFeatures& x);
Var ccn_lstm_forward(Graph& g, Model& model, const PairFeatures& x);

/// Checkpoint layout: 8-byte magic "CCNRANK1", u32 little-endian header
/// length, UTF-8 JSON header (format version, config, vocabulary hash and
/// size, dtype, ordered parameter manifest), then each parameter as
/// little-endian IEEE-754 doubles in manifest order, row-major.
inline constexpr std::string_view kCheckpointMagic = "CCNRANK1";
inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const Model& model, const std::filesystem::path& path);
void write_checkpoint(const Model& model, std::ostream& out);
Model load_checkpoint(const std::filesystem::path& path);
Model read_checkpoint(std::istream& in);

}  // namespace ccnrank
