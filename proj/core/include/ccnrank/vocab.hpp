#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccnrank/corpus.hpp"

namespace ccnrank {

using TokenId = std::uint32_t;
inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kOovId = 1;
inline constexpr std::size_t kDefaultMaxLength = 160;
inline constexpr std::size_t kDefaultFrequencyThreshold = 5;

/// Token <-> id map with training-set occurrence counts.
///
/// Ids are dense. 0 is padding and 1 stands for every out-of-vocabulary
/// token; real words start at 2 in descending count order, ties broken
/// lexicographically.
class Vocabulary {
 public:
  Vocabulary();
  // Entries in any order; counts must be positive and words unique.
  static Vocabulary from_counts(std::vector<std::pair<std::string, std::size_t>> counts);

  std::size_t size() const noexcept { return words_.size(); }  // V, incl. pad/oov
  std::size_t word_count() const noexcept { return words_.size() - 2; }

  TokenId id(std::string_view token) const;  // kOovId when unknown
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& word(TokenId id) const;
  // Training count n_w; 0 for unknown tokens and the reserved ids.
  std::size_t count(std::string_view token) const;
  std::size_t count(TokenId id) const;

  // `word<TAB>count` per line in id order, starting with id 2.
  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  // Fingerprint of the serialized form; checkpoints record it.
  std::uint64_t hash() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Counts every token of every context and response (both labels).
Vocabulary build_vocab(const std::vector<TrainInstance>& train);

enum class Band { kHigh, kLow };

/// Partition of ids at a count threshold: count > threshold is high,
/// count <= threshold is low. The OOV id belongs to the low band, padding to
/// neither.
class FrequencySplit {
 public:
  FrequencySplit() = default;
  FrequencySplit(const Vocabulary& vocab, std::size_t threshold);

  std::size_t threshold() const noexcept { return threshold_; }
  bool in_band(TokenId id, Band band) const;
  std::vector<TokenId> high() const;
  std::vector<TokenId> low() const;  // real words only

 private:
  std::size_t threshold_ = kDefaultFrequencyThreshold;
  std::vector<std::uint8_t> band_;  // 0 pad, 1 high, 2 low
};

FrequencySplit split_by_frequency(const Vocabulary& vocab, std::size_t threshold);

/// Fixed-length id sequence; positions >= true_length hold kPadId.
struct EncodedSequence {
  std::vector<TokenId> ids;
  std::size_t true_length = 0;

  std::size_t max_length() const noexcept { return ids.size(); }
  friend bool operator==(const EncodedSequence&, const EncodedSequence&) = default;
};

enum class Side { kContext, kResponse };

/// Maps tokens to ids and fixes the length to `max_length`. Over-long
/// contexts keep their last tokens, responses their first.
EncodedSequence encode(const TokenSequence& tokens, const Vocabulary& vocab,
                       std::size_t max_length, Side side);

/// Keeps the ids of one band in order, re-padded to the same length.
EncodedSequence filter_sequence(const EncodedSequence& seq,
                                const FrequencySplit& split, Band band);

/// Token types shared by context and response, ordered by first appearance
/// in the response; markers are excluded.
TokenSequence common_words(const TokenSequence& context,
                           const TokenSequence& response);

/// Sum of 1/n_w over the common word types. Types missing from the count
/// table contribute 1.
double cwf_score(const TokenSequence& context, const TokenSequence& response,
                 const Vocabulary& vocab);

}  // namespace ccnrank
