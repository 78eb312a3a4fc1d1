#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ccnrank {

// Tokens are non-empty and contain no whitespace.
using TokenSequence = std::vector<std::string>;

inline constexpr std::string_view kEndOfUtterance = "__eou__";
inline constexpr std::string_view kEndOfTurn = "__eot__";
inline constexpr std::size_t kCandidatesPerInstance = 10;

struct TrainInstance {
  TokenSequence context;
  TokenSequence response;
  int label = 0;  // 0 or 1

  friend bool operator==(const TrainInstance&, const TrainInstance&) = default;
};

/// A context with ten candidates; candidates[0] is the ground truth.
struct EvalInstance {
  TokenSequence context;
  std::array<TokenSequence, kCandidatesPerInstance> candidates;

  friend bool operator==(const EvalInstance&, const EvalInstance&) = default;
};

/// Rule-based tokenizer:
///  - ASCII letters are lowercased, other bytes pass through unchanged;
///  - text is split on whitespace;
///  - leading and trailing ASCII punctuation (except '_') is detached, one
///    token per character;
///  - tag tokens of the form __name__ (including __eou__ / __eot__) are kept
///    whole.
TokenSequence tokenize(std::string_view text);

// Space-joined form; tokenize(join_tokens(tokenize(x))) == tokenize(x).
std::string join_tokens(const TokenSequence& tokens);

bool is_marker(std::string_view token) noexcept;

// Train CSV: header `Context,Utterance,Label`, Label literal 0 or 1.
std::vector<TrainInstance> read_train(std::istream& in);
std::vector<TrainInstance> load_train(const std::filesystem::path& path);
void write_train(std::ostream& out, const std::vector<TrainInstance>& data);
void save_train(const std::filesystem::path& path,
                const std::vector<TrainInstance>& data);

// Eval CSV: header `Context,Ground Truth Utterance,Distractor_0..Distractor_8`.
std::vector<EvalInstance> read_eval(std::istream& in);
std::vector<EvalInstance> load_eval(const std::filesystem::path& path);
void write_eval(std::ostream& out, const std::vector<EvalInstance>& data);
void save_eval(const std::filesystem::path& path,
               const std::vector<EvalInstance>& data);

}  // namespace ccnrank
