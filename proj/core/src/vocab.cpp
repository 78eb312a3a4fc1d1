#include "ccnrank/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "ccnrank/errors.hpp"
#include "ccnrank/hash.hpp"

namespace ccnrank {

Vocabulary::Vocabulary() : words_{"<pad>", "<oov>"}, counts_{0, 0} {}

Vocabulary Vocabulary::from_counts(
    std::vector<std::pair<std::string, std::size_t>> counts) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  for (auto& [word, n] : counts) {
    if (n == 0) throw ContractError("vocabulary count for '" + word + "' must be positive");
    if (word.empty()) throw ContractError("vocabulary words must be non-empty");
    const auto id = static_cast<TokenId>(v.words_.size());
    if (!v.index_.emplace(word, id).second) {
      throw ContractError("duplicate vocabulary word '" + word + "'");
    }
    v.words_.push_back(std::move(word));
    v.counts_.push_back(n);
  }
  return v;
}

TokenId Vocabulary::id(std::string_view token) const {
  return find(token).value_or(kOovId);
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::word(TokenId id) const {
  if (id >= words_.size()) {
    throw ContractError("token id " + std::to_string(id) + " out of range");
  }
  return words_[id];
}

std::size_t Vocabulary::count(std::string_view token) const {
  auto id = find(token);
  return id ? counts_[*id] : 0;
}

std::size_t Vocabulary::count(TokenId id) const {
  return id < counts_.size() ? counts_[id] : 0;
}

void Vocabulary::write(std::ostream& out) const {
  for (std::size_t i = 2; i < words_.size(); ++i) {
    out << words_[i] << '\t' << counts_[i] << '\n';
  }
}

Vocabulary Vocabulary::read(std::istream& in) {
  std::vector<std::pair<std::string, std::size_t>> entries;
  std::string line;
  std::size_t line_no = 0;
  std::size_t previous = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError("vocabulary line " + std::to_string(line_no) +
                       ": expected word<TAB>count");
    }
    std::size_t n = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc() || ptr != last || n == 0) {
      throw ParseError("vocabulary line " + std::to_string(line_no) +
                       ": invalid count");
    }
    if (!entries.empty() && n > previous) {
      throw ParseError("vocabulary line " + std::to_string(line_no) +
                       ": counts must be non-increasing in id order");
    }
    previous = n;
    entries.emplace_back(line.substr(0, tab), n);
  }
  Vocabulary v = from_counts(entries);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (v.words_[i + 2] != entries[i].first) {
      throw ParseError("vocabulary line order does not match id order at '" +
                       entries[i].first + "'");
    }
  }
  return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write(out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read(in);
}

std::uint64_t Vocabulary::hash() const {
  std::ostringstream os;
  write(os);
  return fnv1a64(os.str());
}

Vocabulary build_vocab(const std::vector<TrainInstance>& train) {
  if (train.empty()) throw ContractError("build_vocab: empty training set");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& x : train) {
    for (const auto& t : x.context) ++counts[t];
    for (const auto& t : x.response) ++counts[t];
  }
  return Vocabulary::from_counts({counts.begin(), counts.end()});
}

FrequencySplit::FrequencySplit(const Vocabulary& vocab, std::size_t threshold)
    : threshold_(threshold), band_(vocab.size(), 2) {
  band_[kPadId] = 0;
  band_[kOovId] = 2;
  for (std::size_t id = 2; id < vocab.size(); ++id) {
    band_[id] = vocab.count(static_cast<TokenId>(id)) > threshold ? 1 : 2;
  }
}

bool FrequencySplit::in_band(TokenId id, Band band) const {
  if (id >= band_.size()) {
    throw ContractError("token id " + std::to_string(id) +
                        " outside the frequency split");
  }
  return band_[id] == (band == Band::kHigh ? 1 : 2);
}

std::vector<TokenId> FrequencySplit::high() const {
  std::vector<TokenId> out;
  for (std::size_t id = 2; id < band_.size(); ++id)
    if (band_[id] == 1) out.push_back(static_cast<TokenId>(id));
  return out;
}

std::vector<TokenId> FrequencySplit::low() const {
  std::vector<TokenId> out;
  for (std::size_t id = 2; id < band_.size(); ++id)
    if (band_[id] == 2) out.push_back(static_cast<TokenId>(id));
  return out;
}

FrequencySplit split_by_frequency(const Vocabulary& vocab, std::size_t threshold) {
  return FrequencySplit(vocab, threshold);
}

EncodedSequence encode(const TokenSequence& tokens, const Vocabulary& vocab,
                       std::size_t max_length, Side side) {
  if (max_length == 0) throw ContractError("encode: max_length must be >= 1");
  const std::size_t n = std::min(tokens.size(), max_length);
  const std::size_t offset =
      side == Side::kContext ? tokens.size() - n : 0;
  EncodedSequence out;
  out.ids.assign(max_length, kPadId);
  out.true_length = n;
  for (std::size_t i = 0; i < n; ++i) out.ids[i] = vocab.id(tokens[offset + i]);
  return out;
}

EncodedSequence filter_sequence(const EncodedSequence& seq,
                                const FrequencySplit& split, Band band) {
  EncodedSequence out;
  out.ids.assign(seq.ids.size(), kPadId);
  std::size_t n = 0;
  for (std::size_t i = 0; i < seq.true_length; ++i) {
    const TokenId id = seq.ids[i];
    if (id != kPadId && split.in_band(id, band)) out.ids[n++] = id;
  }
  out.true_length = n;
  return out;
}

TokenSequence common_words(const TokenSequence& context,
                           const TokenSequence& response) {
  std::unordered_set<std::string_view> in_context;
  for (const auto& t : context) {
    if (!is_marker(t)) in_context.insert(t);
  }
  std::unordered_set<std::string_view> emitted;
  TokenSequence out;
  for (const auto& t : response) {
    if (in_context.count(t) && emitted.insert(t).second) out.push_back(t);
  }
  return out;
}

double cwf_score(const TokenSequence& context, const TokenSequence& response,
                 const Vocabulary& vocab) {
  double score = 0.0;
  for (const auto& w : common_words(context, response)) {
    const std::size_t n = vocab.count(w);
    score += 1.0 / static_cast<double>(n == 0 ? 1 : n);
  }
  return score;
}

}  // namespace ccnrank
