#include "ccnrank/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ccnrank/errors.hpp"
#include "ccnrank/random.hpp"

namespace ccnrank {
namespace {

enum Stream : std::uint64_t { kTrainStream = 1, kValidationStream, kEvalStream };

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      out = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': invalid number '" + value + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw ConfigError("config key '" + key + "': invalid integer '" + value + "'");
    }
  }
  return out;
}

class Generator {
 public:
  explicit Generator(const SyntheticConfig& config)
      : config_(config),
        keyword_counts_(config.topics,
                        std::vector<std::size_t>(config.keywords_per_topic, 0)) {}

  std::vector<TrainInstance> train(Rng& rng, std::size_t n) {
    std::vector<TrainInstance> out;
    out.reserve(n);
    while (out.size() < n) {
      const std::size_t topic = rng.below(config_.topics);
      // Context is counted twice (positive and negative row), response once.
      const std::size_t anchor = budgeted_keyword(rng, topic, 3);
      TokenSequence context = make_context(rng, topic, anchor);
      out.push_back({context, make_response(rng, topic, anchor), 1});
      if (out.size() == n) break;
      const std::size_t other = other_topic(rng, topic);
      const std::size_t kw = budgeted_keyword(rng, other, 1);
      out.push_back({std::move(context), make_response(rng, other, kw), 0});
    }
    return out;
  }

  std::vector<EvalInstance> eval(Rng& rng, std::size_t n) {
    std::vector<EvalInstance> out(n);
    for (auto& x : out) {
      const std::size_t topic = rng.below(config_.topics);
      const std::size_t anchor = rng.below(config_.keywords_per_topic);
      x.context = make_context(rng, topic, anchor);
      x.candidates[0] = make_response(rng, topic, anchor);
      for (std::size_t i = 1; i < kCandidatesPerInstance; ++i) {
        const std::size_t other = other_topic(rng, topic);
        x.candidates[i] =
            make_response(rng, other, rng.below(config_.keywords_per_topic));
      }
    }
    return out;
  }

 private:
  static std::string keyword_token(std::size_t topic, std::size_t index) {
    return "k" + std::to_string(topic) + "x" + std::to_string(index);
  }

  std::string filler(Rng& rng, std::size_t topic) {
    const std::size_t f = config_.filler_vocab_size;
    std::size_t id;
    if (rng.bernoulli(config_.topic_filler_rate)) {
      const std::size_t lo = topic * f / config_.topics;
      const std::size_t hi = (topic + 1) * f / config_.topics;
      id = lo + rng.below(hi - lo);
    } else {
      id = rng.below(f);
    }
    return "w" + std::to_string(id);
  }

  std::size_t other_topic(Rng& rng, std::size_t topic) {
    const std::size_t pick = rng.below(config_.topics - 1);
    return pick < topic ? pick : pick + 1;
  }

  // Least-used keyword of the topic that still has `cost` occurrences of
  // budget left; the scan starts at a random offset to spread ties.
  std::size_t budgeted_keyword(Rng& rng, std::size_t topic, std::size_t cost) {
    auto& counts = keyword_counts_[topic];
    const std::size_t k = counts.size();
    const std::size_t start = rng.below(k);
    std::size_t best = k;
    for (std::size_t step = 0; step < k; ++step) {
      const std::size_t j = (start + step) % k;
      if (best == k || counts[j] < counts[best]) best = j;
    }
    if (counts[best] + cost > config_.frequency_threshold) {
      throw ConfigError("keyword budget exhausted for topic " +
                        std::to_string(topic) +
                        "; increase keywords_per_topic or reduce n_train");
    }
    counts[best] += cost;
    return best;
  }

  TokenSequence utterance(Rng& rng, std::size_t topic) {
    const std::size_t span =
        config_.max_utterance_length - config_.min_utterance_length + 1;
    const std::size_t len = config_.min_utterance_length + rng.below(span);
    TokenSequence u;
    for (std::size_t i = 0; i < len; ++i) u.push_back(filler(rng, topic));
    return u;
  }

  TokenSequence make_context(Rng& rng, std::size_t topic, std::size_t anchor) {
    std::vector<TokenSequence> utterances;
    std::vector<bool> ends_turn;
    for (std::size_t t = 0; t < config_.context_turns; ++t) {
      const std::size_t n = 1 + rng.below(2);
      for (std::size_t i = 0; i < n; ++i) {
        utterances.push_back(utterance(rng, topic));
        ends_turn.push_back(i + 1 == n);
      }
    }
    auto& host = utterances[rng.below(utterances.size())];
    host.insert(host.begin() + static_cast<std::ptrdiff_t>(rng.below(host.size() + 1)),
                keyword_token(topic, anchor));
    TokenSequence context;
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      context.insert(context.end(), utterances[i].begin(), utterances[i].end());
      context.emplace_back(kEndOfUtterance);
      if (ends_turn[i]) context.emplace_back(kEndOfTurn);
    }
    return context;
  }

  TokenSequence make_response(Rng& rng, std::size_t topic, std::size_t keyword) {
    TokenSequence r = utterance(rng, topic);
    r.insert(r.begin() + static_cast<std::ptrdiff_t>(rng.below(r.size() + 1)),
             keyword_token(topic, keyword));
    r.emplace_back(kEndOfUtterance);
    return r;
  }

  const SyntheticConfig& config_;
  std::vector<std::vector<std::size_t>> keyword_counts_;
};

}  // namespace

void SyntheticConfig::validate() const {
  if (topics == 0) throw ConfigError("synthetic config: topics must be positive");
  if (topics < 2) {
    throw ConfigError("synthetic config: at least 2 topics are needed to draw negatives");
  }
  if (keywords_per_topic == 0) {
    throw ConfigError("synthetic config: keywords_per_topic must be positive");
  }
  if (filler_vocab_size < topics) {
    throw ConfigError("synthetic config: filler_vocab_size must be >= topics");
  }
  if (context_turns == 0) {
    throw ConfigError("synthetic config: context_turns must be positive");
  }
  if (min_utterance_length == 0 || min_utterance_length > max_utterance_length) {
    throw ConfigError("synthetic config: need 1 <= min_utterance_length <= max_utterance_length");
  }
  if (!(topic_filler_rate >= 0.0 && topic_filler_rate <= 1.0)) {
    throw ConfigError("synthetic config: topic_filler_rate must lie in [0, 1]");
  }
  if (frequency_threshold < 3) {
    throw ConfigError("synthetic config: frequency_threshold must be >= 3 "
                      "(a shared keyword occurs three times per dialogue)");
  }
}

SyntheticConfig parse_synthetic_config(std::istream& in, SyntheticConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key == "topics") {
      base.topics = parse_number<std::size_t>(key, value);
    } else if (key == "keywords_per_topic") {
      base.keywords_per_topic = parse_number<std::size_t>(key, value);
    } else if (key == "filler_vocab_size") {
      base.filler_vocab_size = parse_number<std::size_t>(key, value);
    } else if (key == "context_turns") {
      base.context_turns = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      base.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "frequency_threshold") {
      base.frequency_threshold = parse_number<std::size_t>(key, value);
    } else if (key == "topic_filler_rate") {
      base.topic_filler_rate = parse_number<double>(key, value);
    } else if (key == "min_utterance_length") {
      base.min_utterance_length = parse_number<std::size_t>(key, value);
    } else if (key == "max_utterance_length") {
      base.max_utterance_length = parse_number<std::size_t>(key, value);
    } else {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }
  return base;
}

SyntheticConfig load_synthetic_config(const std::filesystem::path& path,
                                      SyntheticConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse_synthetic_config(in, base);
}

std::string format_synthetic_config(const SyntheticConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "topics = " << c.topics << '\n'
     << "keywords_per_topic = " << c.keywords_per_topic << '\n'
     << "filler_vocab_size = " << c.filler_vocab_size << '\n'
     << "context_turns = " << c.context_turns << '\n'
     << "seed = " << c.seed << '\n'
     << "frequency_threshold = " << c.frequency_threshold << '\n'
     << "topic_filler_rate = " << c.topic_filler_rate << '\n'
     << "min_utterance_length = " << c.min_utterance_length << '\n'
     << "max_utterance_length = " << c.max_utterance_length << '\n';
  return os.str();
}

SyntheticCorpus generate_synthetic(std::uint64_t seed, std::size_t n_train,
                                   std::size_t n_eval,
                                   const SyntheticConfig& config) {
  if (n_train == 0 || n_eval == 0) {
    throw ConfigError("generate_synthetic: n_train and n_eval must be positive");
  }
  config.validate();
  Generator gen(config);
  SyntheticCorpus corpus;
  Rng train_rng(Rng::derive_seed(seed, kTrainStream));
  corpus.train = gen.train(train_rng, n_train);
  Rng val_rng(Rng::derive_seed(seed, kValidationStream));
  corpus.validation = gen.eval(val_rng, n_eval);
  Rng eval_rng(Rng::derive_seed(seed, kEvalStream));
  corpus.eval = gen.eval(eval_rng, n_eval);
  return corpus;
}

bool is_synthetic_keyword(std::string_view token) noexcept {
  if (token.size() < 4 || token[0] != 'k') return false;
  const auto x = token.find('x');
  if (x == std::string_view::npos || x == 1 || x + 1 == token.size()) return false;
  for (std::size_t i = 1; i < token.size(); ++i) {
    if (i == x) continue;
    if (token[i] < '0' || token[i] > '9') return false;
  }
  return true;
}

}  // namespace ccnrank
