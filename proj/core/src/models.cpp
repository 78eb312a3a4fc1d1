#include "ccnrank/models.hpp"

#include <array>
#include <cmath>

#include "ccnrank/errors.hpp"
#include "ccnrank/layers.hpp"
#include "ccnrank/ops.hpp"
#include "ccnrank/random.hpp"

namespace ccnrank {
namespace {

constexpr std::array<std::pair<Architecture, std::string_view>, 3> kArchitectures = {{
    {Architecture::kDualLstm, "dual_lstm"},
    {Architecture::kMfcwLstm, "mfcw_lstm"},
    {Architecture::kCcnLstm, "ccn_lstm"},
}};

void require_architecture(const Model& model, Architecture expected) {
  if (model.config().architecture != expected) {
    throw ContractError("model architecture is " +
                        std::string(architecture_name(model.config().architecture)) +
                        ", expected " + std::string(architecture_name(expected)));
  }
}

Tensor identity(std::size_t n) {
  Tensor t(Shape{n, n});
  for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
  return t;
}

Tensor uniform(Shape shape, Rng& rng, double scale) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-scale, scale);
  return t;
}

// Forward passes are written once for mutable (trainable) and const
// (inference) parameter sets; Graph::param picks the leaf kind.
template <typename Params>
class Forward {
 public:
  Forward(Graph& g, Params& params, const ModelConfig& config)
      : g_(g), params_(params), config_(config) {}

  Var p(const std::string& name) { return g_.param(params_, name); }

  layers::LstmParams lstm(const std::string& prefix) {
    return {p(prefix + ".W"), p(prefix + ".U"), p(prefix + ".b")};
  }

  Var encode(const std::string& table, const std::string& lstm_prefix,
             const EncodedSequence& seq) {
    Var x = layers::embed_lookup(g_, p(table), seq);
    return layers::lstm_encode(g_, x, seq.true_length, lstm(lstm_prefix));
  }

  // c^T M r over one embedding table and one tied encoder.
  Var dual_score(const std::string& table, const std::string& lstm_prefix,
                 const std::string& m, const EncodedSequence& context,
                 const EncodedSequence& response) {
    Var c = encode(table, lstm_prefix, context);
    Var r = encode(table, lstm_prefix, response);
    return layers::bilinear_score(g_, c, r, {p(m)});
  }

  Var combine(std::span<const Var> scores) {
    return ops::sigmoid(g_, ops::dot(g_, p("alpha"), ops::stack(g_, scores)));
  }

  Var dual(const PairFeatures& x) {
    return ops::sigmoid(
        g_, dual_score("emb_high", "lstm_high", "M_high", x.context_high, x.response_high));
  }

  Var mfcw(const PairFeatures& x) {
    const std::array<Var, 4> scores = {
        dual_score("emb_high", "lstm_high", "M_high", x.context_high, x.response_high),
        dual_score("emb_low", "lstm_low", "M_low", x.context_low, x.response_low),
        layers::dense_score(g_, encode("emb_high", "lstm_common_high", x.common_high),
                            {p("d_high")}),
        layers::dense_score(g_, encode("emb_low", "lstm_common_low", x.common_low),
                            {p("d_low")}),
    };
    return combine(scores);
  }

  Var ccn(const PairFeatures& x) {
    Var s1 = dual_score("emb_high", "lstm_high", "M_high", x.context_high, x.response_high);
    layers::CcnParams head{p("ccn.a"), p("ccn.b"), config_.k,
                           layers::CcnActivation::kLinear, std::nullopt, std::nullopt};
    if (config_.ccn_head == CcnHead::kLinearSigmoid) {
      head.parallel_weights = p("ccn.a2");
      head.parallel_bias = p("ccn.b2");
    }
    Var context = layers::embed_lookup(g_, p("emb_ccn"), x.context_high);
    Var response = layers::embed_lookup(g_, p("emb_ccn"), x.response_high);
    Var s3 = layers::cross_convolution(g_, context, x.context_high.true_length,
                                       response, head)
                 .score;
    const std::array<Var, 2> scores = {s1, s3};
    return combine(scores);
  }

  Var run(const PairFeatures& x) {
    switch (config_.architecture) {
      case Architecture::kDualLstm: return dual(x);
      case Architecture::kMfcwLstm: return mfcw(x);
      case Architecture::kCcnLstm: return ccn(x);
    }
    throw ContractError("unknown architecture");
  }

 private:
  Graph& g_;
  Params& params_;
  const ModelConfig& config_;
};

void check_lengths(const PairFeatures& x, std::size_t max_length) {
  for (const EncodedSequence* s : {&x.context_high, &x.response_high, &x.context_low,
                                   &x.response_low, &x.common_high, &x.common_low}) {
    if (s->ids.size() != max_length) {
      throw ShapeError("feature sequence of length " + std::to_string(s->ids.size()) +
                       " does not match model max_length " + std::to_string(max_length));
    }
  }
}

}  // namespace

std::string_view architecture_name(Architecture arch) noexcept {
  for (const auto& [a, name] : kArchitectures)
    if (a == arch) return name;
  return "unknown";
}

Architecture parse_architecture(std::string_view name) {
  for (const auto& [a, n] : kArchitectures)
    if (n == name) return a;
  throw ConfigError("unknown architecture '" + std::string(name) +
                    "'; valid: dual_lstm, mfcw_lstm, ccn_lstm");
}

std::string_view ccn_head_name(CcnHead head) noexcept {
  return head == CcnHead::kSigmoid ? "sigmoid" : "linear_sigmoid";
}

CcnHead parse_ccn_head(std::string_view name) {
  if (name == "sigmoid") return CcnHead::kSigmoid;
  if (name == "linear_sigmoid") return CcnHead::kLinearSigmoid;
  throw ConfigError("unknown CCN head '" + std::string(name) +
                    "'; valid: sigmoid, linear_sigmoid");
}

void ModelConfig::validate() const {
  if (embedding_dim == 0 || hidden_size == 0 || max_length == 0) {
    throw ConfigError("model sizes (embedding_dim, hidden_size, max_length) must be >= 1");
  }
  if (k == 0 || k > max_length) {
    throw ConfigError("k must lie in [1, max_length]");
  }
  if (precision != "f64") {
    throw ConfigError("unsupported precision '" + precision + "'; only f64 is implemented");
  }
  if (!(embedding_init > 0.0 && std::isfinite(embedding_init)) ||
      !(weight_init > 0.0 && std::isfinite(weight_init))) {
    throw ConfigError("initialization ranges must be positive and finite");
  }
}

Featurizer::Featurizer(std::shared_ptr<const Vocabulary> vocab,
                       std::size_t max_length, std::size_t threshold)
    : vocab_(std::move(vocab)), split_(*vocab_, threshold), max_length_(max_length) {}

PairFeatures Featurizer::operator()(const TokenSequence& context,
                                    const TokenSequence& response) const {
  const EncodedSequence c = encode(context, *vocab_, max_length_, Side::kContext);
  const EncodedSequence r = encode(response, *vocab_, max_length_, Side::kResponse);
  const EncodedSequence common =
      encode(common_words(context, response), *vocab_, max_length_, Side::kResponse);
  return PairFeatures{
      filter_sequence(c, split_, Band::kHigh),      filter_sequence(r, split_, Band::kHigh),
      filter_sequence(c, split_, Band::kLow),       filter_sequence(r, split_, Band::kLow),
      filter_sequence(common, split_, Band::kHigh), filter_sequence(common, split_, Band::kLow),
  };
}

Model::Model(ModelConfig config, std::size_t vocab_size, std::uint64_t vocab_hash)
    : config_(std::move(config)), vocab_size_(vocab_size), vocab_hash_(vocab_hash) {
  config_.validate();
  if (vocab_size_ < 2) throw ConfigError("vocabulary must contain the reserved ids");
  Rng rng(config_.seed);
  const std::size_t n = config_.embedding_dim, h = config_.hidden_size;
  const double w = config_.weight_init;
  layers::add_embedding(params_, "emb_high", vocab_size_, n, rng, config_.embedding_init);
  switch (config_.architecture) {
    case Architecture::kDualLstm:
      layers::add_lstm(params_, "lstm_high", n, h, rng, w);
      params_.add("M_high", identity(h));
      break;
    case Architecture::kMfcwLstm:
      layers::add_embedding(params_, "emb_low", vocab_size_, n, rng, config_.embedding_init);
      layers::add_lstm(params_, "lstm_high", n, h, rng, w);
      layers::add_lstm(params_, "lstm_low", n, h, rng, w);
      layers::add_lstm(params_, "lstm_common_high", n, h, rng, w);
      layers::add_lstm(params_, "lstm_common_low", n, h, rng, w);
      params_.add("M_high", identity(h));
      params_.add("M_low", identity(h));
      params_.add("d_high", uniform(Shape{h}, rng, w));
      params_.add("d_low", uniform(Shape{h}, rng, w));
      params_.add("alpha", Tensor(Shape{4}, 1.0));
      break;
    case Architecture::kCcnLstm:
      layers::add_embedding(params_, "emb_ccn", vocab_size_, n, rng, config_.embedding_init);
      layers::add_lstm(params_, "lstm_high", n, h, rng, w);
      params_.add("M_high", identity(h));
      params_.add("ccn.a", uniform(Shape{config_.k * config_.max_length}, rng, w));
      params_.add("ccn.b", Tensor::scalar(0.0));
      if (config_.ccn_head == CcnHead::kLinearSigmoid) {
        params_.add("ccn.a2", uniform(Shape{config_.k * config_.max_length}, rng, w));
        params_.add("ccn.b2", Tensor::scalar(0.0));
      }
      params_.add("alpha", Tensor(Shape{2}, 1.0));
      break;
  }
}

Var Model::forward(Graph& g, const PairFeatures& x) {
  check_lengths(x, config_.max_length);
  return Forward<ParameterSet>(g, params_, config_).run(x);
}

double Model::predict(const PairFeatures& x) const {
  check_lengths(x, config_.max_length);
  Graph g;
  return g.value(Forward<const ParameterSet>(g, params_, config_).run(x)).item();
}

std::size_t Model::load_pretrained(const std::filesystem::path& path,
                                   const Featurizer& featurizer) {
  if (featurizer.vocabulary().size() != vocab_size_) {
    throw ContractError("featurizer vocabulary does not match the model");
  }
  auto high_only = [&](TokenId id) { return featurizer.split().in_band(id, Band::kHigh); };
  const std::size_t covered = layers::load_pretrained_embeddings(
      path, featurizer.vocabulary(), params_.value("emb_high"), high_only);
  if (params_.contains("emb_ccn")) {
    layers::load_pretrained_embeddings(path, featurizer.vocabulary(),
                                       params_.value("emb_ccn"), high_only);
  }
  return covered;
}

Var dual_forward(Graph& g, Model& model, const PairFeatures& x) {
  require_architecture(model, Architecture::kDualLstm);
  return model.forward(g, x);
}

Var mfcw_forward(Graph& g, Model& model, const PairFeatures& x) {
  require_architecture(model, Architecture::kMfcwLstm);
  return model.forward(g, x);
}

Var ccn_lstm_forward(Graph& g, Model& model, const PairFeatures& x) {
  require_architecture(model, Architecture::kCcnLstm);
  return model.forward(g, x);
}

}  // namespace ccnrank
