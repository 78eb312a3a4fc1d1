#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccnrank/errors.hpp"
#include "ccnrank/layers.hpp"
#include "ccnrank/models.hpp"
#include "ccnrank/random.hpp"
#include "ccnrank/rmsprop.hpp"
#include "ccnrank/toy_problem.hpp"
#include "ccnrank/training.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace ccnrank {
namespace {

using testing::lstm_oracle;
using testing::sigmoid;

constexpr Architecture kAll[] = {Architecture::kDualLstm, Architecture::kMfcwLstm,
                                 Architecture::kCcnLstm};

std::shared_ptr<const Vocabulary> small_vocab() {
  // h*: above the default threshold, l*: at or below it.
  return std::make_shared<const Vocabulary>(Vocabulary::from_counts(
      {{"h1", 20}, {"h2", 15}, {"h3", 9}, {"h4", 7}, {"l1", 5}, {"l2", 3}, {"l3", 1}}));
}

ModelConfig small_config(Architecture arch, std::size_t L = 3) {
  ModelConfig c;
  c.architecture = arch;
  c.embedding_dim = 2;
  c.hidden_size = 2;
  c.max_length = L;
  c.k = std::min<std::size_t>(2, L);
  c.seed = 3;
  return c;
}

void randomize(Model& model, std::uint64_t seed, double scale = 0.9) {
  Rng rng(seed);
  auto& params = model.parameters();
  for (const auto& name : params.names()) {
    Tensor& t = params.value(name);
    for (double& v : t.data()) v = rng.uniform(-scale, scale);
    if (name.rfind("emb_", 0) == 0)
      for (std::size_t j = 0; j < t.dim(1); ++j) t[j] = 0.0;
  }
}

// --- oracle forward passes built from the scalar LSTM and explicit loops ----

Tensor columns(const Tensor& table, const EncodedSequence& s) {
  const std::size_t N = table.dim(1), L = s.ids.size();
  Tensor X(Shape{N, L});
  for (std::size_t t = 0; t < L; ++t)
    if (s.ids[t] != kPadId)
      for (std::size_t n = 0; n < N; ++n) X[n * L + t] = table[s.ids[t] * N + n];
  return X;
}

std::vector<double> encode_oracle(const ParameterSet& p, const std::string& table,
                                  const std::string& lstm, const EncodedSequence& s) {
  return lstm_oracle(p.value(lstm + ".W"), p.value(lstm + ".U"), p.value(lstm + ".b"),
                     columns(p.value(table), s), s.true_length);
}

double bilinear_oracle(const std::vector<double>& c, const Tensor& M, const std::vector<double>& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) s += c[i] * M[i * r.size() + j] * r[j];
  return s;
}

double dot_oracle(const Tensor& d, const std::vector<double>& h) {
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) s += d[i] * h[i];
  return s;
}

double dual_score_oracle(const ParameterSet& p, const PairFeatures& x) {
  return bilinear_oracle(encode_oracle(p, "emb_high", "lstm_high", x.context_high),
                         p.value("M_high"),
                         encode_oracle(p, "emb_high", "lstm_high", x.response_high));
}

double mfcw_oracle(const ParameterSet& p, const PairFeatures& x, bool with_common = true) {
  const double s_high = dual_score_oracle(p, x);
  const double s_low = bilinear_oracle(encode_oracle(p, "emb_low", "lstm_low", x.context_low),
                                       p.value("M_low"),
                                       encode_oracle(p, "emb_low", "lstm_low", x.response_low));
  double z = p.value("alpha")[0] * s_high + p.value("alpha")[1] * s_low;
  if (with_common) {
    z += p.value("alpha")[2] *
         dot_oracle(p.value("d_high"), encode_oracle(p, "emb_high", "lstm_common_high", x.common_high));
    z += p.value("alpha")[3] *
         dot_oracle(p.value("d_low"), encode_oracle(p, "emb_low", "lstm_common_low", x.common_low));
  }
  return sigmoid(z);
}

double ccn_oracle(const ParameterSet& p, const PairFeatures& x, std::size_t k, bool parallel) {
  const double s1 = dual_score_oracle(p, x);
  const Tensor C = columns(p.value("emb_ccn"), x.context_high);
  const Tensor R = columns(p.value("emb_ccn"), x.response_high);
  const std::size_t N = C.dim(0), L = C.dim(1);
  std::vector<double> pooled;
  for (std::size_t i = 0; i < L; ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < x.context_high.true_length; ++j) {
      double s = 0.0;
      for (std::size_t n = 0; n < N; ++n) s += R[n * L + i] * C[n * L + j];
      row.push_back(s);
    }
    std::sort(row.begin(), row.end(), std::greater<>());
    row.resize(k, 0.0);
    pooled.insert(pooled.end(), row.begin(), row.end());
  }
  double s3 = dot_oracle(p.value("ccn.a"), pooled) + p.value("ccn.b").item();
  if (parallel) {
    s3 += sigmoid(dot_oracle(p.value("ccn.a2"), pooled) + p.value("ccn.b2").item()) - 0.5;
  }
  return sigmoid(p.value("alpha")[0] * s1 + p.value("alpha")[1] * s3);
}

struct Pair {
  TokenSequence context, response;
};

std::vector<Pair> sample_pairs(std::uint64_t seed, std::size_t n, std::size_t max_len) {
  const TokenSequence words = {"h1", "h2", "h3", "h4", "l1", "l2", "l3", "oov"};
  Rng rng(seed);
  std::vector<Pair> out(n);
  for (auto& p : out) {
    p.context.resize(rng.below(max_len + 1));
    p.response.resize(rng.below(max_len + 1));
    for (auto& w : p.context) w = words[rng.below(words.size())];
    for (auto& w : p.response) w = words[rng.below(words.size())];
  }
  return out;
}

// --- configuration ----------------------------------------------------------

TEST(ModelConfig, NamesRoundTripAndErrors) {
  for (auto a : kAll) EXPECT_EQ(parse_architecture(architecture_name(a)), a);
  try {
    parse_architecture("bogus");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("ccn_lstm"), std::string::npos);
  }
  EXPECT_EQ(parse_ccn_head("linear_sigmoid"), CcnHead::kLinearSigmoid);
  EXPECT_THROW(parse_ccn_head("relu"), ConfigError);
}

TEST(ModelConfig, Validation) {
  ModelConfig c;
  EXPECT_NO_THROW(c.validate());
  c.k = c.max_length + 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ModelConfig{};
  c.precision = "f32";
  EXPECT_THROW(c.validate(), ConfigError);
  c = ModelConfig{};
  c.hidden_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ModelConfig{};
  c.weight_init = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Model, ParameterManifestPerArchitecture) {
  const auto vocab = small_vocab();
  const Model dual(small_config(Architecture::kDualLstm), vocab->size(), vocab->hash());
  EXPECT_EQ(dual.parameters().names(),
            (std::vector<std::string>{"emb_high", "lstm_high.W", "lstm_high.U", "lstm_high.b",
                                      "M_high"}));
  ModelConfig cc = small_config(Architecture::kCcnLstm);
  cc.ccn_head = CcnHead::kLinearSigmoid;
  const Model ccn(cc, vocab->size(), vocab->hash());
  EXPECT_TRUE(ccn.parameters().contains("ccn.a2"));
  EXPECT_EQ(ccn.parameters().value("ccn.a").size(), cc.k * cc.max_length);
  EXPECT_EQ(ccn.parameters().value("alpha"), Tensor(Shape{2}, 1.0));
  const Model mfcw(small_config(Architecture::kMfcwLstm), vocab->size(), vocab->hash());
  EXPECT_EQ(mfcw.parameters().value("alpha"), Tensor(Shape{4}, 1.0));
  EXPECT_EQ(mfcw.parameters().value("M_low"), Tensor::matrix(2, 2, {1, 0, 0, 1}));
}

TEST(Model, SameSeedSameParameters) {
  const auto vocab = small_vocab();
  for (auto a : kAll) {
    const Model m1(small_config(a), vocab->size(), vocab->hash());
    const Model m2(small_config(a), vocab->size(), vocab->hash());
    EXPECT_TRUE(m1.parameters().values_equal(m2.parameters()));
  }
}

// --- featurization ------------------------------------------------------------

TEST(Featurizer, EveryRealTokenLandsInExactlyOneBand) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 6, 5);
  for (const auto& p : sample_pairs(1, 300, 8)) {
    const auto x = f(p.context, p.response);
    const auto c = encode(p.context, *vocab, 6, Side::kContext);
    const auto r = encode(p.response, *vocab, 6, Side::kResponse);
    EXPECT_EQ(x.context_high.true_length + x.context_low.true_length, c.true_length);
    EXPECT_EQ(x.response_high.true_length + x.response_low.true_length, r.true_length);
    const auto common = common_words(p.context, p.response);
    EXPECT_EQ(x.common_high.true_length + x.common_low.true_length, std::min<std::size_t>(6, common.size()));
  }
}

// --- forward passes ---------------------------------------------------------

TEST(Forward, ZeroBranchParametersGiveOneHalf) {
  const auto vocab = small_vocab();
  for (auto a : kAll) {
    for (auto head : {CcnHead::kSigmoid, CcnHead::kLinearSigmoid}) {
      ModelConfig c = small_config(a, 5);
      c.ccn_head = head;
      Model m(c, vocab->size(), vocab->hash());
      for (const auto& name : m.parameters().names())
        if (name != "alpha") m.parameters().value(name).fill(0.0);
      const Featurizer f(vocab, 5, 5);
      for (const auto& p : sample_pairs(2, 20, 6)) {
        EXPECT_EQ(m.predict(f(p.context, p.response)), 0.5) << architecture_name(a);
      }
    }
  }
}

TEST(Forward, EmptyPairGivesOneHalfForDual) {
  const auto vocab = small_vocab();
  Model m(small_config(Architecture::kDualLstm), vocab->size(), vocab->hash());
  randomize(m, 4);
  const Featurizer f(vocab, 3, 5);
  EXPECT_EQ(m.predict(f({}, {})), 0.5);
}

TEST(Forward, DualMatchesOracle) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 3, 5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Model m(small_config(Architecture::kDualLstm), vocab->size(), vocab->hash());
    randomize(m, seed);
    for (const auto& p : sample_pairs(seed + 100, 10, 4)) {
      const auto x = f(p.context, p.response);
      const double want = sigmoid(dual_score_oracle(m.parameters(), x));
      EXPECT_NEAR(m.predict(x), want, 1e-10);
      Graph g;
      EXPECT_NEAR(g.value(dual_forward(g, m, x)).item(), want, 1e-10);
    }
  }
}

TEST(Forward, MfcwMatchesOracle) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 4, 5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ModelConfig c = small_config(Architecture::kMfcwLstm, 4);
    c.hidden_size = 3;
    Model m(c, vocab->size(), vocab->hash());
    randomize(m, seed);
    for (const auto& p : sample_pairs(seed + 200, 10, 6)) {
      const auto x = f(p.context, p.response);
      Graph g;
      EXPECT_NEAR(g.value(mfcw_forward(g, m, x)).item(), mfcw_oracle(m.parameters(), x), 1e-10);
    }
  }
}

TEST(Forward, MfcwWithoutCommonWordsUsesTwoBranches) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 4, 5);
  Model m(small_config(Architecture::kMfcwLstm, 4), vocab->size(), vocab->hash());
  randomize(m, 9);
  const auto x = f({"h1", "l1", "h2"}, {"h3", "l2"});
  EXPECT_EQ(x.common_high.true_length + x.common_low.true_length, 0u);
  const double p = m.predict(x);
  EXPECT_NEAR(p, mfcw_oracle(m.parameters(), x, /*with_common=*/false), 1e-10);
  m.parameters().value("d_high").fill(7.0);
  m.parameters().value("d_low").fill(-3.0);
  EXPECT_EQ(m.predict(x), p);
}

TEST(Forward, CcnMatchesComposedOracle) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 4, 5);
  for (auto head : {CcnHead::kSigmoid, CcnHead::kLinearSigmoid}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ModelConfig c = small_config(Architecture::kCcnLstm, 4);
      c.ccn_head = head;
      Model m(c, vocab->size(), vocab->hash());
      randomize(m, seed);
      for (const auto& p : sample_pairs(seed + 300, 10, 6)) {
        const auto x = f(p.context, p.response);
        Graph g;
        EXPECT_NEAR(g.value(ccn_lstm_forward(g, m, x)).item(),
                    ccn_oracle(m.parameters(), x, c.k, head == CcnHead::kLinearSigmoid), 1e-10);
      }
    }
  }
}

TEST(Forward, CcnZeroResponseLeavesBiasOnly) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 4, 5);
  Model m(small_config(Architecture::kCcnLstm, 4), vocab->size(), vocab->hash());
  randomize(m, 5);
  const auto x = f({"h1", "h2"}, {});
  const auto& p = m.parameters();
  const double want = sigmoid(p.value("alpha")[1] * p.value("ccn.b").item());
  EXPECT_NEAR(m.predict(x), want, 1e-15);
}

TEST(Forward, ArchitectureMismatchIsContractError) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 3, 5);
  const auto x = f({"h1"}, {"h1"});
  Model dual(small_config(Architecture::kDualLstm), vocab->size(), vocab->hash());
  Model mfcw(small_config(Architecture::kMfcwLstm), vocab->size(), vocab->hash());
  Graph g;
  EXPECT_THROW(mfcw_forward(g, dual, x), ContractError);
  EXPECT_THROW(ccn_lstm_forward(g, dual, x), ContractError);
  EXPECT_THROW(dual_forward(g, mfcw, x), ContractError);
}

TEST(Forward, WrongFeatureLengthIsShapeError) {
  const auto vocab = small_vocab();
  Model m(small_config(Architecture::kDualLstm, 3), vocab->size(), vocab->hash());
  const Featurizer f(vocab, 5, 5);
  EXPECT_THROW(m.predict(f({"h1"}, {"h1"})), ShapeError);
}

TEST(Forward, RepeatedCallsAgreeBitwise) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 5, 5);
  for (auto a : kAll) {
    Model m(small_config(a, 5), vocab->size(), vocab->hash());
    randomize(m, 6);
    for (const auto& p : sample_pairs(7, 20, 6)) {
      const auto x = f(p.context, p.response);
      const double first = m.predict(x);
      EXPECT_EQ(m.predict(x), first);
      Graph g;
      EXPECT_EQ(g.value(m.forward(g, x)).item(), first);
    }
  }
}

TEST(Forward, TiedEncodersShareOneParameterEntry) {
  // Context and response read the same entries, so a training step cannot
  // make the two sides drift apart: one gradient slot serves both.
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 4, 5);
  for (auto a : kAll) {
    Model m(small_config(a, 4), vocab->size(), vocab->hash());
    randomize(m, 8);
    for (const auto& name : m.parameters().names()) {
      EXPECT_EQ(name.find("context"), std::string::npos);
      EXPECT_EQ(name.find("response"), std::string::npos);
    }
    const auto x = f({"h1", "h2", "l1"}, {"h2", "l1", "h3"});
    Graph g;
    const Var p = m.forward(g, x);
    const std::size_t leaves_before = g.size();
    // Requesting the tied parameter again yields the already-recorded leaf.
    const Var again = g.param(m.parameters(), "lstm_high.W");
    EXPECT_EQ(g.size(), leaves_before);
    EXPECT_LT(again.id, p.id);
    g.backward(p);
    RmsPropState state;
    rmsprop_step(m.parameters(), state);
    const auto y = f({"h2", "l1", "h3"}, {"h1", "h2", "l1"});
    EXPECT_TRUE(std::isfinite(m.predict(y)));
  }
}

TEST(Forward, PadRowDoesNotInfluenceScores) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 5, 5);
  for (auto a : kAll) {
    Model m(small_config(a, 5), vocab->size(), vocab->hash());
    randomize(m, 10);
    const auto pairs = sample_pairs(11, 20, 4);
    std::vector<double> before;
    for (const auto& p : pairs) before.push_back(m.predict(f(p.context, p.response)));
    for (const auto& name : m.parameters().names()) {
      if (name.rfind("emb_", 0) != 0) continue;
      Tensor& t = m.parameters().value(name);
      for (std::size_t j = 0; j < t.dim(1); ++j) t[j] = 42.0;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i)
      EXPECT_EQ(m.predict(f(pairs[i].context, pairs[i].response)), before[i]);
  }
}

// --- gradients ----------------------------------------------------------------

struct GradCase {
  Architecture arch;
  CcnHead head;
};

const GradCase kGradCases[] = {{Architecture::kDualLstm, CcnHead::kSigmoid},
                               {Architecture::kMfcwLstm, CcnHead::kSigmoid},
                               {Architecture::kCcnLstm, CcnHead::kSigmoid},
                               {Architecture::kCcnLstm, CcnHead::kLinearSigmoid}};

TEST(Gradients, ToyProblemPassesAtDefaultSeed) {
  for (const auto& c : kGradCases) {
    ToyProblemConfig config;
    config.architecture = c.arch;
    config.ccn_head = c.head;
    auto problem = make_toy_problem(config);
    EXPECT_EQ(problem.vocab->size(), 50u);
    const auto report = check_gradients(problem, {});
    EXPECT_TRUE(report.passed) << architecture_name(c.arch) << " " << report.worst_parameter
                               << " " << report.max_relative_error;
    EXPECT_LT(report.max_relative_error, 1e-4);
  }
}

// Independent central-difference comparison over many seeds. Coordinates
// whose gradient is close to zero are judged on absolute agreement, since the
// relative error there measures rounding rather than correctness.
TEST(Gradients, SeedSweepAgreesWithCentralDifferences) {
  const double h = 1e-5;
  for (const auto& c : kGradCases) {
    for (std::uint64_t seed = 2; seed < 10; ++seed) {
      ToyProblemConfig config;
      config.architecture = c.arch;
      config.ccn_head = c.head;
      config.seed = seed;
      auto problem = make_toy_problem(config);
      ParameterSet& params = problem.model.parameters();
      auto loss = [&] {
        Graph g;
        return g.value(batch_loss(g, problem.model, problem.inputs, problem.labels)).item();
      };
      params.zero_grad();
      {
        Graph g;
        g.backward(batch_loss(g, problem.model, problem.inputs, problem.labels));
      }
      const ParameterSet analytic = params;
      Rng rng(seed);
      for (const auto& name : params.names()) {
        Tensor& value = params.value(name);
        for (int s = 0; s < 12; ++s) {
          const std::size_t i = rng.below(value.size());
          const double saved = value[i];
          value[i] = saved + h;
          const double up = loss();
          value[i] = saved - h;
          const double down = loss();
          value[i] = saved;
          const double numeric = (up - down) / (2 * h);
          const double a = analytic.grad(name)[i];
          EXPECT_LE(std::abs(a - numeric), 1e-4 * std::max(std::abs(a), std::abs(numeric)) + 1e-10)
              << architecture_name(c.arch) << " seed " << seed << " " << name << "[" << i << "]";
        }
      }
    }
  }
}

// --- checkpoints --------------------------------------------------------------

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  const auto vocab = small_vocab();
  testing::TempDir dir;
  for (auto a : kAll) {
    ModelConfig c = small_config(a, 4);
    c.ccn_head = CcnHead::kLinearSigmoid;
    Model m(c, vocab->size(), vocab->hash());
    randomize(m, 12);
    save_checkpoint(m, dir / "a.ckpt");
    const Model loaded = load_checkpoint(dir / "a.ckpt");
    save_checkpoint(loaded, dir / "b.ckpt");
    EXPECT_EQ(testing::read_file(dir / "a.ckpt"), testing::read_file(dir / "b.ckpt"));
    EXPECT_EQ(loaded.config(), m.config());
    EXPECT_EQ(loaded.vocabulary_hash(), vocab->hash());
    EXPECT_EQ(loaded.vocabulary_size(), vocab->size());
    EXPECT_TRUE(loaded.parameters().values_equal(m.parameters()));
    const Featurizer f(vocab, 4, 5);
    for (const auto& p : sample_pairs(13, 10, 5)) {
      const auto x = f(p.context, p.response);
      EXPECT_EQ(loaded.predict(x), m.predict(x));
    }
  }
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  const auto vocab = small_vocab();
  Model m(small_config(Architecture::kDualLstm), vocab->size(), vocab->hash());
  std::ostringstream out;
  write_checkpoint(m, out);
  const std::string bytes = out.str();

  auto load = [](const std::string& b) {
    std::istringstream in(b);
    return read_checkpoint(in);
  };
  EXPECT_NO_THROW(load(bytes));
  EXPECT_THROW(load(bytes.substr(0, bytes.size() - 5)), CheckpointError);
  EXPECT_THROW(load(bytes.substr(0, 10)), CheckpointError);
  EXPECT_THROW(load("NOTACKPT" + bytes.substr(8)), CheckpointError);
  EXPECT_THROW(load(bytes + "x"), CheckpointError);

  std::string wrong_version = bytes;
  const auto pos = wrong_version.find("\"format_version\":1");
  ASSERT_NE(pos, std::string::npos);
  wrong_version[pos + 17] = '9';
  EXPECT_THROW(load(wrong_version), CheckpointError);

  testing::TempDir dir;
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), IoError);
}

TEST(Pretrained, ModelLoadsHighBandRows) {
  const auto vocab = small_vocab();
  const Featurizer f(vocab, 3, 5);
  testing::TempDir dir;
  testing::write_file(dir / "v.txt", "h1 0.5 -0.5\nl1 9 9\nh4 1 2\n");
  Model m(small_config(Architecture::kCcnLstm), vocab->size(), vocab->hash());
  EXPECT_EQ(m.load_pretrained(dir / "v.txt", f), 2u);
  const Tensor& E = m.parameters().value("emb_high");
  EXPECT_EQ(E.at(vocab->id("h1"), 0), 0.5);
  EXPECT_EQ(E.at(vocab->id("h4"), 1), 2.0);
  EXPECT_NE(E.at(vocab->id("l1"), 0), 9.0);
  EXPECT_EQ(m.parameters().value("emb_ccn").at(vocab->id("h1"), 1), -0.5);
}

}  // namespace
}  // namespace ccnrank
