#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "ccnrank/corpus.hpp"
#include "ccnrank/csv.hpp"
#include "ccnrank/errors.hpp"
#include "ccnrank/random.hpp"
#include "ccnrank/synthetic.hpp"
#include "test_support.hpp"

namespace ccnrank {
namespace {

using Tokens = TokenSequence;

std::string random_text(Rng& rng) {
  static const std::string alphabet = "abcXYZ019 ,.!?'\"_-:;()  \t";
  std::string s;
  const auto len = rng.below(30);
  for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
  if (rng.bernoulli(0.3)) s += " __eou__";
  if (rng.bernoulli(0.2)) s += " __eot__";
  return s;
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, LowercasesAndKeepsMarkers) {
  EXPECT_EQ(tokenize("Hello world __eou__"), (Tokens{"hello", "world", "__eou__"}));
}

TEST(Tokenize, DetachesPunctuation) {
  EXPECT_EQ(tokenize("hi, there."), (Tokens{"hi", ",", "there", "."}));
}

TEST(Tokenize, InnerPunctuationAndUnderscoresStay) {
  EXPECT_EQ(tokenize("(don't) snake_case!!"),
            (Tokens{"(", "don't", ")", "snake_case", "!", "!"}));
  EXPECT_EQ(tokenize("__eot__ __EOU__"), (Tokens{"__eot__", "__eou__"}));
}

TEST(Tokenize, DeterministicAndIdempotentOnJoinedOutput) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::string text = random_text(rng);
    const Tokens once = tokenize(text);
    EXPECT_EQ(once, tokenize(text));
    EXPECT_EQ(tokenize(join_tokens(once)), once) << "input: " << text;
    for (const auto& t : once) {
      EXPECT_FALSE(t.empty());
      EXPECT_EQ(t.find_first_of(" \t\n\r"), std::string::npos);
    }
  }
}

TEST(Markers, OnlyTurnAndUtteranceTags) {
  EXPECT_TRUE(is_marker("__eou__"));
  EXPECT_TRUE(is_marker("__eot__"));
  EXPECT_FALSE(is_marker("__url__"));
  EXPECT_FALSE(is_marker("eou"));
}

TEST(Csv, QuotedFieldsCommasQuotesAndNewlines) {
  std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",,x\n");
  csv::Reader reader(in);
  auto r1 = reader.next();
  ASSERT_TRUE(r1);
  EXPECT_EQ(*r1, (csv::Record{"a", "b,c", "say \"hi\""}));
  auto r2 = reader.next();
  ASSERT_TRUE(r2);
  EXPECT_EQ(*r2, (csv::Record{"multi\nline", "", "x"}));
  EXPECT_EQ(reader.record_number(), 2u);
  EXPECT_FALSE(reader.next());
}

TEST(Csv, UnterminatedQuoteIsParseError) {
  std::istringstream in("a,\"open\n");
  csv::Reader reader(in);
  EXPECT_THROW(reader.next(), ParseError);
}

TEST(Csv, WriteThenReadRoundTrip) {
  const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", "", "line\nbreak"};
  std::ostringstream out;
  csv::write_record(out, fields);
  std::istringstream in(out.str());
  csv::Reader reader(in);
  auto back = reader.next();
  ASSERT_TRUE(back);
  EXPECT_EQ(*back, fields);
}

TEST(TrainCsv, TwoRowsInFileOrder) {
  std::istringstream in(
      "Context,Utterance,Label\n"
      "hello there __eou__,hi,1\n"
      "what now __eou__,nothing,0\n");
  const auto data = read_train(in);
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[0].context, (Tokens{"hello", "there", "__eou__"}));
  EXPECT_EQ(data[0].response, (Tokens{"hi"}));
  EXPECT_EQ(data[0].label, 1);
  EXPECT_EQ(data[1].response, (Tokens{"nothing"}));
  EXPECT_EQ(data[1].label, 0);
}

TEST(TrainCsv, BadLabelNamesTheRow) {
  std::istringstream in(
      "Context,Utterance,Label\n"
      "a,b,1\n"
      "c,d,2\n");
  try {
    read_train(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(TrainCsv, QuotedCommaIsOneField) {
  std::istringstream in(
      "Context,Utterance,Label\n"
      "\"well, ok\",fine,0\n");
  const auto data = read_train(in);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0].context, (Tokens{"well", ",", "ok"}));
}

TEST(TrainCsv, WrongColumnCountIsParseError) {
  std::istringstream in("Context,Utterance,Label\na,b\n");
  EXPECT_THROW(read_train(in), ParseError);
}

TEST(TrainCsv, RoundTripOfRandomData) {
  Rng rng(3);
  std::vector<TrainInstance> data;
  for (int i = 0; i < 300; ++i) {
    data.push_back({tokenize(random_text(rng)), tokenize(random_text(rng)),
                    static_cast<int>(rng.below(2))});
  }
  testing::TempDir dir;
  save_train(dir / "t.csv", data);
  EXPECT_EQ(load_train(dir / "t.csv"), data);
}

TEST(TrainCsv, MissingFileIsIoError) {
  EXPECT_THROW(load_train("/nonexistent/dir/train.csv"), IoError);
}

std::string eval_header() {
  std::string h = "Context,Ground Truth Utterance";
  for (int i = 0; i < 9; ++i) h += ",Distractor_" + std::to_string(i);
  return h + "\n";
}

TEST(EvalCsv, ValidRowHasTenCandidates) {
  std::string row = "ctx __eou__,truth";
  for (int i = 0; i < 9; ++i) row += ",d" + std::to_string(i);
  std::istringstream in(eval_header() + row + "\n");
  const auto data = read_eval(in);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0].candidates[0], (Tokens{"truth"}));
  EXPECT_EQ(data[0].candidates[9], (Tokens{"d8"}));
}

TEST(EvalCsv, NineCandidatesIsParseError) {
  std::string row = "ctx,truth";
  for (int i = 0; i < 8; ++i) row += ",d" + std::to_string(i);
  std::istringstream in(eval_header() + row + "\n");
  EXPECT_THROW(read_eval(in), ParseError);
}

TEST(EvalCsv, EmptyDistractorAccepted) {
  std::string row = "ctx,truth,";
  for (int i = 1; i < 9; ++i) row += ",d" + std::to_string(i);
  std::istringstream in(eval_header() + row + "\n");
  const auto data = read_eval(in);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_TRUE(data[0].candidates[1].empty());
}

TEST(EvalCsv, RoundTrip) {
  const auto corpus = generate_synthetic(5, 40, 30);
  std::ostringstream out;
  write_eval(out, corpus.eval);
  std::istringstream in(out.str());
  EXPECT_EQ(read_eval(in), corpus.eval);
}

TEST(Synthetic, SameSeedGivesByteIdenticalFiles) {
  testing::TempDir dir;
  const auto a = generate_synthetic(7, 400, 50);
  const auto b = generate_synthetic(7, 400, 50);
  save_train(dir / "a.csv", a.train);
  save_train(dir / "b.csv", b.train);
  save_eval(dir / "ae.csv", a.eval);
  save_eval(dir / "be.csv", b.eval);
  EXPECT_EQ(testing::read_file(dir / "a.csv"), testing::read_file(dir / "b.csv"));
  EXPECT_EQ(testing::read_file(dir / "ae.csv"), testing::read_file(dir / "be.csv"));
  EXPECT_EQ(a.validation, b.validation);
  EXPECT_NE(generate_synthetic(8, 400, 50).train, a.train);
}

TEST(Synthetic, SizesAndLabelBalance) {
  const auto c = generate_synthetic(7, 1000, 20);
  ASSERT_EQ(c.train.size(), 1000u);
  EXPECT_EQ(c.validation.size(), 20u);
  EXPECT_EQ(c.eval.size(), 20u);
  std::size_t positives = 0;
  for (const auto& x : c.train) positives += static_cast<std::size_t>(x.label);
  EXPECT_EQ(positives, 500u);
}

std::set<std::string> keywords(const TokenSequence& s) {
  std::set<std::string> out;
  for (const auto& t : s)
    if (is_synthetic_keyword(t)) out.insert(t);
  return out;
}

bool share_keyword(const TokenSequence& a, const TokenSequence& b) {
  const auto ka = keywords(a);
  for (const auto& k : keywords(b))
    if (ka.count(k)) return true;
  return false;
}

TEST(Synthetic, PositivesShareKeywordsAndNegativesDoNot) {
  const auto c = generate_synthetic(7, 4000, 500);
  for (const auto& x : c.train) {
    EXPECT_EQ(share_keyword(x.context, x.response), x.label == 1);
  }
  for (const auto* split : {&c.validation, &c.eval}) {
    for (const auto& x : *split) {
      EXPECT_TRUE(share_keyword(x.context, x.candidates[0]));
      for (std::size_t i = 1; i < kCandidatesPerInstance; ++i) {
        EXPECT_FALSE(share_keyword(x.context, x.candidates[i]));
      }
    }
  }
}

TEST(Synthetic, KeywordsStayWithinTheFrequencyBudget) {
  const SyntheticConfig config;
  const auto c = generate_synthetic(7, 4000, 10, config);
  std::map<std::string, std::size_t> counts;
  for (const auto& x : c.train) {
    for (const auto& t : x.context) counts[t]++;
    for (const auto& t : x.response) counts[t]++;
  }
  for (const auto& [token, n] : counts) {
    if (is_synthetic_keyword(token)) {
      EXPECT_LE(n, config.frequency_threshold) << token;
    } else {
      EXPECT_GT(n, config.frequency_threshold) << token;
    }
  }
}

TEST(Synthetic, BudgetExhaustionIsConfigError) {
  SyntheticConfig config;
  config.topics = 2;
  config.keywords_per_topic = 2;
  EXPECT_THROW(generate_synthetic(1, 1000, 1, config), ConfigError);
}

TEST(Synthetic, KeywordNamingScheme) {
  EXPECT_TRUE(is_synthetic_keyword("k3x17"));
  EXPECT_FALSE(is_synthetic_keyword("w12"));
  EXPECT_FALSE(is_synthetic_keyword("kx1"));
  EXPECT_FALSE(is_synthetic_keyword("k1x"));
  EXPECT_FALSE(is_synthetic_keyword("k1y2"));
}

TEST(SyntheticConfigFile, ParseFormatRoundTrip) {
  std::istringstream in("# comment\ntopics = 5\n\ntopic_filler_rate = 0.25  # trailing\n");
  const auto c = parse_synthetic_config(in);
  EXPECT_EQ(c.topics, 5u);
  EXPECT_DOUBLE_EQ(c.topic_filler_rate, 0.25);
  EXPECT_EQ(c.keywords_per_topic, SyntheticConfig{}.keywords_per_topic);
  std::istringstream again(format_synthetic_config(c));
  const auto d = parse_synthetic_config(again);
  EXPECT_EQ(format_synthetic_config(d), format_synthetic_config(c));
}

TEST(SyntheticConfigFile, UnknownKeyAndBadValues) {
  std::istringstream unknown("colour = red\n");
  EXPECT_THROW(parse_synthetic_config(unknown), ConfigError);
  std::istringstream bad("topics = many\n");
  EXPECT_THROW(parse_synthetic_config(bad), ConfigError);
  std::istringstream rate("topic_filler_rate = 1.5\n");
  EXPECT_THROW(parse_synthetic_config(rate).validate(), ConfigError);
}

}  // namespace
}  // namespace ccnrank
