#include "ccnrank/corpus.hpp"

#include <fstream>
#include <sstream>

#include "ccnrank/csv.hpp"
#include "ccnrank/errors.hpp"

namespace ccnrank {
namespace {

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// ASCII punctuation, minus '_' which belongs to tags and identifiers.
bool is_detachable_punct(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 0x80 || c == '_') return false;
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
         (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

bool is_tag(std::string_view s) noexcept {
  return s.size() > 4 && s.starts_with("__") && s.ends_with("__");
}

void split_chunk(std::string_view chunk, TokenSequence& out) {
  if (is_tag(chunk)) {
    out.emplace_back(chunk);
    return;
  }
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && is_detachable_punct(chunk[begin])) {
    out.emplace_back(1, chunk[begin]);
    ++begin;
  }
  std::size_t core_end = end;
  while (core_end > begin && is_detachable_punct(chunk[core_end - 1])) {
    --core_end;
  }
  if (core_end > begin) out.emplace_back(chunk.substr(begin, core_end - begin));
  for (std::size_t i = core_end; i < end; ++i) out.emplace_back(1, chunk[i]);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

bool is_blank(const csv::Record& r) { return r.size() == 1 && r[0].empty(); }

void expect_header(csv::Reader& reader, std::size_t columns, const char* what) {
  auto header = reader.next();
  if (!header) throw ParseError(std::string(what) + " file is empty");
  if (header->size() != columns) {
    throw ParseError(std::string(what) + " header has " +
                     std::to_string(header->size()) + " columns, expected " +
                     std::to_string(columns));
  }
}

const std::vector<std::string> kTrainHeader = {"Context", "Utterance", "Label"};

std::vector<std::string> eval_header() {
  std::vector<std::string> h = {"Context", "Ground Truth Utterance"};
  for (int i = 0; i < 9; ++i) h.push_back("Distractor_" + std::to_string(i));
  return h;
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  std::string lowered(text);
  for (char& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  TokenSequence out;
  std::string_view s = lowered;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) split_chunk(s.substr(i, j - i), out);
    i = j;
  }
  return out;
}

std::string join_tokens(const TokenSequence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool is_marker(std::string_view token) noexcept {
  return token == kEndOfUtterance || token == kEndOfTurn;
}

std::vector<TrainInstance> read_train(std::istream& in) {
  csv::Reader reader(in);
  expect_header(reader, kTrainHeader.size(), "train");
  std::vector<TrainInstance> data;
  std::size_t row = 0;
  while (auto record = reader.next()) {
    if (is_blank(*record)) continue;
    ++row;
    if (record->size() != 3) {
      throw ParseError("train data row " + std::to_string(row) + ": expected 3 columns, got " +
                       std::to_string(record->size()));
    }
    const std::string& label = (*record)[2];
    if (label != "0" && label != "1") {
      throw ParseError("train data row " + std::to_string(row) +
                       ": label must be 0 or 1, got '" + label + "'");
    }
    data.push_back(TrainInstance{tokenize((*record)[0]), tokenize((*record)[1]),
                                 label == "1" ? 1 : 0});
  }
  return data;
}

std::vector<TrainInstance> load_train(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_train(in);
}

void write_train(std::ostream& out, const std::vector<TrainInstance>& data) {
  csv::write_record(out, kTrainHeader);
  for (const auto& x : data) {
    if (x.label != 0 && x.label != 1) {
      throw ContractError("train label must be 0 or 1");
    }
    const std::vector<std::string> fields = {
        join_tokens(x.context), join_tokens(x.response), x.label ? "1" : "0"};
    csv::write_record(out, fields);
  }
}

void save_train(const std::filesystem::path& path,
                const std::vector<TrainInstance>& data) {
  auto out = open_output(path);
  write_train(out, data);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<EvalInstance> read_eval(std::istream& in) {
  csv::Reader reader(in);
  constexpr std::size_t kColumns = 1 + kCandidatesPerInstance;
  expect_header(reader, kColumns, "eval");
  std::vector<EvalInstance> data;
  std::size_t row = 0;
  while (auto record = reader.next()) {
    if (is_blank(*record)) continue;
    ++row;
    if (record->size() != kColumns) {
      throw ParseError("eval data row " + std::to_string(row) + ": expected " +
                       std::to_string(kColumns) + " columns, got " +
                       std::to_string(record->size()));
    }
    EvalInstance x;
    x.context = tokenize((*record)[0]);
    for (std::size_t i = 0; i < kCandidatesPerInstance; ++i) {
      x.candidates[i] = tokenize((*record)[i + 1]);
    }
    data.push_back(std::move(x));
  }
  return data;
}

std::vector<EvalInstance> load_eval(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_eval(in);
}

void write_eval(std::ostream& out, const std::vector<EvalInstance>& data) {
  csv::write_record(out, eval_header());
  std::vector<std::string> fields;
  for (const auto& x : data) {
    fields.clear();
    fields.push_back(join_tokens(x.context));
    for (const auto& c : x.candidates) fields.push_back(join_tokens(c));
    csv::write_record(out, fields);
  }
}

void save_eval(const std::filesystem::path& path,
               const std::vector<EvalInstance>& data) {
  auto out = open_output(path);
  write_eval(out, data);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace ccnrank
