#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ccnrank/errors.hpp"
#include "ccnrank/hash.hpp"
#include "ccnrank/models.hpp"

namespace ccnrank {
namespace {

using json = nlohmann::json;

static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
    return r;
  }
  return v;
}

json config_to_json(const ModelConfig& c) {
  return json{
      {"architecture", architecture_name(c.architecture)},
      {"embedding_dim", c.embedding_dim},
      {"hidden_size", c.hidden_size},
      {"max_length", c.max_length},
      {"k", c.k},
      {"frequency_threshold", c.frequency_threshold},
      {"seed", c.seed},
      {"precision", c.precision},
      {"ccn_head", ccn_head_name(c.ccn_head)},
      {"embedding_init", c.embedding_init},
      {"weight_init", c.weight_init},
  };
}

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw CheckpointError(std::string("checkpoint header missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw CheckpointError(std::string("checkpoint header field '") + name + "' has the wrong type");
  }
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  try {
    c.architecture = parse_architecture(field<std::string>(j, "architecture"));
    c.ccn_head = parse_ccn_head(field<std::string>(j, "ccn_head"));
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config: ") + e.what());
  }
  c.embedding_dim = field<std::size_t>(j, "embedding_dim");
  c.hidden_size = field<std::size_t>(j, "hidden_size");
  c.max_length = field<std::size_t>(j, "max_length");
  c.k = field<std::size_t>(j, "k");
  c.frequency_threshold = field<std::size_t>(j, "frequency_threshold");
  c.seed = field<std::uint64_t>(j, "seed");
  c.precision = field<std::string>(j, "precision");
  c.embedding_init = field<double>(j, "embedding_init");
  c.weight_init = field<double>(j, "weight_init");
  return c;
}

}  // namespace

void write_checkpoint(const Model& model, std::ostream& out) {
  const ParameterSet& params = model.parameters();
  json manifest = json::array();
  for (const auto& name : params.names()) {
    manifest.push_back({{"name", name}, {"shape", params.value(name).shape()}});
  }
  const json header = {
      {"format_version", kCheckpointVersion},
      {"config", config_to_json(model.config())},
      {"vocabulary_hash", to_hex(model.vocabulary_hash())},
      {"vocabulary_size", model.vocabulary_size()},
      {"dtype", "f64"},
      {"parameters", manifest},
  };
  const std::string text = header.dump();
  const auto length = static_cast<std::uint32_t>(text.size());
  out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));
  const unsigned char len_bytes[4] = {
      static_cast<unsigned char>(length & 0xff), static_cast<unsigned char>((length >> 8) & 0xff),
      static_cast<unsigned char>((length >> 16) & 0xff), static_cast<unsigned char>(length >> 24)};
  out.write(reinterpret_cast<const char*>(len_bytes), 4);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& name : params.names()) {
    for (double v : params.value(name).data()) {
      const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
      out.write(reinterpret_cast<const char*>(&bits), 8);
    }
  }
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_checkpoint(model, out);
  out.flush();
  if (!out) throw IoError("failed writing checkpoint '" + path.string() + "'");
}

Model read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::string_view(magic, 8) != kCheckpointMagic) {
    throw CheckpointError("checkpoint magic: not a CCNRANK1 file");
  }
  unsigned char len_bytes[4];
  if (!in.read(reinterpret_cast<char*>(len_bytes), 4)) {
    throw CheckpointError("checkpoint header length: file truncated");
  }
  const std::uint32_t length = std::uint32_t{len_bytes[0]} | (std::uint32_t{len_bytes[1]} << 8) |
                               (std::uint32_t{len_bytes[2]} << 16) |
                               (std::uint32_t{len_bytes[3]} << 24);
  std::string text(length, '\0');
  if (!in.read(text.data(), length)) {
    throw CheckpointError("checkpoint header: file truncated");
  }
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint header: invalid JSON: ") + e.what());
  }
  const int version = field<int>(header, "format_version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint format_version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  if (field<std::string>(header, "dtype") != "f64") {
    throw CheckpointError("checkpoint dtype: only f64 payloads are supported");
  }
  ModelConfig config = config_from_json(field<json>(header, "config"));
  std::uint64_t vocab_hash = 0;
  try {
    vocab_hash = from_hex(field<std::string>(header, "vocabulary_hash"));
  } catch (const ParseError&) {
    throw CheckpointError("checkpoint field 'vocabulary_hash' is not hex");
  }
  const auto vocab_size = field<std::size_t>(header, "vocabulary_size");
  std::optional<Model> model;
  try {
    model.emplace(config, vocab_size, vocab_hash);
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config: ") + e.what());
  }

  ParameterSet& params = model->parameters();
  const json manifest = field<json>(header, "parameters");
  if (!manifest.is_array() || manifest.size() != params.size()) {
    throw CheckpointError("checkpoint field 'parameters': expected " +
                          std::to_string(params.size()) + " entries for this config");
  }
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto name = field<std::string>(manifest[i], "name");
    const auto shape = field<Shape>(manifest[i], "shape");
    if (name != params.names()[i]) {
      throw CheckpointError("checkpoint parameter " + std::to_string(i) + " is '" + name +
                            "', expected '" + params.names()[i] + "'");
    }
    if (shape != params.value(name).shape()) {
      throw CheckpointError("checkpoint parameter '" + name + "' shape " + shape_string(shape) +
                            " does not match config shape " +
                            params.value(name).shape_string());
    }
  }
  for (const auto& name : params.names()) {
    Tensor& t = params.value(name);
    for (double& v : t.data()) {
      std::uint64_t bits;
      if (!in.read(reinterpret_cast<char*>(&bits), 8)) {
        throw CheckpointError("checkpoint parameter '" + name + "': payload truncated");
      }
      v = std::bit_cast<double>(to_little_endian(bits));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CheckpointError("checkpoint payload: trailing bytes after last parameter");
  }
  return std::move(*model);
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace ccnrank
