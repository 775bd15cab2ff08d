// SPDX-License-Identifier: Apache-2.0
#include "armi/harness/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "armi/errors.hpp"
#include "armi/harness/digest.hpp"
#include "armi/model/label_space.hpp"

namespace armi::harness {
namespace {

constexpr std::string_view kMagic = "ARMI-CKPT ";

nlohmann::json label_space_json() {
  std::vector<std::string> task1(LabelSpace::kTask1.begin(), LabelSpace::kTask1.end());
  std::vector<std::string> task2(LabelSpace::kCategories.begin(), LabelSpace::kCategories.end());
  return {{"task1", task1}, {"task2", task2}};
}

void append_float_le(std::string& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((bits >> shift) & 0xFFu));
}

float read_float_le(const char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<float>(bits);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

void round_parameters_to_float(model::MultiTaskModel& model) {
  for (const auto& entry : model.parameters().entries()) {
    Tensor t = entry.tensor;
    for (double& v : t.mutable_values()) {
      const float f = static_cast<float>(v);
      if (!std::isfinite(f)) {
        throw NumericalError("checkpoint: parameter " + entry.name + " does not fit in float32");
      }
      v = static_cast<double>(f);
    }
  }
}

std::string serialize_checkpoint(const model::MultiTaskModel& model, const text::Vocabulary& vocab,
                                 const CheckpointMetadata& metadata) {
  std::string payload;
  payload.reserve(model.parameters().scalar_count() * 4);
  nlohmann::json params = nlohmann::json::array();
  for (const auto& entry : model.parameters().entries()) {
    params.push_back({{"name", entry.name}, {"shape", entry.tensor.shape()}});
    for (double v : entry.tensor.values()) append_float_le(payload, static_cast<float>(v));
  }
  const auto& enc = model.encoder_config();
  const auto& spec = model.spec();
  nlohmann::json header = {
      {"format_version", kCheckpointVersion},
      {"encoder",
       {{"num_layers", enc.num_layers},
        {"model_dim", enc.model_dim},
        {"num_heads", enc.num_heads},
        {"ffn_dim", enc.ffn_dim},
        {"max_len", enc.max_len},
        {"vocab_size", enc.vocab_size},
        {"seed", enc.seed}}},
      {"spec",
       {{"architecture", spec.name()},
        {"tasks", std::string(model::to_string(spec.tasks))},
        {"per_task_vertical", spec.per_task_vertical}}},
      {"label_space", label_space_json()},
      {"vocabulary", vocab.tokens()},
      {"parameters", params},
      {"metadata",
       {{"seed", metadata.seed},
        {"epoch", metadata.epoch},
        {"config_hash", metadata.config_hash},
        {"remove_diacritics", metadata.preprocess.remove_diacritics}}},
      {"payload_bytes", payload.size()},
      {"payload_sha256", sha256_hex(payload)}};
  const std::string header_text = header.dump();
  std::string out;
  out.append(kMagic);
  out.append(std::to_string(kCheckpointVersion));
  out.push_back('\n');
  out.append(std::to_string(header_text.size()));
  out.push_back('\n');
  out.append(header_text);
  out.append(payload);
  return out;
}

LoadedCheckpoint deserialize_checkpoint(const std::string& bytes, const std::string& source) {
  const auto fail = [&](const std::string& what) { return DataError(source + ": " + what); };
  if (bytes.compare(0, kMagic.size(), kMagic) != 0) throw fail("not an armi checkpoint");
  std::size_t pos = kMagic.size();
  const auto read_line_number = [&](const char* what) {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw fail(std::string("truncated ") + what);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + nl, value);
    if (ec != std::errc{} || ptr != bytes.data() + nl) throw fail(std::string("malformed ") + what);
    pos = nl + 1;
    return value;
  };
  const std::size_t version = read_line_number("version");
  if (version != static_cast<std::size_t>(kCheckpointVersion)) {
    throw fail("unsupported checkpoint version " + std::to_string(version));
  }
  const std::size_t header_len = read_line_number("header length");
  if (bytes.size() - pos < header_len) throw fail("truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(pos, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed header: ") + e.what());
  }
  pos += header_len;
  const std::string_view payload(bytes.data() + pos, bytes.size() - pos);

  try {
    if (header.at("label_space") != label_space_json()) {
      throw fail("label space differs from this build's label inventory");
    }
    if (payload.size() != header.at("payload_bytes").get<std::size_t>()) {
      throw fail("payload is " + std::to_string(payload.size()) + " bytes, header declares " +
                 std::to_string(header.at("payload_bytes").get<std::size_t>()));
    }
    if (sha256_hex(payload) != header.at("payload_sha256").get<std::string>()) {
      throw fail("payload SHA-256 mismatch");
    }

    const auto& e = header.at("encoder");
    model::EncoderConfig enc;
    enc.num_layers = e.at("num_layers").get<std::size_t>();
    enc.model_dim = e.at("model_dim").get<std::size_t>();
    enc.num_heads = e.at("num_heads").get<std::size_t>();
    enc.ffn_dim = e.at("ffn_dim").get<std::size_t>();
    enc.max_len = e.at("max_len").get<std::size_t>();
    enc.vocab_size = e.at("vocab_size").get<std::size_t>();
    enc.seed = e.at("seed").get<std::uint64_t>();

    const auto& s = header.at("spec");
    auto spec = model::ModelSpec::parse(s.at("architecture").get<std::string>(),
                                        model::parse_task_set(s.at("tasks").get<std::string>()));
    spec.per_task_vertical = s.at("per_task_vertical").get<bool>();

    auto vocab = text::Vocabulary::from_tokens(header.at("vocabulary").get<std::vector<std::string>>());
    if (vocab.size() != enc.vocab_size) throw fail("vocabulary size disagrees with the encoder config");

    const auto& m = header.at("metadata");
    CheckpointMetadata metadata;
    metadata.seed = m.at("seed").get<std::uint64_t>();
    metadata.epoch = m.at("epoch").get<std::size_t>();
    metadata.config_hash = m.at("config_hash").get<std::string>();
    metadata.preprocess.remove_diacritics = m.at("remove_diacritics").get<bool>();

    model::MultiTaskModel net(enc, spec);
    const auto& entries = net.parameters().entries();
    const auto& declared = header.at("parameters");
    if (declared.size() != entries.size()) {
      throw fail("checkpoint declares " + std::to_string(declared.size()) + " parameters, " + spec.name() +
                 " has " + std::to_string(entries.size()));
    }
    std::size_t offset = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto name = declared[i].at("name").get<std::string>();
      const auto shape = declared[i].at("shape").get<Shape>();
      if (name != entries[i].name || shape != entries[i].tensor.shape()) {
        throw fail("parameter " + std::to_string(i) + " is " + name + " " + shape_to_string(shape) +
                   ", architecture expects " + entries[i].name + " " +
                   shape_to_string(entries[i].tensor.shape()));
      }
      Tensor t = entries[i].tensor;
      auto values = t.mutable_values();
      if (offset + 4 * values.size() > payload.size()) throw fail("payload too short");
      for (double& v : values) {
        v = static_cast<double>(read_float_le(payload.data() + offset));
        offset += 4;
      }
    }
    if (offset != payload.size()) throw fail("payload has trailing bytes");
    return LoadedCheckpoint{std::move(net), std::move(vocab), std::move(metadata)};
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed header: ") + e.what());
  } catch (const ConfigError& e) {
    throw fail(e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, model::MultiTaskModel& model,
                     const text::Vocabulary& vocab, const CheckpointMetadata& metadata) {
  round_parameters_to_float(model);
  const std::string bytes = serialize_checkpoint(model, vocab, metadata);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path), path.string());
}

}  // namespace armi::harness
