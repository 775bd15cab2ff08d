// SPDX-License-Identifier: Apache-2.0
#include "armi/harness/config.hpp"

#include <cmath>
#include <fstream>

#include "armi/errors.hpp"
#include "armi/harness/digest.hpp"
#include "armi/text/vocabulary.hpp"

namespace armi::harness {

std::string_view to_string(Task2Loss loss) {
  return loss == Task2Loss::kFocal ? "fl" : "ce";
}

Task2Loss parse_task2_loss(std::string_view text) {
  if (text == "fl" || text == "FL" || text == "focal") return Task2Loss::kFocal;
  if (text == "ce" || text == "CE" || text == "cross_entropy") return Task2Loss::kCrossEntropy;
  throw ConfigError("unknown task-2 loss '" + std::string(text) + "' (expected ce or fl)");
}

model::ModelSpec TrainConfig::spec() const {
  auto spec = model::ModelSpec::parse(architecture, tasks);
  spec.per_task_vertical = per_task_vertical;
  return spec;
}

void TrainConfig::validate() const {
  const auto s = spec();
  if (per_task_vertical && !(s.head == model::HeadKind::kVhatt && s.multi_task())) {
    throw ConfigError("per_task_vertical applies to MT_VHATT only");
  }
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be a positive finite number");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be >= 0");
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) throw ConfigError("lambda2 must be >= 0");
  if (!(split_fraction > 0.0 && split_fraction <= 1.0)) {
    throw ConfigError("split_fraction must lie in (0, 1]");
  }
  if (min_token_count < 1) throw ConfigError("min_token_count must be >= 1");
  auto enc = encoder;
  enc.vocab_size = text::Vocabulary::kNumSpecial;
  enc.validate(s.head == model::HeadKind::kVhatt);
}

TrainConfig paper_profile() {
  TrainConfig c;
  c.profile = "paper";
  c.learning_rate = 1e-5;
  c.epochs = 5;
  c.batch_size = 16;
  c.gamma = 2.0;
  return c;
}

TrainConfig toy_profile() {
  TrainConfig c = paper_profile();
  c.profile = "toy";
  c.learning_rate = 1e-3;
  c.epochs = 200;
  return c;
}

TrainConfig profile_by_name(std::string_view name) {
  if (name == "paper") return paper_profile();
  if (name == "toy") return toy_profile();
  throw ConfigError("unknown profile '" + std::string(name) + "' (expected paper or toy)");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"profile", c.profile},
          {"architecture", c.architecture},
          {"tasks", std::string(model::to_string(c.tasks))},
          {"per_task_vertical", c.per_task_vertical},
          {"task2_loss", std::string(to_string(c.task2_loss))},
          {"gamma", c.gamma},
          {"lambda2", c.lambda2},
          {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"split_fraction", c.split_fraction},
          {"patience", c.patience},
          {"remove_diacritics", c.remove_diacritics},
          {"min_token_count", c.min_token_count},
          {"encoder",
           {{"num_layers", c.encoder.num_layers},
            {"model_dim", c.encoder.model_dim},
            {"num_heads", c.encoder.num_heads},
            {"ffn_dim", c.encoder.ffn_dim},
            {"max_len", c.encoder.max_len}}}};
}

void apply_json(TrainConfig& c, const nlohmann::json& json) {
  if (!json.is_object()) throw ConfigError("config: expected a JSON object");
  try {
    for (const auto& [key, value] : json.items()) {
      if (key == "profile") c.profile = value.get<std::string>();
      else if (key == "architecture") c.architecture = value.get<std::string>();
      else if (key == "tasks") c.tasks = model::parse_task_set(value.get<std::string>());
      else if (key == "per_task_vertical") c.per_task_vertical = value.get<bool>();
      else if (key == "task2_loss") c.task2_loss = parse_task2_loss(value.get<std::string>());
      else if (key == "gamma") c.gamma = value.get<double>();
      else if (key == "lambda2") c.lambda2 = value.get<double>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "split_fraction") c.split_fraction = value.get<double>();
      else if (key == "patience") c.patience = value.get<std::size_t>();
      else if (key == "remove_diacritics") c.remove_diacritics = value.get<bool>();
      else if (key == "min_token_count") c.min_token_count = value.get<std::size_t>();
      else if (key == "train") c.train_path = value.get<std::string>();
      else if (key == "dev") c.dev_path = value.get<std::string>();
      else if (key == "test") c.test_path = value.get<std::string>();
      else if (key == "output_dir") c.output_dir = value.get<std::string>();
      else if (key == "encoder") {
        if (!value.is_object()) throw ConfigError("config: 'encoder' must be an object");
        for (const auto& [ek, ev] : value.items()) {
          if (ek == "num_layers") c.encoder.num_layers = ev.get<std::size_t>();
          else if (ek == "model_dim") c.encoder.model_dim = ev.get<std::size_t>();
          else if (ek == "num_heads") c.encoder.num_heads = ev.get<std::size_t>();
          else if (ek == "ffn_dim") c.encoder.ffn_dim = ev.get<std::size_t>();
          else if (ek == "max_len") c.encoder.max_len = ev.get<std::size_t>();
          else throw ConfigError("config: unknown key 'encoder." + ek + "'");
        }
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

nlohmann::json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!json.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
  return json;
}

TrainConfig load_config(const std::filesystem::path& path) {
  const auto json = read_config_file(path);
  TrainConfig config = toy_profile();
  if (json.contains("profile") && json["profile"].is_string()) {
    config = profile_by_name(json["profile"].get<std::string>());
  }
  apply_json(config, json);
  return config;
}

std::string config_hash(const TrainConfig& config) {
  return sha256_hex(to_json(config).dump());
}

}  // namespace armi::harness
