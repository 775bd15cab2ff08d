// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "armi/model/encoder.hpp"
#include "armi/model/model_spec.hpp"

namespace armi::harness {

enum class Task2Loss { kCrossEntropy, kFocal };

std::string_view to_string(Task2Loss loss);
Task2Loss parse_task2_loss(std::string_view text);

struct TrainConfig {
  std::string profile = "toy";
  std::string architecture = "MT_ATT";
  model::TaskSet tasks = model::TaskSet::kBoth;
  bool per_task_vertical = false;
  Task2Loss task2_loss = Task2Loss::kFocal;
  double gamma = 2.0;
  double lambda2 = 1.0;
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  double split_fraction = 0.9;
  // 0 disables dev-based early stopping.
  std::size_t patience = 0;
  bool remove_diacritics = false;
  std::size_t min_token_count = 1;
  // vocab_size and seed are filled in by the trainer.
  model::EncoderConfig encoder;

  std::filesystem::path train_path;
  std::optional<std::filesystem::path> dev_path;
  std::optional<std::filesystem::path> test_path;
  std::filesystem::path output_dir;

  model::ModelSpec spec() const;
  // Throws ConfigError on the first violated constraint.
  void validate() const;
};

// Paper profile: lr 1e-5, 5 epochs, batch 16, gamma 2. Toy profile: the same
// with lr 1e-3 and 200 epochs.
TrainConfig paper_profile();
TrainConfig toy_profile();
TrainConfig profile_by_name(std::string_view name);

// Every field except the paths; key order is fixed.
nlohmann::json to_json(const TrainConfig& config);
// Overlays the keys present in `json`. Unknown keys raise ConfigError.
void apply_json(TrainConfig& config, const nlohmann::json& json);
// Parses a JSON config file into an object; ConfigError otherwise.
nlohmann::json read_config_file(const std::filesystem::path& path);
// Reads a JSON config file. A top-level "profile" key selects the base
// profile; the remaining keys override it.
TrainConfig load_config(const std::filesystem::path& path);

// SHA-256 of the canonical JSON form; paths do not contribute.
std::string config_hash(const TrainConfig& config);

}  // namespace armi::harness
