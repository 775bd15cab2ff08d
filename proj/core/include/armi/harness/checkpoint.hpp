// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "armi/model/model.hpp"
#include "armi/text/preprocess.hpp"
#include "armi/text/vocabulary.hpp"

namespace armi::harness {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointMetadata {
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
  std::string config_hash;
  text::PreprocessOptions preprocess;

  friend bool operator==(const CheckpointMetadata&, const CheckpointMetadata&) = default;
};

struct LoadedCheckpoint {
  model::MultiTaskModel model;
  text::Vocabulary vocab;
  CheckpointMetadata metadata;
};

// Parameters are stored as 32-bit floats. Rounds the model's parameters to
// float in place so that the live model and a reloaded copy agree exactly.
void round_parameters_to_float(model::MultiTaskModel& model);

// Layout: "ARMI-CKPT <version>\n", the header byte length in decimal and
// "\n", a JSON header, then little-endian float32 values of every parameter
// in declaration order. The header records the payload's SHA-256.
std::string serialize_checkpoint(const model::MultiTaskModel& model, const text::Vocabulary& vocab,
                                 const CheckpointMetadata& metadata);
LoadedCheckpoint deserialize_checkpoint(const std::string& bytes, const std::string& source = "<memory>");

// Rounds `model` via round_parameters_to_float before writing.
void save_checkpoint(const std::filesystem::path& path, model::MultiTaskModel& model,
                     const text::Vocabulary& vocab, const CheckpointMetadata& metadata);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace armi::harness
