// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "armi/harness/checkpoint.hpp"
#include "armi/harness/config.hpp"
#include "armi/harness/run_report.hpp"
#include "armi/model/model.hpp"
#include "armi/text/dataset.hpp"
#include "armi/text/vocabulary.hpp"

namespace armi::harness {

struct TrainData {
  std::vector<text::RawExample> train;
  std::vector<text::RawExample> dev;
  std::optional<std::vector<text::RawExample>> test;
};

struct TrainResult {
  model::MultiTaskModel model;
  text::Vocabulary vocab;
  CheckpointMetadata metadata;
  RunReport report;
};

// Reads config.train_path; the dev set comes from config.dev_path when set,
// otherwise from a stratified split of the training file.
TrainData load_train_data(const TrainConfig& config);

// Builds the vocabulary and class weights from data.train, trains for
// config.epochs with a seeded per-epoch shuffle, and evaluates on data.dev
// after every epoch. The returned model's parameters are already rounded to
// their checkpoint precision. Progress lines go to `log` when given.
TrainResult train(const TrainConfig& config, const TrainData& data, std::ostream* log = nullptr);

// Writes model.ckpt, vocab.txt, run_report.json and run_report.txt.
void write_run_outputs(const std::filesystem::path& dir, TrainResult& result);

// load_train_data + train + write_run_outputs(config.output_dir).
TrainResult train_from_config(const TrainConfig& config, std::ostream* log = nullptr);

std::vector<std::string> render_all(std::span<const text::RawExample> examples,
                                    const text::PreprocessOptions& options);

// Gradient-free forward over `rendered` in fixed-size chunks. Each chunk is
// padded to its longest row, capped at the encoder's max_len.
model::TaskLogits infer_all(const model::MultiTaskModel& model, const text::Vocabulary& vocab,
                            std::span<const std::string> rendered, std::size_t chunk = 64);

// Metrics for every task the model covers. Examples lacking a needed gold
// label raise DataError.
TaskMetrics evaluate_logits(const model::ModelSpec& spec, const model::TaskLogits& logits,
                            std::span<const text::RawExample> examples);

}  // namespace armi::harness
