// SPDX-License-Identifier: Apache-2.0
#include "armi/harness/workflows.hpp"

#include "armi/errors.hpp"
#include "armi/harness/checkpoint.hpp"
#include "armi/harness/trainer.hpp"
#include "armi/objectives/ensemble.hpp"

namespace armi::harness {

TaskMetrics evaluate_checkpoint(const std::filesystem::path& checkpoint, const std::filesystem::path& data,
                                const std::optional<std::filesystem::path>& vocab_path) {
  auto ckpt = load_checkpoint(checkpoint);
  if (vocab_path && text::Vocabulary::load(*vocab_path) != ckpt.vocab) {
    throw DataError(vocab_path->string() + ": vocabulary differs from the one stored in " + checkpoint.string());
  }
  const auto loaded = text::load_tsv(data);
  if (loaded.examples.empty()) throw DataError(data.string() + ": no examples to evaluate");
  if (!loaded.labeled) throw DataError(data.string() + ": evaluation needs gold labels");
  const auto rendered = render_all(loaded.examples, ckpt.metadata.preprocess);
  return evaluate_logits(ckpt.model.spec(), infer_all(ckpt.model, ckpt.vocab, rendered), loaded.examples);
}

PredictionTable predict_file(const std::filesystem::path& checkpoint, const std::filesystem::path& data,
                             const std::filesystem::path& out) {
  auto ckpt = load_checkpoint(checkpoint);
  const auto loaded = text::load_tsv(data);
  PredictionTable table;
  for (const auto& ex : loaded.examples) table.ids.push_back(ex.id);
  const auto rendered = render_all(loaded.examples, ckpt.metadata.preprocess);
  table.logits = infer_all(ckpt.model, ckpt.vocab, rendered);
  write_predictions(out, table);
  return table;
}

PredictionTable ensemble_files(std::span<const std::filesystem::path> inputs, const std::filesystem::path& out) {
  if (inputs.empty()) throw ConfigError("ensemble: no prediction files given");
  std::vector<PredictionTable> tables;
  for (const auto& p : inputs) tables.push_back(read_predictions(p));
  const auto& ref = tables.front();
  std::vector<model::TaskLogits> members;
  for (std::size_t m = 0; m < tables.size(); ++m) {
    const auto& ids = tables[m].ids;
    const std::size_t common = std::min(ids.size(), ref.ids.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (ids[i] != ref.ids[i]) {
        throw DataError("ensemble: " + inputs[m].string() + " row " + std::to_string(i + 1) + " has id '" +
                        ids[i] + "' where " + inputs[0].string() + " has '" + ref.ids[i] + "'");
      }
    }
    if (ids.size() != ref.ids.size()) {
      const auto& longer = ids.size() > ref.ids.size() ? ids : ref.ids;
      throw DataError("ensemble: id '" + longer[common] + "' is missing from " +
                      (ids.size() > ref.ids.size() ? inputs[0] : inputs[m]).string());
    }
    if (tables[m].logits.task1.has_value() != ref.logits.task1.has_value() ||
        tables[m].logits.task2.has_value() != ref.logits.task2.has_value()) {
      throw DataError("ensemble: " + inputs[m].string() + " covers different tasks than " + inputs[0].string());
    }
    members.push_back(tables[m].logits);
  }
  auto merged = objectives::ensemble_logits(members);
  PredictionTable result;
  result.ids = ref.ids;
  result.logits = std::move(merged.mean);
  result.task1_probability = std::move(merged.task1_probability);
  result.task2_probability = std::move(merged.task2_probability);
  write_predictions(out, result);
  return result;
}

}  // namespace armi::harness
