// SPDX-License-Identifier: Apache-2.0
#include "armi/harness/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "armi/errors.hpp"
#include "armi/math/adam.hpp"
#include "armi/math/rng.hpp"
#include "armi/model/label_space.hpp"
#include "armi/harness/prediction_file.hpp"
#include "armi/objectives/loss_ops.hpp"
#include "armi/text/preprocess.hpp"
#include "armi/text/token_batch.hpp"

namespace armi::harness {
namespace {

constexpr std::uint64_t kShuffleStream = 0x5eed;

std::vector<std::size_t> labels_of(std::span<const text::RawExample> examples, bool task1,
                                   std::string_view set_name) {
  std::vector<std::size_t> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    const auto& label = task1 ? ex.task1_label : ex.task2_label;
    if (!label) {
      throw DataError(std::string(set_name) + " example '" + ex.id + "' has no " +
                      (task1 ? "task-1 (misogyny)" : "task-2 (category)") + " label");
    }
    out.push_back(*label);
  }
  return out;
}

text::TokenBatch make_batch(std::span<const std::string> rendered, const text::Vocabulary& vocab,
                            std::size_t cap) {
  std::size_t longest = 3;
  for (const auto& r : rendered) longest = std::max(longest, text::rendered_length(r));
  return text::encode_batch(rendered, vocab, std::min(longest, cap));
}

std::vector<std::vector<double>> snapshot(const ParameterSet& params) {
  std::vector<std::vector<double>> out;
  for (const auto& e : params.entries()) out.emplace_back(e.tensor.values().begin(), e.tensor.values().end());
  return out;
}

void restore(ParameterSet& params, const std::vector<std::vector<double>>& values) {
  const auto& entries = params.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Tensor t = entries[i].tensor;
    std::copy(values[i].begin(), values[i].end(), t.mutable_values().begin());
  }
}

}  // namespace

std::vector<std::string> render_all(std::span<const text::RawExample> examples,
                                    const text::PreprocessOptions& options) {
  std::vector<std::string> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(text::preprocess(ex.text, options).rendered);
  return out;
}

model::TaskLogits infer_all(const model::MultiTaskModel& model, const text::Vocabulary& vocab,
                            std::span<const std::string> rendered, std::size_t chunk) {
  model::TaskLogits out;
  const auto& spec = model.spec();
  if (spec.has_task1()) out.task1.emplace();
  if (spec.has_task2()) out.task2.emplace();
  for (std::size_t start = 0; start < rendered.size(); start += chunk) {
    const auto part = rendered.subspan(start, std::min(chunk, rendered.size() - start));
    const auto logits = model.infer(make_batch(part, vocab, model.encoder_config().max_len));
    if (logits.task1) out.task1->insert(out.task1->end(), logits.task1->begin(), logits.task1->end());
    if (logits.task2) out.task2->insert(out.task2->end(), logits.task2->begin(), logits.task2->end());
  }
  return out;
}

TaskMetrics evaluate_logits(const model::ModelSpec& spec, const model::TaskLogits& logits,
                            std::span<const text::RawExample> examples) {
  const auto preds = model::predict(logits);
  TaskMetrics out;
  if (spec.has_task1()) {
    const auto golds = labels_of(examples, true, "evaluation");
    out.task1 = objectives::evaluate(*preds.task1, golds, LabelSpace::kTask1);
  }
  if (spec.has_task2()) {
    const auto golds = labels_of(examples, false, "evaluation");
    out.task2 = objectives::evaluate(*preds.task2, golds, LabelSpace::kCategories);
  }
  return out;
}

TrainData load_train_data(const TrainConfig& config) {
  auto loaded = text::load_tsv(config.train_path);
  if (loaded.examples.empty()) throw DataError(config.train_path.string() + ": no examples");
  TrainData data;
  if (config.dev_path) {
    data.train = std::move(loaded.examples);
    data.dev = text::load_tsv(*config.dev_path).examples;
  } else {
    auto split = text::split_train_dev(loaded.examples, config.split_fraction, config.seed);
    data.train = std::move(split.train);
    data.dev = std::move(split.dev);
  }
  if (config.test_path) data.test = text::load_tsv(*config.test_path).examples;
  return data;
}

TrainResult train(const TrainConfig& config, const TrainData& data, std::ostream* log) {
  config.validate();
  const auto spec = config.spec();
  if (data.train.empty()) throw DataError("training set is empty");
  const text::PreprocessOptions prep{config.remove_diacritics};

  const auto train_text = render_all(data.train, prep);
  const auto dev_text = render_all(data.dev, prep);
  auto vocab = text::Vocabulary::build(train_text, config.min_token_count);

  std::optional<std::vector<std::size_t>> y1, y2;
  if (spec.has_task1()) y1 = labels_of(data.train, true, "training");
  if (spec.has_task2()) y2 = labels_of(data.train, false, "training");

  RunReport report;
  report.architecture = spec.name();
  report.tasks = std::string(model::to_string(spec.tasks));
  report.task2_loss = spec.has_task2() ? std::string(to_string(config.task2_loss)) : "";
  report.seed = config.seed;
  report.config_hash = config_hash(config);
  report.train_size = data.train.size();
  report.dev_size = data.dev.size();

  objectives::FocalParams focal;
  focal.gamma = config.gamma;
  if (y2) {
    report.train_category_counts.assign(LabelSpace::kNumCategories, 0);
    for (auto y : *y2) ++report.train_category_counts[y];
    if (config.task2_loss == Task2Loss::kFocal) {
      focal.alpha = objectives::compute_alpha(report.train_category_counts);
      report.alpha = focal.alpha;
    }
  }

  model::EncoderConfig enc = config.encoder;
  enc.vocab_size = vocab.size();
  enc.seed = config.seed;
  model::MultiTaskModel net(enc, spec);
  Adam adam(net.parameters().tensors(), AdamOptions{.learning_rate = config.learning_rate});
  Rng shuffle_rng(config.seed, kShuffleStream);

  const std::size_t n = data.train.size();
  const bool dev_eval = !data.dev.empty();
  double best_score = -1.0;
  std::size_t best_epoch = 0;
  std::vector<std::vector<double>> best_params;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = shuffle_rng.permutation(n);
    double sum1 = 0.0, sum2 = 0.0, sum_total = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, n - start);
      std::vector<std::string> rows;
      std::vector<std::size_t> b1, b2;
      for (std::size_t i = start; i < start + count; ++i) {
        rows.push_back(train_text[order[i]]);
        if (y1) b1.push_back((*y1)[order[i]]);
        if (y2) b2.push_back((*y2)[order[i]]);
      }
      try {
        const auto batch = make_batch(rows, vocab, enc.max_len);
        const auto fwd = net.forward(batch);
        Tensor loss;
        std::optional<Tensor> l1, l2;
        if (y1) l1 = objectives::binary_cross_entropy(*fwd.logits.task1, b1);
        if (y2) {
          l2 = config.task2_loss == Task2Loss::kFocal ? objectives::focal(*fwd.logits.task2, b2, focal)
                                                       : objectives::cross_entropy(*fwd.logits.task2, b2);
        }
        if (l1 && l2) loss = objectives::combine_task_losses(*l1, *l2, config.lambda2);
        else loss = l1 ? *l1 : *l2;
        loss.backward();
        adam.step();
        adam.zero_grad();
        const double w = static_cast<double>(count);
        if (l1) sum1 += w * l1->item();
        if (l2) sum2 += w * l2->item();
        sum_total += w * loss.item();
      } catch (const NumericalError& e) {
        throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ", batch starting at " +
                             std::to_string(start) + " (lr " + format_double(config.learning_rate) +
                             "): " + e.what());
      }
    }
    EpochRecord rec;
    rec.epoch = epoch;
    const double dn = static_cast<double>(n);
    if (y1) rec.task1_loss = sum1 / dn;
    if (y2) rec.task2_loss = sum2 / dn;
    rec.total_loss = sum_total / dn;
    if (dev_eval) rec.dev = evaluate_logits(spec, infer_all(net, vocab, dev_text), data.dev);
    if (log) {
      *log << "epoch " << epoch << "/" << config.epochs << " loss " << format_double(rec.total_loss);
      if (rec.dev && rec.dev->task1) *log << " dev_task1_f1 " << format_double(rec.dev->task1->macro_f1);
      if (rec.dev && rec.dev->task2) *log << " dev_task2_f1 " << format_double(rec.dev->task2->macro_f1);
      *log << '\n';
    }

    bool stop = false;
    if (config.patience > 0 && rec.dev) {
      const double score = rec.dev->task2 ? rec.dev->task2->macro_f1 : rec.dev->task1->macro_f1;
      if (score > best_score) {
        best_score = score;
        best_epoch = epoch;
        best_params = snapshot(net.parameters());
      } else if (epoch - best_epoch >= config.patience) {
        stop = true;
      }
    }
    report.epochs.push_back(std::move(rec));
    if (stop) break;
  }

  report.checkpoint_epoch = report.epochs.back().epoch;
  if (!best_params.empty() && best_epoch != report.checkpoint_epoch) {
    restore(net.parameters(), best_params);
    report.checkpoint_epoch = best_epoch;
  }

  round_parameters_to_float(net);
  report.final_train = evaluate_logits(spec, infer_all(net, vocab, train_text), data.train);
  if (data.test) {
    report.test = evaluate_logits(spec, infer_all(net, vocab, render_all(*data.test, prep)), *data.test);
  }

  CheckpointMetadata meta{config.seed, report.checkpoint_epoch, report.config_hash, prep};
  return TrainResult{std::move(net), std::move(vocab), std::move(meta), std::move(report)};
}

void write_run_outputs(const std::filesystem::path& dir, TrainResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  save_checkpoint(dir / "model.ckpt", result.model, result.vocab, result.metadata);
  result.vocab.save(dir / "vocab.txt");
  const auto write_text = [](const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << body;
    if (!out) throw DataError("failed writing " + path.string());
  };
  write_text(dir / "run_report.json", to_json(result.report).dump(2) + "\n");
  write_text(dir / "run_report.txt", format_run_report(result.report));
}

TrainResult train_from_config(const TrainConfig& config, std::ostream* log) {
  config.validate();
  if (config.train_path.empty()) throw ConfigError("no training file given");
  if (config.output_dir.empty()) throw ConfigError("no output directory given");
  auto result = train(config, load_train_data(config), log);
  write_run_outputs(config.output_dir, result);
  return result;
}

}  // namespace armi::harness
