// SPDX-License-Identifier: Apache-2.0
// armi: train, evaluate, predict with and ensemble misogyny classifiers.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "armi/errors.hpp"
#include "armi/harness/config.hpp"
#include "armi/harness/diagnostics.hpp"
#include "armi/harness/run_report.hpp"
#include "armi/harness/trainer.hpp"
#include "armi/harness/workflows.hpp"
#include "armi/objectives/metrics.hpp"

namespace fs = std::filesystem;
using namespace armi;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct TrainFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> profile;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> train, dev, test, output;
  std::optional<std::string> arch, task, loss;
  std::optional<double> gamma, lambda2, lr, split;
  std::optional<std::size_t> epochs, batch_size, patience;
  std::optional<std::size_t> layers, dim, heads, ffn, max_len;
  bool per_task_vertical = false;
  bool remove_diacritics = false;
  bool quiet = false;
};

harness::TrainConfig resolve_config(const TrainFlags& f) {
  nlohmann::json file = nlohmann::json::object();
  if (f.config_path) file = harness::read_config_file(*f.config_path);
  std::string profile = "toy";
  if (f.profile) profile = *f.profile;
  else if (file.contains("profile") && file["profile"].is_string()) profile = file["profile"].get<std::string>();

  auto c = harness::profile_by_name(profile);
  harness::apply_json(c, file);
  c.profile = profile;
  if (f.seed) c.seed = *f.seed;
  if (f.train) c.train_path = *f.train;
  if (f.dev) c.dev_path = *f.dev;
  if (f.test) c.test_path = *f.test;
  if (f.output) c.output_dir = *f.output;
  if (f.arch) {
    c.architecture = *f.arch;
    if (!f.task) c.tasks = c.architecture.rfind("MT_", 0) == 0 ? model::TaskSet::kBoth : c.tasks;
  }
  if (f.task) c.tasks = model::parse_task_set(*f.task);
  if (f.loss) c.task2_loss = harness::parse_task2_loss(*f.loss);
  if (f.gamma) c.gamma = *f.gamma;
  if (f.lambda2) c.lambda2 = *f.lambda2;
  if (f.lr) c.learning_rate = *f.lr;
  if (f.split) c.split_fraction = *f.split;
  if (f.epochs) c.epochs = *f.epochs;
  if (f.batch_size) c.batch_size = *f.batch_size;
  if (f.patience) c.patience = *f.patience;
  if (f.layers) c.encoder.num_layers = *f.layers;
  if (f.dim) c.encoder.model_dim = *f.dim;
  if (f.heads) c.encoder.num_heads = *f.heads;
  if (f.ffn) c.encoder.ffn_dim = *f.ffn;
  if (f.max_len) c.encoder.max_len = *f.max_len;
  if (f.per_task_vertical) c.per_task_vertical = true;
  if (f.remove_diacritics) c.remove_diacritics = true;
  return c;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << body;
}

int run_gradcheck(const std::vector<std::string>& archs, const std::string& task, std::uint64_t seed,
                  const std::string& loss, const GradCheckOptions& options) {
  bool all_passed = true;
  for (const auto& arch : archs) {
    const bool multi = arch.rfind("MT_", 0) == 0;
    const auto spec = model::ModelSpec::parse(arch, multi ? model::TaskSet::kBoth : model::parse_task_set(task));
    const auto r = harness::check_architecture_gradients(spec, seed, harness::parse_task2_loss(loss), options);
    std::cout << (r.passed ? "PASS " : "FAIL ") << spec.name() << " (" << model::to_string(spec.tasks)
              << "): " << r.coordinates << " coordinates, max relative error " << r.max_relative_error;
    if (!r.passed) {
      std::cout << " at " << r.worst_parameter << "[" << r.worst_index << "] (analytic " << r.worst_analytic
                << ", numeric " << r.worst_numeric << ")";
    }
    std::cout << '\n';
    all_passed = all_passed && r.passed;
  }
  return all_passed ? kOk : kNumerical;
}

int render_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (json.contains("epochs")) {
    std::cout << harness::format_run_report(harness::run_report_from_json(json));
  } else if (json.contains("per_class")) {
    std::cout << objectives::format_report(objectives::metrics_from_json(json));
  } else if (json.contains("task1") || json.contains("task2")) {
    std::cout << harness::format_task_metrics(harness::task_metrics_from_json(json), "Evaluation");
  } else {
    throw DataError(path.string() + ": not a metrics or run report");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-task misogyny identification and categorization"};
  app.require_subcommand(1);

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Train a model and write checkpoint and reports");
  train->add_option("--config", tf.config_path, "JSON config file")->check(CLI::ExistingFile);
  train->add_option("--profile", tf.profile, "Base profile: paper or toy");
  train->add_option("--seed", tf.seed, "Random seed");
  train->add_option("--train", tf.train, "Training TSV");
  train->add_option("--dev", tf.dev, "Dev TSV (default: split of the training file)");
  train->add_option("--test", tf.test, "Labeled test TSV scored after training");
  train->add_option("-o,--output", tf.output, "Output directory");
  train->add_option("--arch", tf.arch, "ST_CLS, ST_ATT, ST_VHATT, MT_CLS, MT_ATT or MT_VHATT");
  train->add_option("--task", tf.task, "task1, task2 or both");
  train->add_option("--loss", tf.loss, "Task-2 loss: ce or fl");
  train->add_option("--gamma", tf.gamma, "Focal loss gamma");
  train->add_option("--lambda2", tf.lambda2, "Task-2 loss weight in multi-task training");
  train->add_option("--lr", tf.lr, "Adam learning rate");
  train->add_option("--epochs", tf.epochs, "Number of epochs");
  train->add_option("--batch-size", tf.batch_size, "Batch size");
  train->add_option("--split", tf.split, "Training fraction when no dev file is given");
  train->add_option("--patience", tf.patience, "Early-stopping patience in epochs (0: off)");
  train->add_option("--layers", tf.layers, "Encoder layers");
  train->add_option("--dim", tf.dim, "Model width");
  train->add_option("--heads", tf.heads, "Attention heads");
  train->add_option("--ffn", tf.ffn, "Feed-forward width");
  train->add_option("--max-len", tf.max_len, "Maximum sequence length");
  train->add_flag("--per-task-vertical", tf.per_task_vertical, "MT_VHATT: separate vertical stage per task");
  train->add_flag("--remove-diacritics", tf.remove_diacritics, "Strip Arabic diacritics");
  train->add_flag("-q,--quiet", tf.quiet, "No per-epoch progress");

  std::string ckpt, data, out, vocab, json_out, text_out;
  auto* eval = app.add_subcommand("eval", "Score a checkpoint on a labeled TSV");
  eval->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
  eval->add_option("--data", data, "Labeled TSV")->required();
  eval->add_option("--vocab", vocab, "Vocabulary file that must match the checkpoint");
  eval->add_option("--json-out", json_out, "Write the report as JSON");
  eval->add_option("--text-out", text_out, "Write the report as text");

  auto* predict = app.add_subcommand("predict", "Write predictions with logits for a TSV");
  predict->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
  predict->add_option("--data", data, "Input TSV")->required();
  predict->add_option("-o,--output", out, "Prediction file")->required();

  std::vector<std::string> inputs;
  auto* ensemble = app.add_subcommand("ensemble", "Average the logits of prediction files");
  ensemble->add_option("inputs", inputs, "Prediction files")->required();
  ensemble->add_option("-o,--output", out, "Merged prediction file")->required();

  std::vector<std::string> archs{"ST_CLS", "ST_ATT", "ST_VHATT", "MT_CLS", "MT_ATT", "MT_VHATT"};
  std::string gc_task = "task2", gc_loss = "fl";
  std::uint64_t gc_seed = 0;
  GradCheckOptions gc_options;
  auto* gradcheck = app.add_subcommand("gradcheck", "Verify gradients against finite differences");
  gradcheck->add_option("--arch", archs, "Architectures to check (default: all six)");
  gradcheck->add_option("--task", gc_task, "Task for single-task architectures");
  gradcheck->add_option("--loss", gc_loss, "Task-2 loss: ce or fl");
  gradcheck->add_option("--seed", gc_seed, "Random seed");
  gradcheck->add_option("--tolerance", gc_options.tolerance, "Maximum relative error")->capture_default_str();
  gradcheck->add_option("--step", gc_options.step, "Finite-difference step")->capture_default_str();
  gradcheck->add_option("--floor", gc_options.denominator_floor, "Relative-error denominator floor")
      ->capture_default_str();

  std::string report_path;
  auto* report = app.add_subcommand("report", "Render a stored JSON report as text");
  report->add_option("path", report_path, "run_report.json or metrics JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) {
      const auto config = resolve_config(tf);
      auto result = harness::train_from_config(config, tf.quiet ? nullptr : &std::cerr);
      std::cout << harness::format_run_report(result.report);
      std::cout << "wrote " << (config.output_dir / "model.ckpt").string() << '\n';
    } else if (*eval) {
      std::optional<fs::path> vp;
      if (!vocab.empty()) vp = vocab;
      const auto metrics = harness::evaluate_checkpoint(ckpt, data, vp);
      const auto text = harness::format_task_metrics(metrics, "Evaluation");
      std::cout << text;
      if (!json_out.empty()) write_file(json_out, harness::to_json(metrics).dump(2) + "\n");
      if (!text_out.empty()) write_file(text_out, text);
    } else if (*predict) {
      const auto table = harness::predict_file(ckpt, data, out);
      std::cout << "wrote " << table.ids.size() << " predictions to " << out << '\n';
    } else if (*ensemble) {
      std::vector<fs::path> paths(inputs.begin(), inputs.end());
      const auto table = harness::ensemble_files(paths, out);
      std::cout << "ensembled " << paths.size() << " files, " << table.ids.size() << " rows, into " << out
                << '\n';
    } else if (*gradcheck) {
      return run_gradcheck(archs, gc_task, gc_seed, gc_loss, gc_options);
    } else if (*report) {
      return render_report(report_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
