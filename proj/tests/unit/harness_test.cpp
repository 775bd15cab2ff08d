// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "armi/errors.hpp"
#include "armi/harness/checkpoint.hpp"
#include "armi/harness/config.hpp"
#include "armi/harness/prediction_file.hpp"
#include "armi/harness/trainer.hpp"
#include "armi/harness/workflows.hpp"
#include "fixtures.hpp"

using namespace armi;
using namespace armi::harness;
using model::TaskSet;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& path, const std::string& body) {
  std::ofstream(path, std::ios::binary) << body;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    auto& row = rows.emplace_back();
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      row.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
  }
  return rows;
}

TrainConfig quick_config(std::string_view arch, TaskSet tasks, std::size_t epochs = 4) {
  auto c = test_support::small_train_config(arch, tasks);
  c.epochs = epochs;
  c.train_path = test_support::fixture_path("synthetic64.tsv");
  return c;
}

TrainResult quick_train(const TrainConfig& c) { return train(c, load_train_data(c)); }

}  // namespace

TEST(Config, Validation) {
  auto c = toy_profile();
  EXPECT_NO_THROW(c.validate());
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = toy_profile();
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = toy_profile();
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = toy_profile();
  c.split_fraction = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.split_fraction = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c.split_fraction = 1.0;
  EXPECT_NO_THROW(c.validate());
  c = toy_profile();
  c.architecture = "ST_ATT";
  EXPECT_THROW(c.validate(), ConfigError);
  c.tasks = TaskSet::kTask2;
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(profile_by_name("huge"), ConfigError);
  EXPECT_THROW(parse_task2_loss("mse"), ConfigError);
}

TEST(Config, ProfilesAndFileOverlay) {
  const auto paper = paper_profile();
  EXPECT_EQ(paper.learning_rate, 1e-5);
  EXPECT_EQ(paper.epochs, 5u);
  EXPECT_EQ(paper.batch_size, 16u);
  EXPECT_EQ(paper.gamma, 2.0);
  EXPECT_EQ(toy_profile().learning_rate, 1e-3);

  const auto dir = test_support::scratch_dir("config_overlay");
  spit(dir / "run.json", R"({"profile": "paper", "epochs": 9, "encoder": {"num_layers": 3}})");
  const auto c = load_config(dir / "run.json");
  EXPECT_EQ(c.profile, "paper");
  EXPECT_EQ(c.learning_rate, 1e-5);
  EXPECT_EQ(c.epochs, 9u);
  EXPECT_EQ(c.encoder.num_layers, 3u);

  spit(dir / "typo.json", R"({"epohcs": 9})");
  EXPECT_THROW(load_config(dir / "typo.json"), ConfigError);
  spit(dir / "broken.json", "{");
  EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);

  TrainConfig round = toy_profile();
  round.seed = 77;
  round.task2_loss = Task2Loss::kCrossEntropy;
  TrainConfig back = paper_profile();
  apply_json(back, to_json(round));
  EXPECT_EQ(to_json(back), to_json(round));
}

TEST(Config, HashIgnoresPathsButNotSettings) {
  auto a = toy_profile();
  auto b = a;
  b.output_dir = "/elsewhere";
  b.train_path = "/data/other.tsv";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 64u);
}

TEST(Training, LossFallsAndReportIsComplete) {
  auto c = quick_config("MT_ATT", TaskSet::kBoth, 6);
  const auto r = quick_train(c);
  ASSERT_EQ(r.report.epochs.size(), 6u);
  EXPECT_LE(r.report.epochs.back().total_loss, r.report.epochs.front().total_loss);
  EXPECT_EQ(r.report.train_size + r.report.dev_size, 64u);
  EXPECT_EQ(r.report.alpha.size(), 8u);
  EXPECT_TRUE(r.report.epochs.front().dev.has_value());
  EXPECT_TRUE(r.report.final_train->task1 && r.report.final_train->task2);
  EXPECT_EQ(r.report.checkpoint_epoch, 6u);
  EXPECT_EQ(run_report_from_json(to_json(r.report)), r.report);
  EXPECT_NE(format_run_report(r.report).find("MT_ATT"), std::string::npos);
}

TEST(Training, SingleTaskModelHasNoOtherTaskState) {
  const auto r = quick_train(quick_config("ST_CLS", TaskSet::kTask1, 2));
  for (const auto& e : r.model.parameters().entries()) EXPECT_FALSE(e.name.starts_with("head.task2")) << e.name;
  EXPECT_FALSE(r.report.epochs.front().task2_loss.has_value());
  EXPECT_TRUE(r.report.alpha.empty());
  EXPECT_FALSE(r.report.final_train->task2.has_value());
}

TEST(Training, SameSeedSameBytes) {
  const auto c = quick_config("MT_ATT", TaskSet::kBoth, 3);
  auto a = quick_train(c);
  auto b = quick_train(c);
  EXPECT_EQ(serialize_checkpoint(a.model, a.vocab, a.metadata), serialize_checkpoint(b.model, b.vocab, b.metadata));
  EXPECT_EQ(to_json(a.report).dump(), to_json(b.report).dump());
  auto d = c;
  d.seed = 1;
  auto e = quick_train(d);
  EXPECT_NE(serialize_checkpoint(a.model, a.vocab, a.metadata), serialize_checkpoint(e.model, e.vocab, e.metadata));
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  auto r = quick_train(quick_config("MT_ATT", TaskSet::kBoth, 2));
  const auto dir = test_support::scratch_dir("ckpt_roundtrip");
  save_checkpoint(dir / "a.ckpt", r.model, r.vocab, r.metadata);
  auto loaded = load_checkpoint(dir / "a.ckpt");
  EXPECT_EQ(loaded.metadata, r.metadata);
  EXPECT_EQ(loaded.vocab, r.vocab);
  save_checkpoint(dir / "b.ckpt", loaded.model, loaded.vocab, loaded.metadata);
  EXPECT_EQ(slurp(dir / "a.ckpt"), slurp(dir / "b.ckpt"));

  const auto data = load_train_data(quick_config("MT_ATT", TaskSet::kBoth));
  const auto rendered = render_all(data.dev, r.metadata.preprocess);
  EXPECT_EQ(infer_all(r.model, r.vocab, rendered), infer_all(loaded.model, loaded.vocab, rendered));
}

TEST(Checkpoint, CorruptionIsDetected) {
  auto r = quick_train(quick_config("ST_ATT", TaskSet::kTask2, 1));
  auto bytes = serialize_checkpoint(r.model, r.vocab, r.metadata);
  EXPECT_NO_THROW(deserialize_checkpoint(bytes));
  auto flipped = bytes;
  flipped[flipped.size() - 3] ^= 0x40;
  EXPECT_THROW(deserialize_checkpoint(flipped), DataError);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() - 4)), DataError);
  EXPECT_THROW(deserialize_checkpoint("ARMI-CKPT 99\n2\n{}"), DataError);
  EXPECT_THROW(deserialize_checkpoint("not a checkpoint"), DataError);
  EXPECT_THROW(load_checkpoint("/nonexistent/model.ckpt"), DataError);
}

TEST(Predictions, FileRoundTripIsExact) {
  PredictionTable t;
  t.ids = {"a", "b"};
  t.logits.task1 = std::vector<double>{0.1, -1.0 / 3.0};
  t.logits.task2 = std::vector<std::vector<double>>{{1e-300, 2, 3, 4, 5, 6, 7, 8}, {0.7, 0, 0, 0, 0, 0, 0, -2.5e10}};
  const auto dir = test_support::scratch_dir("pred_roundtrip");
  write_predictions(dir / "p.tsv", t);
  const auto back = read_predictions(dir / "p.tsv");
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.logits, t.logits);
  const auto rows = read_rows(dir / "p.tsv");
  EXPECT_EQ(rows[0], (std::vector<std::string>{"id", "misogyny", "category", "task1_logit", "task2_logits"}));
  EXPECT_EQ(rows[1][1], "misogyny");
  EXPECT_EQ(rows[2][1], "none");
  EXPECT_EQ(rows[1][2], "Threat of violence");
  EXPECT_EQ(rows[2][2], "None");
  spit(dir / "empty.tsv", "");
  EXPECT_THROW(read_predictions(dir / "empty.tsv"), DataError);
}

TEST(Workflows, PredictLeavesUncoveredTaskEmpty) {
  auto r = quick_train(quick_config("ST_CLS", TaskSet::kTask1, 1));
  const auto dir = test_support::scratch_dir("predict_st");
  save_checkpoint(dir / "m.ckpt", r.model, r.vocab, r.metadata);
  const auto table = predict_file(dir / "m.ckpt", test_support::fixture_path("synthetic64.tsv"), dir / "p.tsv");
  EXPECT_EQ(table.ids.size(), 64u);
  const auto rows = read_rows(dir / "p.tsv");
  ASSERT_EQ(rows.size(), 65u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 5u);
    EXPECT_FALSE(rows[i][1].empty());
    EXPECT_TRUE(rows[i][2].empty());
    EXPECT_TRUE(rows[i][4].empty());
  }
}

TEST(Workflows, EnsembleTiesResolveToNone) {
  const auto dir = test_support::scratch_dir("ensemble_tie");
  PredictionTable a, b;
  a.ids = b.ids = {"x"};
  a.logits.task2 = std::vector<std::vector<double>>{{2, 0, 0, 0, 0, 0, 0, 0}};
  b.logits.task2 = std::vector<std::vector<double>>{{0, 0, 0, 0, 0, 0, 0, 2}};
  write_predictions(dir / "a.tsv", a);
  write_predictions(dir / "b.tsv", b);
  const std::vector<std::filesystem::path> inputs{dir / "a.tsv", dir / "b.tsv"};
  const auto merged = ensemble_files(inputs, dir / "m.tsv");
  EXPECT_EQ(merged.logits.task2->at(0)[0], 1.0);
  const auto rows = read_rows(dir / "m.tsv");
  EXPECT_EQ(rows[1][2], "None");
  EXPECT_EQ(rows[0].size(), 7u);
}

TEST(Workflows, EnsembleNamesTheFirstDivergentId) {
  const auto dir = test_support::scratch_dir("ensemble_ids");
  PredictionTable a, b;
  a.ids = {"r1", "r2", "r3"};
  b.ids = {"r1", "r9", "r3"};
  a.logits.task1 = b.logits.task1 = std::vector<double>{0, 1, 2};
  write_predictions(dir / "a.tsv", a);
  write_predictions(dir / "b.tsv", b);
  const std::vector<std::filesystem::path> inputs{dir / "a.tsv", dir / "b.tsv"};
  try {
    ensemble_files(inputs, dir / "m.tsv");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("r2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("r9"), std::string::npos) << msg;
  }
}

TEST(Workflows, EvaluateRejectsEmptyOrUnlabeledData) {
  auto r = quick_train(quick_config("MT_CLS", TaskSet::kBoth, 1));
  const auto dir = test_support::scratch_dir("evaluate_inputs");
  save_checkpoint(dir / "m.ckpt", r.model, r.vocab, r.metadata);
  spit(dir / "empty.tsv", "id\ttext\tmisogyny\tcategory\n");
  EXPECT_THROW(evaluate_checkpoint(dir / "m.ckpt", dir / "empty.tsv"), DataError);
  spit(dir / "unlabeled.tsv", "id\ttext\na\tb\n");
  EXPECT_THROW(evaluate_checkpoint(dir / "m.ckpt", dir / "unlabeled.tsv"), DataError);
  spit(dir / "vocab.txt", "[PAD]\n[UNK]\n[CLS]\n[SEP]\nzzz\n");
  EXPECT_THROW(evaluate_checkpoint(dir / "m.ckpt", test_support::fixture_path("synthetic64.tsv"), dir / "vocab.txt"),
               DataError);
  const auto m = evaluate_checkpoint(dir / "m.ckpt", test_support::fixture_path("synthetic64.tsv"));
  EXPECT_EQ(m.task2->num_examples, 64u);
}
