// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "armi/errors.hpp"
#include "armi/math/rng.hpp"
#include "armi/model/label_space.hpp"
#include "armi/objectives/ensemble.hpp"
#include "armi/objectives/metrics.hpp"

using namespace armi;
using namespace armi::objectives;
using model::TaskLogits;

namespace {

const std::vector<std::string_view> kBinary{"none", "misogyny"};
const std::vector<std::string_view> kCategories(LabelSpace::kCategories.begin(), LabelSpace::kCategories.end());

struct Oracle {
  double accuracy = 0, macro_p = 0, macro_r = 0, macro_f1 = 0;
};

// Counts tp/fp/fn per class straight from the label lists.
Oracle brute_force(const std::vector<std::size_t>& preds, const std::vector<std::size_t>& golds, std::size_t k) {
  Oracle o;
  std::size_t correct = 0, present = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i] == golds[i];
  o.accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());
  for (std::size_t c = 0; c < k; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (preds[i] == c && golds[i] == c) tp += 1;
      if (preds[i] == c && golds[i] != c) fp += 1;
      if (preds[i] != c && golds[i] == c) fn += 1;
    }
    if (tp + fn == 0) continue;
    ++present;
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp / (tp + fn);
    o.macro_p += p;
    o.macro_r += r;
    o.macro_f1 += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  o.macro_p /= static_cast<double>(present);
  o.macro_r /= static_cast<double>(present);
  o.macro_f1 /= static_cast<double>(present);
  return o;
}

}  // namespace

TEST(Metrics, PerfectPredictions) {
  const std::vector<std::size_t> y{0, 1, 2, 7, 7, 3};
  const auto r = evaluate(y, y, kCategories);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
  EXPECT_EQ(r.per_class.size(), 8u);
  EXPECT_EQ(r.per_class[4].support, 0u);
  EXPECT_EQ(r.per_class[4].f1, 0.0);
  EXPECT_EQ(r.confusion[7][7], 2u);
}

TEST(Metrics, BinaryExample) {
  const std::vector<std::size_t> golds{1, 1, 1, 0, 0};
  const std::vector<std::size_t> preds{1, 0, 1, 1, 0};
  const auto r = evaluate(preds, golds, kBinary);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
  EXPECT_DOUBLE_EQ(r.per_class[1].precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class[1].recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class[0].precision, 0.5);
  EXPECT_DOUBLE_EQ(r.per_class[0].recall, 0.5);
  EXPECT_DOUBLE_EQ(r.macro_f1, (2.0 / 3.0 + 0.5) / 2.0);
  EXPECT_EQ(r.per_class[1].label, "misogyny");
  EXPECT_EQ(r.num_examples, 5u);
}

TEST(Metrics, PredictedButAbsentClassCountsOnlyAsFalsePositive) {
  const std::vector<std::size_t> golds{0, 0, 1};
  const std::vector<std::size_t> preds{2, 0, 1};
  const auto r = evaluate(preds, golds, kCategories);
  EXPECT_EQ(r.per_class[2].precision, 0.0);
  EXPECT_EQ(r.per_class[2].support, 0u);
  EXPECT_DOUBLE_EQ(r.macro_recall, (0.5 + 1.0) / 2.0);
}

TEST(Metrics, MatchesBruteForceOnRandomData) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.below(600);
    std::vector<std::size_t> golds(n), preds(n);
    for (std::size_t i = 0; i < n; ++i) {
      golds[i] = rng.below(trial % 3 == 0 ? 4 : 8);
      preds[i] = rng.uniform() < 0.6 ? golds[i] : rng.below(8);
    }
    const auto r = evaluate(preds, golds, kCategories);
    const auto o = brute_force(preds, golds, 8);
    EXPECT_NEAR(r.accuracy, o.accuracy, 1e-12);
    EXPECT_NEAR(r.macro_precision, o.macro_p, 1e-12);
    EXPECT_NEAR(r.macro_recall, o.macro_r, 1e-12);
    EXPECT_NEAR(r.macro_f1, o.macro_f1, 1e-12);
  }
}

TEST(Metrics, InputErrors) {
  const std::vector<std::size_t> a{0, 1}, b{0};
  EXPECT_THROW(evaluate(a, b, kBinary), DimensionError);
  EXPECT_THROW(evaluate(std::vector<std::size_t>{}, std::vector<std::size_t>{}, kBinary), DataError);
  EXPECT_THROW(evaluate(std::vector<std::size_t>{2}, std::vector<std::size_t>{0}, kBinary), DataError);
}

TEST(Metrics, JsonRoundTripAndReportText) {
  const std::vector<std::size_t> golds{0, 3, 3, 5, 6, 0, 1};
  const std::vector<std::size_t> preds{0, 3, 1, 5, 0, 0, 1};
  const auto r = evaluate(preds, golds, kCategories);
  EXPECT_EQ(metrics_from_json(to_json(r)), r);
  const auto text = format_report(r, "task 2");
  for (auto name : kCategories) EXPECT_NE(text.find(name), std::string::npos) << name;
  EXPECT_NE(text.find("Precision"), std::string::npos);
  EXPECT_NE(text.find("macro avg"), std::string::npos);
  EXPECT_NE(text.find("accuracy"), std::string::npos);
}

TEST(Ensemble, MeanOfMembers) {
  TaskLogits a, b;
  a.task1 = std::vector<double>{1.0, -2.0};
  b.task1 = std::vector<double>{3.0, 0.0};
  a.task2 = std::vector<std::vector<double>>{{0, 0, 0, 0, 0, 0, 0, 2}, {4, 0, 0, 0, 0, 0, 0, 0}};
  b.task2 = std::vector<std::vector<double>>{{0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 4}};
  const std::vector<TaskLogits> members{a, b};
  const auto r = ensemble_logits(members);
  EXPECT_EQ(*r.mean.task1, (std::vector<double>{2.0, -1.0}));
  EXPECT_EQ(r.mean.task2->at(0)[7], 1.0);
  EXPECT_NEAR(r.task1_probability->at(0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  // Mean row 1 is {2,0,...,0,2}: a tie resolved to the lower index, None.
  EXPECT_EQ(r.predictions.task2->at(1), 0u);
  EXPECT_EQ(r.predictions.task2->at(0), 7u);
  double total = 0;
  for (double p : r.task2_probability->at(0)) total += p;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Ensemble, IdenticalMembersReproduceTheSingleModel) {
  Rng rng(33);
  for (std::size_t m = 1; m <= 5; ++m) {
    TaskLogits one;
    one.task1.emplace();
    one.task2.emplace();
    for (int i = 0; i < 20; ++i) {
      one.task1->push_back(rng.normal(0.0, 3.0));
      auto& row = one.task2->emplace_back();
      for (int k = 0; k < 8; ++k) row.push_back(rng.normal(0.0, 3.0));
    }
    const std::vector<TaskLogits> members(m, one);
    EXPECT_EQ(ensemble_logits(members).mean, one) << m;
  }
}

TEST(Ensemble, ShiftingEveryMemberShiftsTheMean) {
  TaskLogits a, b;
  a.task2 = std::vector<std::vector<double>>{{0.1, 0.5, -1, 2, 0, 0, 0, 0}};
  b.task2 = std::vector<std::vector<double>>{{1.1, -0.5, 1, 0, 0, 3, 0, 0}};
  const auto base = ensemble_logits(std::vector<TaskLogits>{a, b});
  for (auto& x : a.task2->at(0)) x += 10.0;
  for (auto& x : b.task2->at(0)) x += 10.0;
  const auto shifted = ensemble_logits(std::vector<TaskLogits>{a, b});
  EXPECT_EQ(base.predictions.task2, shifted.predictions.task2);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_NEAR(shifted.mean.task2->at(0)[k], base.mean.task2->at(0)[k] + 10.0, 1e-12);
    EXPECT_NEAR(shifted.task2_probability->at(0)[k], base.task2_probability->at(0)[k], 1e-12);
  }
}

TEST(Ensemble, RejectsMismatchedMembers) {
  TaskLogits a, b, c;
  a.task1 = std::vector<double>{1.0, 2.0};
  b.task1 = std::vector<double>{1.0};
  c.task2 = std::vector<std::vector<double>>{{0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0}};
  EXPECT_THROW(ensemble_logits(std::vector<TaskLogits>{a, b}), DimensionError);
  EXPECT_THROW(ensemble_logits(std::vector<TaskLogits>{a, c}), DimensionError);
  EXPECT_THROW(ensemble_logits(std::vector<TaskLogits>{}), ConfigError);
  const auto p = softmax_values(std::vector<double>{1000.0, 0.0});
  EXPECT_EQ(p[0], 1.0);
}
