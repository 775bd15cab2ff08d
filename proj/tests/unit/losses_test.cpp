// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "armi/errors.hpp"
#include "armi/math/gradcheck.hpp"
#include "armi/math/parameters.hpp"
#include "armi/math/rng.hpp"
#include "armi/objectives/loss_ops.hpp"
#include "armi/objectives/losses.hpp"
#include "fixtures.hpp"

using namespace armi;
using namespace armi::objectives;

namespace {

constexpr double kLn2 = 0.6931471805599453094172321;
constexpr double kLn8 = 2.0794415416798359282516964;
constexpr double kQuarterLn2 = 0.173286795139986327354308;

FocalParams unit_alpha(double gamma, std::size_t k = 8) { return {gamma, std::vector<double>(k, 1.0)}; }

std::vector<double> random_logits(Rng& rng, std::size_t k, double scale) {
  std::vector<double> v(k);
  for (auto& x : v) x = rng.normal(0.0, scale);
  return v;
}

double softmax_at(std::span<const double> z, std::size_t y) {
  double m = z[0];
  for (double x : z) m = std::max(m, x);
  double s = 0;
  for (double x : z) s += std::exp(x - m);
  return std::exp(z[y] - m) / s;
}

}  // namespace

TEST(Losses, ReferenceValues) {
  EXPECT_NEAR(bce_loss(0.0, 0), kLn2, 1e-15);
  EXPECT_NEAR(bce_loss(0.0, 1), kLn2, 1e-15);
  const std::vector<double> flat(8, 0.7);
  EXPECT_NEAR(ce_loss(flat, 5), kLn8, 1e-15);
  const std::vector<double> two{0.0, 0.0};
  EXPECT_NEAR(focal_loss(two, 0, unit_alpha(2.0, 2)), kQuarterLn2, 1e-15);
  EXPECT_NEAR(bce_loss_grad(0.0, 1), -0.5, 1e-15);
}

TEST(Losses, ExtremeLogitsStayFinite) {
  EXPECT_NEAR(bce_loss(1000.0, 0), 1000.0, 1e-9);
  EXPECT_NEAR(bce_loss(-1000.0, 1), 1000.0, 1e-9);
  EXPECT_EQ(bce_loss(1000.0, 1), 0.0);
  const std::vector<double> z{1000.0, -1000.0, 0.0};
  EXPECT_NEAR(ce_loss(z, 1), 2000.0, 1e-9);
  EXPECT_TRUE(std::isfinite(focal_loss(z, 1, unit_alpha(2.0, 3))));
  EXPECT_TRUE(std::isfinite(focal_loss(z, 0, unit_alpha(2.0, 3))));
  std::vector<double> g(3);
  focal_loss_grad(z, 1, unit_alpha(2.0, 3), g);
  for (double v : g) EXPECT_TRUE(std::isfinite(v));
}

TEST(Losses, FocalWithZeroGammaAndUnitAlphaIsCrossEntropy) {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto z = random_logits(rng, 8, 3.0);
    const auto y = static_cast<std::size_t>(rng.below(8));
    const double ce = ce_loss(z, y);
    EXPECT_NEAR(focal_loss(z, y, unit_alpha(0.0)), ce, 1e-12 * std::max(1.0, ce));
  }
}

TEST(Losses, FocalOverCrossEntropyIsTheModulatingFactor) {
  Rng rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    const auto z = random_logits(rng, 8, 2.0);
    const auto y = static_cast<std::size_t>(rng.below(8));
    FocalParams fp{0.5 + 3.0 * rng.uniform(), {}};
    for (int k = 0; k < 8; ++k) fp.alpha.push_back(0.1 + 5.0 * rng.uniform());
    const double p = softmax_at(z, y);
    const double expected = fp.alpha[y] * std::pow(1.0 - p, fp.gamma);
    EXPECT_NEAR(focal_loss(z, y, fp) / ce_loss(z, y), expected, 1e-10 * std::max(1.0, expected));
  }
}

TEST(Losses, FocalDecreasesAsTheTrueClassGainsConfidence) {
  std::vector<double> z{0.0, 0.5, -0.3};
  double previous = INFINITY;
  for (int step = 0; step < 40; ++step) {
    z[0] = -4.0 + 0.25 * step;
    const double f = focal_loss(z, 0, unit_alpha(2.0, 3));
    EXPECT_LT(f, previous);
    previous = f;
  }
  const std::vector<double> fixed{0.2, 0.9, -0.3};
  double last = INFINITY;
  for (double gamma : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    const double f = focal_loss(fixed, 0, unit_alpha(gamma, 3));
    EXPECT_LT(f, last);
    last = f;
  }
}

TEST(Losses, AnalyticGradientsMatchFiniteDifferences) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto z = random_logits(rng, 8, 2.0);
    const auto y = static_cast<std::size_t>(rng.below(8));
    const auto fp = unit_alpha(1.0 + rng.uniform() * 2.0);
    std::vector<double> g(8), gce(8);
    focal_loss_grad(z, y, fp, g);
    ce_loss_grad(z, y, gce);
    for (std::size_t i = 0; i < 8; ++i) {
      const double h = 1e-6;
      const double saved = z[i];
      z[i] = saved + h;
      const double fp_plus = focal_loss(z, y, fp), ce_plus = ce_loss(z, y);
      z[i] = saved - h;
      const double fp_minus = focal_loss(z, y, fp), ce_minus = ce_loss(z, y);
      z[i] = saved;
      EXPECT_NEAR(g[i], (fp_plus - fp_minus) / (2 * h), 1e-7);
      EXPECT_NEAR(gce[i], (ce_plus - ce_minus) / (2 * h), 1e-7);
    }
  }
}

TEST(Losses, ParameterAndLabelErrors) {
  const std::vector<double> z{0.0, 1.0};
  EXPECT_THROW(focal_loss(z, 0, unit_alpha(-1.0, 2)), ConfigError);
  EXPECT_THROW(focal_loss(z, 0, FocalParams{2.0, {1.0, 0.0}}), ConfigError);
  EXPECT_THROW(focal_loss(z, 0, unit_alpha(2.0, 3)), ConfigError);
  EXPECT_THROW(ce_loss(z, 2), DataError);
  EXPECT_THROW(bce_loss(0.0, 2), DataError);
  EXPECT_THROW(ce_loss(std::vector<double>{}, 0), DimensionError);
}

TEST(ClassWeights, RatioToTheMostFrequentLabel) {
  const std::vector<std::size_t> counts{3061, 669, 105, 2868, 219, 66, 652, 226};
  const auto alpha = compute_alpha(counts);
  ASSERT_EQ(alpha.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(alpha[i], 3061.0 / static_cast<double>(counts[i]));
  EXPECT_EQ(alpha[0], 1.0);
  EXPECT_EQ(compute_alpha(std::vector<std::size_t>{5, 10}), (std::vector<double>{2.0, 1.0}));
  EXPECT_THROW(compute_alpha(std::vector<std::size_t>{5, 0, 3}), DataError);
  EXPECT_THROW(compute_alpha(std::vector<std::size_t>{}), DataError);
}

TEST(MultiTaskLoss, WeightedSum) {
  EXPECT_EQ(mtl_loss(0.5, 1.5), 2.0);
  EXPECT_EQ(mtl_loss(0.5, 1.5, 0.0), 0.5);
  EXPECT_EQ(mtl_loss(0.5, 1.5, 2.0), 3.5);
  EXPECT_THROW(mtl_loss(0.5, 1.5, -1.0), ConfigError);
  EXPECT_THROW(mtl_loss(NAN, 1.5), NumericalError);
  const Tensor a = Tensor::scalar(0.5), b = Tensor::scalar(1.5);
  EXPECT_EQ(combine_task_losses(a, b, 2.0).item(), 3.5);
  EXPECT_THROW(combine_task_losses(a, b, -0.1), ConfigError);
}

TEST(LossOps, BatchMeansAgreeWithScalarLosses) {
  const auto z2 = test_support::random_tensor({5, 8}, 3, 2.0);
  const auto z1 = test_support::random_tensor({5}, 4, 2.0);
  const std::vector<std::size_t> y2{0, 3, 7, 3, 1};
  const std::vector<std::size_t> y1{0, 1, 1, 0, 1};
  FocalParams fp{2.0, {1, 2, 3, 4, 5, 6, 7, 8}};
  double ce = 0, fl = 0, bce = 0;
  for (std::size_t b = 0; b < 5; ++b) {
    const auto row = z2.values().subspan(b * 8, 8);
    ce += ce_loss(row, y2[b]) / 5;
    fl += focal_loss(row, y2[b], fp) / 5;
    bce += bce_loss(z1.at(b), y1[b]) / 5;
  }
  EXPECT_NEAR(cross_entropy(z2, y2).item(), ce, 1e-14);
  EXPECT_NEAR(focal(z2, y2, fp).item(), fl, 1e-14);
  EXPECT_NEAR(binary_cross_entropy(z1, y1).item(), bce, 1e-14);
  EXPECT_THROW(cross_entropy(z2, std::vector<std::size_t>{0, 1}), DimensionError);
}

TEST(LossOps, GradientsPassTheCheck) {
  ParameterSet params;
  auto values_of = [](const Tensor& t) { return std::vector<double>(t.values().begin(), t.values().end()); };
  const auto z2 = params.add("z2", {4, 8}, values_of(test_support::random_tensor({4, 8}, 5, 1.5)));
  const auto z1 = params.add("z1", {4}, values_of(test_support::random_tensor({4}, 6, 1.5)));
  const std::vector<std::size_t> y2{2, 2, 0, 6};
  const std::vector<std::size_t> y1{1, 0, 0, 1};
  const FocalParams fp{2.0, {1, 1.5, 2, 1, 3, 1, 1, 4}};
  GradCheckOptions opt;
  opt.step = 1e-5;
  const auto r = gradient_check(
      [&] { return combine_task_losses(binary_cross_entropy(z1, y1), focal(z2, y2, fp), 0.7); },
      params, opt);
  EXPECT_TRUE(r.passed) << r.max_relative_error;
}
