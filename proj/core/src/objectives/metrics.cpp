// SPDX-License-Identifier: Apache-2.0
#include "armi/objectives/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "armi/errors.hpp"

namespace armi::objectives {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport evaluate(std::span<const std::size_t> preds, std::span<const std::size_t> golds,
                       std::span<const std::string_view> label_names) {
  if (preds.size() != golds.size()) {
    throw DimensionError("evaluate: " + std::to_string(preds.size()) + " predictions for " +
                         std::to_string(golds.size()) + " gold labels");
  }
  if (golds.empty()) throw DataError("evaluate: no examples");
  const std::size_t K = label_names.size();
  if (K == 0) throw ConfigError("evaluate: empty label space");

  MetricsReport report;
  report.num_examples = golds.size();
  report.confusion.assign(K, std::vector<std::size_t>(K, 0));
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (golds[i] >= K || preds[i] >= K) {
      throw DataError("evaluate: label index out of range at example " + std::to_string(i));
    }
    ++report.confusion[golds[i]][preds[i]];
  }

  std::size_t correct = 0;
  std::size_t present = 0;
  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
  for (std::size_t c = 0; c < K; ++c) {
    const std::size_t tp = report.confusion[c][c];
    std::size_t gold_total = 0, pred_total = 0;
    for (std::size_t j = 0; j < K; ++j) {
      gold_total += report.confusion[c][j];
      pred_total += report.confusion[j][c];
    }
    correct += tp;
    ClassRow row;
    row.label = std::string(label_names[c]);
    row.precision = ratio(tp, pred_total);
    row.recall = ratio(tp, gold_total);
    const double pr = row.precision + row.recall;
    row.f1 = pr == 0.0 ? 0.0 : 2.0 * row.precision * row.recall / pr;
    row.support = gold_total;
    if (gold_total > 0) {
      ++present;
      sum_p += row.precision;
      sum_r += row.recall;
      sum_f += row.f1;
    }
    report.per_class.push_back(std::move(row));
  }
  report.accuracy = ratio(correct, golds.size());
  const double n = static_cast<double>(present);
  report.macro_precision = sum_p / n;
  report.macro_recall = sum_r / n;
  report.macro_f1 = sum_f / n;
  return report;
}

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.per_class) {
    rows.push_back({{"label", r.label},
                    {"precision", r.precision},
                    {"recall", r.recall},
                    {"f1", r.f1},
                    {"support", r.support}});
  }
  return {{"accuracy", report.accuracy},
          {"macro_precision", report.macro_precision},
          {"macro_recall", report.macro_recall},
          {"macro_f1", report.macro_f1},
          {"num_examples", report.num_examples},
          {"per_class", rows},
          {"confusion", report.confusion}};
}

MetricsReport metrics_from_json(const nlohmann::json& json) {
  try {
    MetricsReport report;
    report.accuracy = json.at("accuracy").get<double>();
    report.macro_precision = json.at("macro_precision").get<double>();
    report.macro_recall = json.at("macro_recall").get<double>();
    report.macro_f1 = json.at("macro_f1").get<double>();
    report.num_examples = json.at("num_examples").get<std::size_t>();
    for (const auto& r : json.at("per_class")) {
      report.per_class.push_back({r.at("label").get<std::string>(), r.at("precision").get<double>(),
                                  r.at("recall").get<double>(), r.at("f1").get<double>(),
                                  r.at("support").get<std::size_t>()});
    }
    if (json.contains("confusion")) {
      report.confusion = json.at("confusion").get<std::vector<std::vector<std::size_t>>>();
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics report: ") + e.what());
  }
}

std::string format_report(const MetricsReport& report, std::string_view title) {
  std::size_t width = 12;
  for (const auto& r : report.per_class) width = std::max(width, r.label.size());
  std::string out;
  if (!title.empty()) {
    out.append(title);
    out.push_back('\n');
  }
  char line[256];
  std::snprintf(line, sizeof line, "%-*s %9s %9s %9s %9s\n", static_cast<int>(width), "",
                "Precision", "Recall", "F1", "Support");
  out += line;
  for (const auto& r : report.per_class) {
    std::snprintf(line, sizeof line, "%-*s %9.4f %9.4f %9.4f %9zu\n", static_cast<int>(width),
                  r.label.c_str(), r.precision, r.recall, r.f1, r.support);
    out += line;
  }
  out.push_back('\n');
  std::snprintf(line, sizeof line, "%-*s %9s %9s %9.4f %9zu\n", static_cast<int>(width), "accuracy", "",
                "", report.accuracy, report.num_examples);
  out += line;
  std::snprintf(line, sizeof line, "%-*s %9.4f %9.4f %9.4f %9zu\n", static_cast<int>(width), "macro avg",
                report.macro_precision, report.macro_recall, report.macro_f1, report.num_examples);
  out += line;
  return out;
}

}  // namespace armi::objectives
