// SPDX-License-Identifier: Apache-2.0
#include "armi/text/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "armi/errors.hpp"
#include "armi/math/rng.hpp"
#include "armi/model/label_space.hpp"

namespace armi::text {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string location(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

}  // namespace

LoadedDataset load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());

  LoadedDataset result;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line_no == 1) {
      const auto header = split_tabs(line);
      if (header == std::vector<std::string>{"id", "text", "misogyny", "category"}) {
        result.labeled = true;
      } else if (header != std::vector<std::string>{"id", "text"}) {
        throw DataError(location(path, 1) + ": expected header 'id<TAB>text[<TAB>misogyny<TAB>category]'");
      }
      columns = header.size();
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != columns) {
      throw DataError(location(path, line_no) + ": expected " + std::to_string(columns) +
                      " tab-separated columns, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw DataError(location(path, line_no) + ": empty id");
    RawExample ex;
    ex.id = fields[0];
    ex.text = fields[1];
    if (result.labeled) {
      const auto t1 = LabelSpace::task1_index(fields[2]);
      if (!t1) {
        throw DataError(location(path, line_no) + " (id " + ex.id + "): unknown misogyny label '" +
                        fields[2] + "'");
      }
      const auto t2 = LabelSpace::category_index(fields[3]);
      if (!t2) {
        throw DataError(location(path, line_no) + " (id " + ex.id + "): unknown category '" +
                        fields[3] + "'");
      }
      ex.task1_label = *t1;
      ex.task2_label = *t2;
      if ((*t1 == 0) != (*t2 == 0)) {
        result.warnings.push_back(location(path, line_no) + " (id " + ex.id + "): misogyny='" +
                                  fields[2] + "' but category='" + fields[3] + "'");
      }
    }
    result.examples.push_back(std::move(ex));
  }
  if (line_no == 0) throw DataError(path.string() + ": empty file (no header row)");
  return result;
}

void write_tsv(const std::filesystem::path& path, std::span<const RawExample> examples) {
  const bool labeled = !examples.empty() && examples.front().task1_label && examples.front().task2_label;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset " + path.string());
  out << (labeled ? "id\ttext\tmisogyny\tcategory\n" : "id\ttext\n");
  for (const auto& ex : examples) {
    out << ex.id << '\t' << ex.text;
    if (labeled) {
      out << '\t' << LabelSpace::task1_name(ex.task1_label.value()) << '\t'
          << LabelSpace::category_name(ex.task2_label.value());
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing dataset " + path.string());
}

TrainDevSplit split_train_dev(std::span<const RawExample> examples, double fraction,
                              std::uint64_t seed) {
  if (examples.empty()) throw DataError("split_train_dev: no examples");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("split_train_dev: fraction must lie in (0, 1]");
  }
  const std::size_t n = examples.size();
  const std::size_t unlabeled = LabelSpace::kNumCategories;
  std::map<std::size_t, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) {
    strata[examples[i].task2_label.value_or(unlabeled)].push_back(i);
  }

  // The 1e-9 guards products like 0.9 * 10 landing just below an integer.
  const auto target = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  struct Quota {
    std::size_t key;
    std::size_t size;
    std::size_t train;
    double remainder;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (const auto& [key, rows] : strata) {
    const double exact = fraction * static_cast<double>(rows.size());
    auto base = static_cast<std::size_t>(std::floor(exact + 1e-9));
    if (rows.size() == 1) base = 1;
    base = std::min(base, rows.size());
    quotas.push_back({key, rows.size(), base, exact - std::floor(exact + 1e-9)});
    assigned += base;
  }
  std::vector<std::size_t> order(quotas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return quotas[a].remainder > quotas[b].remainder; });
  for (std::size_t k = 0; assigned < target && k < order.size(); ++k) {
    auto& q = quotas[order[k]];
    if (q.train < q.size) {
      ++q.train;
      ++assigned;
    }
  }

  Rng rng(seed, /*stream=*/0x5911);
  std::vector<std::uint8_t> to_train(n, 0);
  for (const auto& q : quotas) {
    std::vector<std::size_t> rows = strata[q.key];
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t i = 0; i < q.train; ++i) to_train[rows[i]] = 1;
  }
  TrainDevSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (to_train[i] ? split.train : split.dev).push_back(examples[i]);
  }
  return split;
}

}  // namespace armi::text
