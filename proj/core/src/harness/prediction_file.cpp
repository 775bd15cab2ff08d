// SPDX-License-Identifier: Apache-2.0
#include "armi/harness/prediction_file.hpp"

#include <charconv>
#include <fstream>
#include <string_view>

#include "armi/errors.hpp"
#include "armi/model/label_space.hpp"

namespace armi::harness {
namespace {

constexpr std::string_view kHeader = "id\tmisogyny\tcategory\ttask1_logit\ttask2_logits";
constexpr std::string_view kProbHeader = "\ttask1_prob\ttask2_probs";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = line.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, p - start));
    start = p + 1;
  }
}

double parse_double(std::string_view text, const std::string& where) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw DataError(where + ": malformed number '" + std::string(text) + "'");
  }
  return value;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(',');
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_predictions(const std::filesystem::path& path, const PredictionTable& table) {
  const std::size_t n = table.ids.size();
  const auto& lg = table.logits;
  if ((lg.task1 && lg.task1->size() != n) || (lg.task2 && lg.task2->size() != n)) {
    throw DimensionError("predictions: logit rows do not match " + std::to_string(n) + " ids");
  }
  const bool with_probs = table.task1_probability.has_value() || table.task2_probability.has_value();
  const auto preds = model::predict(lg);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write predictions " + path.string());
  out << kHeader;
  if (with_probs) out << kProbHeader;
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << table.ids[i] << '\t';
    if (preds.task1) out << LabelSpace::task1_name((*preds.task1)[i]);
    out << '\t';
    if (preds.task2) out << LabelSpace::category_name((*preds.task2)[i]);
    out << '\t';
    if (lg.task1) out << format_double((*lg.task1)[i]);
    out << '\t';
    if (lg.task2) out << join((*lg.task2)[i]);
    if (with_probs) {
      out << '\t';
      if (table.task1_probability) out << format_double((*table.task1_probability)[i]);
      out << '\t';
      if (table.task2_probability) out << join((*table.task2_probability)[i]);
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing predictions " + path.string());
}

PredictionTable read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open predictions " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty prediction file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(kHeader, 0) != 0) throw DataError(path.string() + ":1: unexpected header");

  PredictionTable table;
  std::optional<bool> has1, has2;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto fields = split(line, '\t');
    if (fields.size() != 5 && fields.size() != 7) {
      throw DataError(where + ": expected 5 or 7 columns, found " + std::to_string(fields.size()));
    }
    const bool row1 = !fields[3].empty();
    const bool row2 = !fields[4].empty();
    if (!has1) {
      has1 = row1;
      has2 = row2;
      if (row1) table.logits.task1.emplace();
      if (row2) table.logits.task2.emplace();
    } else if (*has1 != row1 || *has2 != row2) {
      throw DataError(where + ": task coverage differs from earlier rows");
    }
    table.ids.emplace_back(fields[0]);
    if (row1) table.logits.task1->push_back(parse_double(fields[3], where));
    if (row2) {
      std::vector<double> row;
      for (auto part : split(fields[4], ',')) row.push_back(parse_double(part, where));
      if (!table.logits.task2->empty() && row.size() != table.logits.task2->front().size()) {
        throw DataError(where + ": task-2 logit count differs from earlier rows");
      }
      table.logits.task2->push_back(std::move(row));
    }
  }
  if (table.ids.empty()) throw DataError(path.string() + ": no prediction rows");
  return table;
}

}  // namespace armi::harness
