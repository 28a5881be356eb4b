// Copyright (c) 2026 The hclm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "hclm/cli/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "hclm/error.hpp"

namespace hclm::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    for (std::string_view cell : split(view)) {
      if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') cell = cell.substr(1, cell.size() - 2);
      if (cell.empty()) throw InputError(where(source, line_no) + "empty column name");
      names.emplace_back(cell);
    }
    break;
  }
  if (names.empty()) throw InputError(source + ": empty file (no header row)");

  std::vector<std::vector<double>> values(names.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != names.size()) {
      throw InputError(where(source, line_no) + "expected " + std::to_string(names.size()) + " fields, found " +
                       std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string_view cell = cells[j];
      double v = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw InputError(where(source, line_no) + "column '" + names[j] + "' (" + std::to_string(j + 1) +
                         "): not a finite number: '" + std::string(cell) + "'");
      }
      values[j].push_back(v);
    }
  }
  if (values.front().size() < 2) throw InputError(source + ": need at least 2 data rows");

  Dataset data;
  data.source = source;
  for (std::size_t j = 0; j < names.size(); ++j) {
    data.add(names[j], Eigen::Map<const Eigen::VectorXd>(values[j].data(), static_cast<Eigen::Index>(values[j].size())));
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_csv(in, path.string());
}

void rescale_columns(Dataset& data, const std::vector<std::string>& names) {
  for (const auto& name : names) {
    data.at(name);
    for (std::size_t j = 0; j < data.cols(); ++j) {
      if (data.names[j] != name) continue;
      Eigen::VectorXd& col = data.columns[j];
      const double lo = col.minCoeff();
      const double hi = col.maxCoeff();
      if (hi > lo) col = ((col.array() - lo) * (2.0 / (hi - lo)) - 1.0).matrix();
    }
  }
}

}  // namespace hclm::cli
