// Copyright 2026 The mtrack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "csv.hpp"

#include "mtrack/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mtrack::cli {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<RoundMetrics>& metrics) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << kMetricsHeader << '\n';
  for (const auto& m : metrics) {
    out << m.round << ',' << format_real(m.f_xbar) << ',' << format_real(m.grad_norm_sq)
        << ',' << format_real(m.consensus_xi) << ',' << format_real(m.c_sum_norm) << ','
        << format_real(m.u_bar_norm) << ',' << m.vectors_tx << '\n';
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::vector<RoundMetrics> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kMetricsHeader) throw ConfigError("unexpected metrics header in " + path.string());

  std::vector<RoundMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw ConfigError("malformed metrics row: " + line);
    RoundMetrics m;
    m.round = std::stoll(cells[0]);
    m.f_xbar = std::strtod(cells[1].c_str(), nullptr);
    m.grad_norm_sq = std::strtod(cells[2].c_str(), nullptr);
    m.consensus_xi = std::strtod(cells[3].c_str(), nullptr);
    m.c_sum_norm = std::strtod(cells[4].c_str(), nullptr);
    m.u_bar_norm = std::strtod(cells[5].c_str(), nullptr);
    m.vectors_tx = std::stoll(cells[6]);
    rows.push_back(m);
  }
  return rows;
}

}  // namespace mtrack::cli
