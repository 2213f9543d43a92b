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


#pragma once

#include "mtrack/engine.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mtrack::cli {

inline constexpr const char* kMetricsHeader =
    "round,f_xbar,grad_norm_sq,consensus_xi,c_sum_norm,u_bar_norm,vectors_tx";

/// Shortest text that parses back to exactly `value` (17 significant digits).
std::string format_real(double value);

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<RoundMetrics>& metrics);
std::vector<RoundMetrics> read_metrics_csv(const std::filesystem::path& path);

}  // namespace mtrack::cli
