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

namespace mtrack {

inline constexpr int kConfigSchemaVersion = 1;

/// Parses a JSON run configuration. Missing fields take their defaults,
/// unknown fields are rejected. Throws ConfigError naming the offending
/// field; the resulting config has been validated.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Fully-resolved config as pretty-printed JSON (round-trips through
/// parse_config).
std::string config_to_json(const RunConfig& config);

/// Markdown table of every config field and its default.
std::string config_reference_markdown();

}  // namespace mtrack
