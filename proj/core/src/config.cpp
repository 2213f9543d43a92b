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


#include "mtrack/config.hpp"

#include "mtrack/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace mtrack {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("config: unknown field \"" + where + key + "\"");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field \"" + where + key + "\" has the wrong type");
  }
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  auto it = root.find(key);
  if (it == root.end()) return empty;
  if (!it->is_object()) {
    throw ConfigError(std::string("config: field \"") + key + "\" must be an object");
  }
  return *it;
}

template <typename Parse>
void read_enum(const json& obj, const char* key, const std::string& where, Parse parse) {
  std::string name;
  auto it = obj.find(key);
  if (it == obj.end()) return;
  read(obj, key, where, name);
  try {
    parse(name);
  } catch (const ConfigError& e) {
    throw ConfigError("config: field \"" + where + key + "\": " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(root, "", {"schema_version", "topology", "problem", "algorithm", "rounds",
                            "seed", "cadence", "x0"});

  int version = kConfigSchemaVersion;
  read(root, "schema_version", "", version);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("config: unsupported schema_version " + std::to_string(version));
  }

  RunConfig c;

  const json& topo = section(root, "topology");
  reject_unknown(topo, "topology.", {"kind", "n", "scheme"});
  read_enum(topo, "kind", "topology.",
            [&](const std::string& s) { c.topology.kind = parse_topology_kind(s); });
  read(topo, "n", "topology.", c.topology.n);
  read_enum(topo, "scheme", "topology.",
            [&](const std::string& s) { c.topology.scheme = parse_weight_scheme(s); });

  const json& prob = section(root, "problem");
  reject_unknown(prob, "problem.", {"d", "zeta2", "sigma2", "seed", "file"});
  read(prob, "d", "problem.", c.problem.d);
  read(prob, "zeta2", "problem.", c.problem.zeta2);
  read(prob, "sigma2", "problem.", c.problem.sigma2);
  read(prob, "seed", "problem.", c.problem.seed);
  if (prob.contains("file")) {
    std::string file;
    read(prob, "file", "problem.", file);
    c.problem.file = file;
  }

  const json& algo = section(root, "algorithm");
  reject_unknown(algo, "algorithm.", {"variant", "eta", "beta", "init"});
  read_enum(algo, "variant", "algorithm.",
            [&](const std::string& s) { c.algorithm.variant = parse_variant(s); });
  read(algo, "eta", "algorithm.", c.algorithm.eta);
  read(algo, "beta", "algorithm.", c.algorithm.beta);
  read_enum(algo, "init", "algorithm.",
            [&](const std::string& s) { c.algorithm.init = parse_init_mode(s); });

  read(root, "rounds", "", c.rounds);
  read(root, "seed", "", c.seed);
  read(root, "cadence", "", c.cadence);

  const json& start = section(root, "x0");
  reject_unknown(start, "x0.", {"mode", "values", "radius", "seed"});
  std::string mode = "zeros";
  read(start, "mode", "x0.", mode);
  if (mode == "zeros") {
    c.x0.mode = StartPoint::Mode::kZeros;
  } else if (mode == "vector") {
    c.x0.mode = StartPoint::Mode::kVector;
  } else if (mode == "sphere") {
    c.x0.mode = StartPoint::Mode::kSphere;
  } else {
    throw ConfigError("config: field \"x0.mode\" must be zeros, vector or sphere");
  }
  read(start, "values", "x0.", c.x0.values);
  read(start, "radius", "x0.", c.x0.radius);
  read(start, "seed", "x0.", c.x0.seed);

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const RunConfig& c) {
  json problem = {{"d", c.problem.d},
                  {"zeta2", c.problem.zeta2},
                  {"sigma2", c.problem.sigma2},
                  {"seed", c.problem.seed}};
  if (c.problem.file) problem["file"] = *c.problem.file;

  json start;
  switch (c.x0.mode) {
    case StartPoint::Mode::kZeros:
      start = {{"mode", "zeros"}};
      break;
    case StartPoint::Mode::kVector:
      start = {{"mode", "vector"}, {"values", c.x0.values}};
      break;
    case StartPoint::Mode::kSphere:
      start = {{"mode", "sphere"}, {"radius", c.x0.radius}, {"seed", c.x0.seed}};
      break;
  }

  const json root = {
      {"schema_version", kConfigSchemaVersion},
      {"topology",
       {{"kind", to_string(c.topology.kind)},
        {"n", c.topology.n},
        {"scheme", to_string(c.topology.scheme)}}},
      {"problem", problem},
      {"algorithm",
       {{"variant", to_string(c.algorithm.variant)},
        {"eta", c.algorithm.eta},
        {"beta", c.algorithm.beta},
        {"init", to_string(c.algorithm.init)}}},
      {"rounds", c.rounds},
      {"seed", c.seed},
      {"cadence", c.cadence},
      {"x0", start},
  };
  return root.dump(2);
}

std::string config_reference_markdown() {
  const RunConfig d;
  std::ostringstream out;
  out << "# mtsim configuration reference\n\n"
      << "Run configurations are JSON objects. Every field is optional; missing\n"
      << "fields take the defaults below and unknown fields are rejected.\n"
      << "`summary.json` echoes the fully-resolved configuration of every run.\n\n"
      << "| field | type | default | meaning |\n"
      << "|---|---|---|---|\n"
      << "| `schema_version` | int | " << kConfigSchemaVersion << " | must be " << kConfigSchemaVersion << " |\n"
      << "| `topology.kind` | string | `" << to_string(d.topology.kind)
      << "` | ring, hypercube, exponential, complete, path |\n"
      << "| `topology.n` | int | " << d.topology.n << " | node count |\n"
      << "| `topology.scheme` | string | `" << to_string(d.topology.scheme)
      << "` | metropolis, uniform (uniform needs a regular graph, else metropolis is used) |\n"
      << "| `problem.d` | int | " << d.problem.d << " | parameter dimension |\n"
      << "| `problem.zeta2` | real | " << d.problem.zeta2
      << " | heterogeneity used to sample the targets b_i |\n"
      << "| `problem.sigma2` | real | " << d.problem.sigma2 << " | gradient-noise variance |\n"
      << "| `problem.seed` | u64 | " << d.problem.seed << " | seed for the targets b_i |\n"
      << "| `problem.file` | string | (none) | load a saved problem instead of generating one |\n"
      << "| `algorithm.variant` | string | `" << to_string(d.algorithm.variant)
      << "` | dsgd, dsgdm, gradient_tracking, momentum_tracking |\n"
      << "| `algorithm.eta` | real | " << d.algorithm.eta << " | step size, >= 0 |\n"
      << "| `algorithm.beta` | real | " << d.algorithm.beta << " | momentum, in [0,1) |\n"
      << "| `algorithm.init` | string | `" << to_string(d.algorithm.init)
      << "` | theorem, zero: initial momentum/corrector for tracking variants |\n"
      << "| `rounds` | int | " << d.rounds << " | number of synchronous rounds R, >= 1 |\n"
      << "| `seed` | u64 | " << d.seed << " | run seed for gradient noise |\n"
      << "| `cadence` | int | " << d.cadence
      << " | record metrics every k rounds (rounds 0 and R always recorded) |\n"
      << "| `x0.mode` | string | `zeros` | zeros, vector, sphere |\n"
      << "| `x0.values` | real[] | [] | start point for mode vector (length d) |\n"
      << "| `x0.radius` | real | " << d.x0.radius << " | sphere radius for mode sphere |\n"
      << "| `x0.seed` | u64 | " << d.x0.seed << " | direction seed for mode sphere |\n";
  return out.str();
}

}  // namespace mtrack
