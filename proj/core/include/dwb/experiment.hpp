/*
 * Copyright 2026 The Dendrite Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dwb::experiment {

enum class Kind { Wiring, Mesh, Gemm, Complexity, Entropy, TrainToy };

std::string to_string(Kind kind);
/// Throws UnknownKindError.
Kind parse_kind(std::string_view name);

/// A fully specified run. `params` holds the kind's parameter grid and
/// `check` the acceptance thresholds evaluated after the run; both are JSON
/// objects whose schema depends on `kind`.
struct ExperimentConfig {
  Kind kind = Kind::Mesh;
  std::string name;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  unsigned threads = 1;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json check = nlohmann::json::object();

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json default_params(Kind kind);

/// Parses a config document. `params` is merged over default_params(kind).
/// Throws ValidationError for malformed documents and unknown keys,
/// UnknownKindError for unknown kinds.
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

/// FNV-1a over the canonical form of (kind, name, seed, params, check).
/// Output location and thread count do not affect results and are excluded.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Throws ValidationError for wrongly typed or unknown parameters and
/// ArgumentError for values outside the experiment's domain.
void validate(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct OutputFile {
  std::string path; ///< relative to out_dir
  std::uint64_t bytes = 0;
  std::string checksum; ///< FNV-1a 64, hex
};

struct RunManifest {
  std::string tool = "dwb";
  std::string version;
  std::string kind;
  std::string name;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string started;
  std::string finished;
  std::vector<OutputFile> outputs;
};

std::string manifest_to_json(const RunManifest& manifest);

struct RunResult {
  RunManifest manifest;
  std::vector<CheckResult> checks;
  std::vector<std::string> log;
  /// Set when the experiment ran but produced an unusable result, such as
  /// a diverged training run. Artifacts are still written.
  bool failed = false;
  std::string failure;

  bool checks_passed() const noexcept;
};

/// Validates, runs and writes artifacts plus manifest.json and the resolved
/// config.json into config.out_dir. Throws IoError when the directory or a
/// file cannot be written.
RunResult run(const ExperimentConfig& config);

struct Recipe {
  std::string name;
  std::string version;
  std::string description;
  std::string config_json;
};

const std::vector<Recipe>& recipes();
/// Throws ArgumentError for unknown names.
const Recipe& find_recipe(std::string_view name);
ExperimentConfig recipe_config(const Recipe& recipe);

std::string version();

} // namespace dwb::experiment
