/*
 * Copyright 2026 The bsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bsim::cli {

using nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kRuntimeFailure = 1,
  kParseError = 2,
  kValidationError = 3,
  kGuardExceeded = 4,
  kNumericError = 5,
};

inline constexpr std::string_view kCommands[] = {"hom",      "prob",     "sample",   "noisy-dist",
                                                 "partition", "validate", "optimize", "bench"};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "BSIM_OUTPUT_DIR";

struct ConfigError {
  std::string path;  // JSON pointer into the document
  std::string message;
};

/// A validated configuration. `resolved` holds every field with defaults filled in.
struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::filesystem::path output;
  json resolved;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
  bool parse_failed = false;
};

/// Command-line values that take precedence over the document.
struct Overrides {
  std::optional<std::string> command;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> output;
};

/// Parses and validates a config document. A run manifest is accepted too:
/// its embedded "config" is used.
ConfigResult validate_config(std::string_view text, const Overrides& overrides = {});
ConfigResult validate_document(json doc, const Overrides& overrides = {});

struct RunResult {
  int exit_code = kOk;
  std::string message;
  std::vector<std::filesystem::path> files;  // data files, then the manifest
};

RunResult run(const ExperimentConfig& config);

/// Full command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace bsim::cli
