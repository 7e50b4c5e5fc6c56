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

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bsim/cli.hpp"
#include "bsim/version.hpp"

namespace bsim::cli {

namespace {

constexpr const char* kFooter = R"(Exit codes:
  0  success
  1  runtime failure (for example an unwritable output directory)
  2  config or command-line parse error
  3  config validation error
  4  size guard exceeded
  5  numeric failure

Outputs go to the directory named by "output" in the config, --out, or the
BSIM_OUTPUT_DIR environment variable (default ./bsim_out). Every run writes
manifest.json there; passing a manifest back as the config reproduces the run.)";

struct SubcommandArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> output;
};

void add_common(CLI::App* sub, SubcommandArgs& args, bool config_required) {
  auto* opt = config_required ? sub->add_option("config", args.config_path, "Config or manifest JSON file")
                              : sub->add_option("-c,--config", args.config_path, "Config or manifest JSON file");
  if (config_required) opt->required();
  sub->add_option("--seed", args.seed, "RNG seed (overrides the config)");
  sub->add_option("--threads", args.threads, "Worker threads, 0 for all cores (overrides the config)");
  sub->add_option("--out", args.output, "Output directory (overrides the config)");
}

void print_errors(const std::vector<ConfigError>& errors) {
  for (const auto& e : errors) std::cerr << "error: " << (e.path.empty() ? "/" : e.path) << ": " << e.message << '\n';
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"bsim: multi-photon interference simulator"};
  app.footer(kFooter);
  app.set_version_flag("--version", BSIM_VERSION);
  app.require_subcommand(1);

  SubcommandArgs args;
  auto* run_cmd = app.add_subcommand("run", "Run the command named in a config file");
  add_common(run_cmd, args, true);
  auto* check_cmd = app.add_subcommand("check", "Validate a config file and print every error");
  add_common(check_cmd, args, true);
  std::vector<std::pair<std::string, CLI::App*>> commands;
  const std::pair<std::string_view, const char*> descriptions[] = {
      {"hom", "Two-photon coincidence curve against delay"},
      {"prob", "Probability of one detected pattern"},
      {"sample", "Draw output patterns"},
      {"noisy-dist", "Exact, truncated and sampled lossy distributions"},
      {"partition", "Photon-count distribution over mode subsets"},
      {"validate", "Bayesian confidence traces for two hypotheses"},
      {"optimize", "Riemannian ascent over the unitary group"},
      {"bench", "Permanent or sampler timing against n"},
  };
  for (const auto& [name, text] : descriptions) {
    auto* sub = app.add_subcommand(std::string(name), text);
    add_common(sub, args, false);
    commands.emplace_back(std::string(name), sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParseError;
  }

  Overrides overrides;
  overrides.seed = args.seed;
  overrides.threads = args.threads;
  overrides.output = args.output;
  for (const auto& [name, sub] : commands) {
    if (sub->parsed()) overrides.command = name;
  }

  std::string text = "{}";
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read " << args.config_path << '\n';
      return kParseError;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }

  const ConfigResult checked = validate_config(text, overrides);
  if (!checked.config) {
    print_errors(checked.errors);
    return checked.parse_failed ? kParseError : kValidationError;
  }
  if (check_cmd->parsed()) {
    std::cout << "ok: " << checked.config->command << '\n';
    return kOk;
  }
  const RunResult result = run(*checked.config);
  if (result.exit_code != kOk) {
    std::cerr << "error: " << result.message << '\n';
  } else {
    std::cout << result.message << '\n';
  }
  return result.exit_code;
}

}  // namespace bsim::cli
