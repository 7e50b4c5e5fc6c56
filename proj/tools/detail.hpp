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

// Shared between config validation and the command runners.
#pragma once

#include <string_view>

#include "bsim/cli.hpp"
#include "bsim/model.hpp"

namespace bsim::cli::detail {

json defaults_for(std::string_view command);

/// These assume a config section that passed validation; they throw bsim errors otherwise.
Interferometer build_interferometer(const json& spec, int modes);
DistinguishabilityModel build_model(const json& spec, int photons);
ModeOccupation build_input(const json& resolved);
bool is_sampleable(const json& model_spec);

}  // namespace bsim::cli::detail
