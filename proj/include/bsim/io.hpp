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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsim/model.hpp"

namespace bsim::io {

using nlohmann::json;

/// Shortest decimal that round-trips the double.
std::string format_double(double value);

json matrix_to_json(const ComplexMatrix& matrix);  // {"re": [[..]], "im": [[..]]}
ComplexMatrix matrix_from_json(const json& doc);

/// {"m": int, "re": [[..]], "im": [[..]], "kind": string}
json interferometer_to_json(const Interferometer& interf);
Interferometer interferometer_from_json(const json& doc);

json model_to_json(const DistinguishabilityModel& model);
DistinguishabilityModel model_from_json(const json& doc);

json measurement_to_json(const Measurement& measurement);
Measurement measurement_from_json(const json& doc);

json table_to_json(const DistributionTable& table);
DistributionTable table_from_json(const json& doc);

json event_to_json(const Event& event);
Event event_from_json(const json& doc);

/// Header `mode_1,..,mode_m`, then one row of counts per sample.
void write_samples_csv(std::ostream& out, const std::vector<ModeOccupation>& samples, int modes);
std::vector<ModeOccupation> read_samples_csv(std::istream& in);
std::vector<ModeOccupation> read_samples_csv(const std::filesystem::path& path);

/// Columns `<prefix>_1..<prefix>_k,probability`.
void write_table_csv(std::ostream& out, const DistributionTable& table, const std::string& prefix);

}  // namespace bsim::io
