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

#include "bsim/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bsim/errors.hpp"

namespace bsim::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<int> counts_from_json(const json& doc) {
  if (!doc.is_array()) throw InvalidArgument("occupation must be an array of counts");
  return doc.get<std::vector<int>>();
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw NumericError("cannot format double");
  return std::string(buffer, end);
}

json matrix_to_json(const ComplexMatrix& matrix) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      re_row.push_back(matrix(i, j).real());
      im_row.push_back(matrix(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const json& doc) {
  if (!doc.contains("re")) throw InvalidArgument("matrix needs a 're' array");
  const auto re = doc.at("re").get<std::vector<std::vector<double>>>();
  std::vector<std::vector<double>> im;
  if (doc.contains("im")) im = doc.at("im").get<std::vector<std::vector<double>>>();
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(re.front().size());
  if (!im.empty() && static_cast<Eigen::Index>(im.size()) != rows) {
    throw InvalidArgument("'re' and 'im' have different shapes");
  }
  ComplexMatrix matrix(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(re[static_cast<std::size_t>(i)].size()) != cols ||
        (!im.empty() && static_cast<Eigen::Index>(im[static_cast<std::size_t>(i)].size()) != cols)) {
      throw InvalidArgument("matrix rows have inconsistent lengths");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double imag = im.empty() ? 0.0 : im[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      matrix(i, j) = Complex(re[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], imag);
    }
  }
  return matrix;
}

json interferometer_to_json(const Interferometer& interf) {
  json doc = matrix_to_json(interf.matrix());
  doc["m"] = interf.modes();
  doc["kind"] = std::string(to_string(interf.kind()));
  return doc;
}

Interferometer interferometer_from_json(const json& doc) {
  ComplexMatrix matrix = matrix_from_json(doc);
  if (doc.contains("m") && doc.at("m").get<int>() != matrix.rows()) {
    throw InvalidArgument("interferometer 'm' does not match the matrix size");
  }
  const InterferometerKind kind =
      doc.contains("kind") ? interferometer_kind_from_string(doc.at("kind").get<std::string>())
                           : InterferometerKind::user;
  return Interferometer(std::move(matrix), kind);
}

json model_to_json(const DistinguishabilityModel& model) {
  return std::visit(overloaded{
                        [](const Bosonic&) { return json{{"kind", "bosonic"}}; },
                        [](const Distinguishable&) { return json{{"kind", "distinguishable"}}; },
                        [](const OneParameterInterpolation& m) {
                          return json{{"kind", "interpolation"}, {"x", m.x}};
                        },
                        [](const UserGram& m) {
                          json doc = matrix_to_json(m.gram.matrix());
                          doc["kind"] = "gram";
                          return doc;
                        },
                    },
                    model);
}

DistinguishabilityModel model_from_json(const json& doc) {
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "bosonic") return Bosonic{};
  if (kind == "distinguishable") return Distinguishable{};
  if (kind == "interpolation") {
    const double x = doc.at("x").get<double>();
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("interpolation parameter must lie in [0, 1]");
    return OneParameterInterpolation{x};
  }
  if (kind == "gram") return UserGram{GramMatrix(matrix_from_json(doc))};
  throw InvalidArgument("unknown distinguishability model '" + kind + "'");
}

json measurement_to_json(const Measurement& measurement) {
  return std::visit(
      overloaded{
          [](const FockDetection& m) { return json{{"kind", "fock_detection"}, {"output", m.output.counts()}}; },
          [](const FockSample&) { return json{{"kind", "fock_sample"}}; },
          [](const PartitionCountsAll& m) {
            json subsets = json::array();
            for (const Subset& s : m.partition.subsets()) subsets.push_back(s.members());
            return json{{"kind", "partition_counts_all"}, {"m", m.partition.modes()}, {"subsets", subsets}};
          },
          [](const DarkCountFockSample& m) { return json{{"kind", "dark_count_fock_sample"}, {"p", m.p}}; },
      },
      measurement);
}

Measurement measurement_from_json(const json& doc) {
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "fock_detection") return FockDetection{ModeOccupation(counts_from_json(doc.at("output")))};
  if (kind == "fock_sample") return FockSample{};
  if (kind == "partition_counts_all") {
    const int m = doc.at("m").get<int>();
    std::vector<Subset> subsets;
    for (const json& s : doc.at("subsets")) subsets.emplace_back(m, s.get<std::vector<int>>());
    return PartitionCountsAll{Partition(std::move(subsets))};
  }
  if (kind == "dark_count_fock_sample") return DarkCountFockSample(doc.at("p").get<double>());
  throw InvalidArgument("unknown measurement kind '" + kind + "'");
}

json table_to_json(const DistributionTable& table) {
  json outcomes = json::array();
  for (const ModeOccupation& o : table.outcomes) outcomes.push_back(o.counts());
  return json{{"outcomes", std::move(outcomes)}, {"probs", table.probs}};
}

DistributionTable table_from_json(const json& doc) {
  DistributionTable table;
  for (const json& o : doc.at("outcomes")) table.outcomes.emplace_back(counts_from_json(o));
  table.probs = doc.at("probs").get<std::vector<double>>();
  if (table.probs.size() != table.outcomes.size()) throw InvalidArgument("table outcome/prob length mismatch");
  return table;
}

json event_to_json(const Event& event) {
  json doc;
  doc["input"] = {{"occupation", event.input.occupation.counts()}, {"model", model_to_json(event.input.model)}};
  doc["measurement"] = measurement_to_json(event.measurement);
  doc["interferometer"] = interferometer_to_json(event.interferometer);
  doc["result"] = std::visit(overloaded{
                                 [](const std::monostate&) { return json(nullptr); },
                                 [](double p) { return json{{"probability", p}}; },
                                 [](const ModeOccupation& s) { return json{{"sample", s.counts()}}; },
                                 [](const DistributionTable& t) { return json{{"table", table_to_json(t)}}; },
                             },
                             event.result);
  return doc;
}

Event event_from_json(const json& doc) {
  const json& input = doc.at("input");
  Event event(Input(ModeOccupation(counts_from_json(input.at("occupation"))), model_from_json(input.at("model"))),
              measurement_from_json(doc.at("measurement")), interferometer_from_json(doc.at("interferometer")));
  if (doc.contains("result") && !doc.at("result").is_null()) {
    const json& result = doc.at("result");
    if (result.contains("probability")) {
      event.result = result.at("probability").get<double>();
    } else if (result.contains("sample")) {
      event.result = ModeOccupation(counts_from_json(result.at("sample")));
    } else if (result.contains("table")) {
      event.result = table_from_json(result.at("table"));
    } else {
      throw InvalidArgument("unrecognized event result");
    }
  }
  return event;
}

void write_samples_csv(std::ostream& out, const std::vector<ModeOccupation>& samples, int modes) {
  for (int q = 0; q < modes; ++q) out << (q ? "," : "") << "mode_" << q + 1;
  out << '\n';
  for (const ModeOccupation& s : samples) {
    if (s.modes() != modes) throw InvalidArgument("sample has the wrong number of modes");
    for (int q = 0; q < modes; ++q) out << (q ? "," : "") << s[q];
    out << '\n';
  }
}

std::vector<ModeOccupation> read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("sample CSV is empty");
  std::size_t modes = 1;
  for (char c : line) modes += c == ',' ? 1 : 0;
  if (line.rfind("mode_1", 0) != 0) throw InvalidArgument("sample CSV header must start with mode_1");
  std::vector<ModeOccupation> samples;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::vector<int> counts;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      int value = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || (ptr != field.data() + field.size() && *ptr != '\r')) {
        throw InvalidArgument("sample CSV row " + std::to_string(row) + ": bad count '" + field + "'");
      }
      counts.push_back(value);
    }
    if (counts.size() != modes) {
      throw InvalidArgument("sample CSV row " + std::to_string(row) + " has the wrong number of columns");
    }
    samples.emplace_back(std::move(counts));
  }
  return samples;
}

std::vector<ModeOccupation> read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open sample file " + path.string());
  return read_samples_csv(in);
}

void write_table_csv(std::ostream& out, const DistributionTable& table, const std::string& prefix) {
  const int width = table.outcomes.empty() ? 0 : table.outcomes.front().modes();
  for (int q = 0; q < width; ++q) out << prefix << '_' << q + 1 << ',';
  out << "probability\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (int q = 0; q < width; ++q) out << table.outcomes[i][q] << ',';
    out << format_double(table.probs[i]) << '\n';
  }
}

}  // namespace bsim::io
