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

#include <cstdlib>
#include <set>
#include <sstream>

#include "bsim/errors.hpp"
#include "bsim/interferometers.hpp"
#include "bsim/io.hpp"
#include "bsim/samplers.hpp"
#include "detail.hpp"

namespace bsim::cli {

namespace detail {

json defaults_for(std::string_view command) {
  json doc = {
      {"command", std::string(command)},
      {"seed", 0},
      {"threads", 1},
      {"n", 3},
      {"m", 5},
      {"input", nullptr},
      {"model", {{"kind", "bosonic"}}},
      {"interferometer", {{"kind", "haar"}, {"seed", 1}}},
      {"loss", 1.0},
  };
  if (command == "hom") {
    doc["hom"] = {{"delta_omega", 1.0}, {"tau_min", -4.0}, {"tau_max", 4.0}, {"tau_step", 0.01},
                  {"transmission", 0.7071067811865476}};
  } else if (command == "prob") {
    doc["prob"] = {{"output", nullptr}};
  } else if (command == "sample") {
    doc["sample"] = {{"count", 100000}, {"dark_count_p", 0.0}};
  } else if (command == "noisy-dist") {
    doc["noisy-dist"] = {{"burn_in", 100}, {"thinning", 10}, {"error", 1e-4}, {"failure_probability", 1e-4},
                         {"truncation_order", nullptr}, {"mis_samples", 100000}};
  } else if (command == "partition") {
    doc["partition"] = {{"subsets", nullptr}};
  } else if (command == "validate") {
    doc["validate"] = {{"trials", 100},
                       {"samples", 300},
                       {"prior", 0.5},
                       {"h0", {{"kind", "bosonic"}}},
                       {"ha", {{"kind", "distinguishable"}}},
                       {"source", {{"kind", "bosonic"}}},
                       {"data", nullptr},
                       {"x_grid", nullptr},
                       {"subsets", nullptr},
                       {"t_bins", 50},
                       {"xi_bins", 50}};
  } else if (command == "optimize") {
    doc["optimize"] = {{"objective", "trace-overlap"}, {"row", 0},        {"col", 0},
                       {"photons", nullptr},           {"subset", nullptr}, {"step", 0.1},
                       {"max_iter", 1000},             {"tol", 1e-8}};
  } else if (command == "bench") {
    doc["bench"] = {{"kernel", "ryser"}, {"n_min", 1}, {"n_max", 20}, {"repeats", 3}, {"min_seconds", 0.05}};
  }
  return doc;
}

Interferometer build_interferometer(const json& spec, int modes) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "haar") return rand_haar(modes, spec.at("seed").get<std::uint64_t>());
  if (kind == "fourier") return fourier(modes);
  if (kind == "hadamard") return hadamard(modes);
  if (kind == "user") {
    Interferometer u = io::interferometer_from_json(json{{"re", spec.at("re")}, {"im", spec.value("im", json::array())}});
    if (u.modes() != modes) throw InvalidArgument("matrix size does not match m");
    return u;
  }
  if (kind == "circuit") {
    std::vector<CircuitElement> elements;
    for (const json& e : spec.at("elements")) {
      const std::string type = e.at("type").get<std::string>();
      if (type == "beam_splitter") {
        const auto pair = e.at("modes").get<std::vector<int>>();
        if (pair.size() != 2) throw InvalidArgument("beam splitter needs two modes");
        elements.push_back(CircuitElement::beam_splitter(e.at("t").get<double>(), pair[0], pair[1]));
      } else if (type == "phase_shift") {
        elements.push_back(CircuitElement::phase_shift(e.at("phi").get<double>(), e.at("mode").get<int>()));
      } else {
        throw InvalidArgument("unknown circuit element '" + type + "'");
      }
    }
    return compose(elements, modes);
  }
  throw InvalidArgument("unknown interferometer kind '" + kind + "'");
}

DistinguishabilityModel build_model(const json& spec, int photons) {
  DistinguishabilityModel model = io::model_from_json(spec);
  if (const auto* user = std::get_if<UserGram>(&model)) {
    if (user->gram.size() != photons) throw InvalidArgument("Gram matrix size does not match n");
  }
  return model;
}

ModeOccupation build_input(const json& resolved) {
  if (!resolved.at("input").is_null()) return ModeOccupation(resolved.at("input").get<std::vector<int>>());
  return first_modes(resolved.at("n").get<int>(), resolved.at("m").get<int>());
}

bool is_sampleable(const json& model_spec) {
  const std::string kind = model_spec.value("kind", "");
  return kind == "bosonic" || kind == "distinguishable" || kind == "interpolation";
}

}  // namespace detail

namespace {

bool is_seed(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

const std::set<std::string> kCommonKeys = {"command", "seed",  "threads",        "output",
                                           "n",       "m",     "input",          "model",
                                           "interferometer", "loss", "description"};

class Checker {
 public:
  std::vector<ConfigError> errors;

  void fail(std::string path, std::string message) { errors.push_back({std::move(path), std::move(message)}); }
  bool ok() const { return errors.empty(); }

  std::optional<long long> integer(const json& obj, const std::string& base, const std::string& key, long long lo,
                                   long long hi) {
    const std::string path = base + "/" + key;
    if (!obj.contains(key)) {
      fail(path, "missing value");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(path, "expected an integer");
      return std::nullopt;
    }
    const long long value = v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)
                                ? hi + 1
                                : v.get<long long>();
    if (value < lo || value > hi) {
      fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return std::nullopt;
    }
    return value;
  }

  std::optional<double> number(const json& obj, const std::string& base, const std::string& key, double lo,
                               double hi, const char* range_message = nullptr) {
    const std::string path = base + "/" + key;
    if (!obj.contains(key)) {
      fail(path, "missing value");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    const double value = v.get<double>();
    if (!(value >= lo && value <= hi)) {
      if (range_message != nullptr) {
        fail(path, range_message);
      } else {
        std::ostringstream msg;
        msg << "must lie in [" << lo << ", " << hi << "]";
        fail(path, msg.str());
      }
      return std::nullopt;
    }
    return value;
  }

  std::optional<std::vector<int>> index_list(const json& v, const std::string& path, int modes, bool allow_empty) {
    if (!v.is_array()) {
      fail(path, "expected an array of mode indices");
      return std::nullopt;
    }
    std::vector<int> out;
    std::set<int> seen;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string item = path + "/" + std::to_string(i);
      if (!v[i].is_number_integer()) {
        fail(item, "expected an integer");
        return std::nullopt;
      }
      const long long q = v[i].get<long long>();
      if (q < 0 || q >= modes) {
        fail(item, "mode index out of range");
        return std::nullopt;
      }
      if (!seen.insert(static_cast<int>(q)).second) {
        fail(item, "duplicate mode index");
        return std::nullopt;
      }
      out.push_back(static_cast<int>(q));
    }
    if (out.empty() && !allow_empty) {
      fail(path, "must not be empty");
      return std::nullopt;
    }
    return out;
  }

  void model(const json& spec, const std::string& path, int photons) {
    if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
      fail(path + "/kind", "expected one of bosonic, distinguishable, interpolation, gram");
      return;
    }
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "interpolation") {
      number(spec, path, "x", 0.0, 1.0);
      return;
    }
    if (kind == "gram") {
      try {
        detail::build_model(spec, photons);
      } catch (const std::exception& e) {
        fail(path, e.what());
      }
      return;
    }
    if (kind != "bosonic" && kind != "distinguishable") {
      fail(path + "/kind", "unknown model '" + kind + "'");
    }
  }

  void interferometer(const json& spec, int modes) {
    const std::string path = "/interferometer";
    if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
      fail(path + "/kind", "expected one of haar, fourier, hadamard, user, circuit");
      return;
    }
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "haar") {
      if (!spec.contains("seed") || !is_seed(spec.at("seed"))) {
        fail(path + "/seed", "expected a nonnegative integer seed");
        return;
      }
    } else if (kind == "hadamard") {
      if ((modes & (modes - 1)) != 0) {
        fail(path + "/kind", "hadamard needs m to be a power of two");
        return;
      }
    } else if (kind == "circuit") {
      if (!spec.contains("elements") || !spec.at("elements").is_array()) {
        fail(path + "/elements", "expected an array of circuit elements");
        return;
      }
      const json& elements = spec.at("elements");
      for (std::size_t i = 0; i < elements.size(); ++i) {
        const std::string item = path + "/elements/" + std::to_string(i);
        const json& e = elements[i];
        const std::string type = e.is_object() ? e.value("type", "") : "";
        if (type == "beam_splitter") {
          number(e, item, "t", 0.0, 1.0);
          if (e.contains("modes")) {
            const auto pair = index_list(e.at("modes"), item + "/modes", modes, false);
            if (pair && pair->size() != 2) fail(item + "/modes", "beam splitter needs two distinct modes");
          } else {
            fail(item + "/modes", "missing value");
          }
        } else if (type == "phase_shift") {
          number(e, item, "phi", -1e6, 1e6);
          integer(e, item, "mode", 0, modes - 1);
        } else {
          fail(item + "/type", "expected beam_splitter or phase_shift");
        }
      }
      return;
    } else if (kind != "fourier" && kind != "user") {
      fail(path + "/kind", "unknown interferometer kind '" + kind + "'");
      return;
    }
    try {
      detail::build_interferometer(spec, modes);
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }

  std::optional<std::vector<std::vector<int>>> subsets(const json& v, const std::string& path, int modes) {
    if (!v.is_array() || v.empty()) {
      fail(path, "expected a nonempty array of mode-index lists");
      return std::nullopt;
    }
    std::vector<std::vector<int>> out;
    std::set<int> used;
    for (std::size_t r = 0; r < v.size(); ++r) {
      const std::string item = path + "/" + std::to_string(r);
      auto members = index_list(v[r], item, modes, false);
      if (!members) return std::nullopt;
      for (int q : *members) {
        if (!used.insert(q).second) {
          fail(item, "subsets overlap at mode " + std::to_string(q));
          return std::nullopt;
        }
      }
      out.push_back(std::move(*members));
    }
    return out;
  }
};

json merge_defaults(const json& defaults, const json& user) {
  json out = defaults;
  for (const auto& [key, value] : user.items()) {
    if (out.contains(key) && out[key].is_object() && value.is_object() && key == out.value("command", "")) {
      for (const auto& [inner, v] : value.items()) out[key][inner] = v;
    } else {
      out[key] = value;
    }
  }
  return out;
}

std::string default_output() {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "bsim_out";
}

void check_section(Checker& c, const json& doc, const std::string& command, int n, int m, double loss) {
  const std::string base = "/" + command;
  const json& s = doc.at(command);
  if (!s.is_object()) {
    c.fail(base, "expected an object");
    return;
  }
  const json defaults = detail::defaults_for(command).at(command);
  for (const auto& [key, value] : s.items()) {
    if (!defaults.contains(key)) c.fail(base + "/" + key, "unknown key");
  }
  const bool sampleable = detail::is_sampleable(doc.at("model"));

  if (command == "hom") {
    c.number(s, base, "delta_omega", 0.0, 1e6);
    const auto lo = c.number(s, base, "tau_min", -1e6, 1e6);
    const auto hi = c.number(s, base, "tau_max", -1e6, 1e6);
    const auto step = c.number(s, base, "tau_step", 1e-9, 1e6);
    c.number(s, base, "transmission", 0.0, 1.0);
    if (lo && hi && *hi < *lo) c.fail(base + "/tau_max", "must not be below tau_min");
    if (lo && hi && step && (*hi - *lo) / *step > 1e7) c.fail(base + "/tau_step", "grid has more than 1e7 points");
  } else if (command == "prob") {
    if (!s.contains("output") || s.at("output").is_null()) {
      c.fail(base + "/output", "missing detected pattern");
    } else if (!s.at("output").is_array() || s.at("output").size() != static_cast<std::size_t>(m)) {
      c.fail(base + "/output", "expected an array of m counts");
    } else {
      int total = 0;
      for (std::size_t q = 0; q < s.at("output").size(); ++q) {
        const json& v = s.at("output")[q];
        if (!v.is_number_integer() || v.get<long long>() < 0) {
          c.fail(base + "/output/" + std::to_string(q), "expected a nonnegative integer");
          return;
        }
        total += v.get<int>();
      }
      if (total > n) c.fail(base + "/output", "detected pattern has more photons than the input");
      if (loss == 1.0 && total != n) c.fail(base + "/output", "lossless detection must find all n photons");
    }
  } else if (command == "sample") {
    c.integer(s, base, "count", 1, 100'000'000);
    c.number(s, base, "dark_count_p", 0.0, 1.0, "invalid probability");
    if (!sampleable) c.fail("/model/kind", "sampling needs a bosonic, distinguishable or interpolation model");
  } else if (command == "noisy-dist") {
    if (!sampleable) c.fail("/model/kind", "noisy-dist needs a bosonic, distinguishable or interpolation model");
    const auto burn_in = c.integer(s, base, "burn_in", 0, 1'000'000'000);
    const auto thinning = c.integer(s, base, "thinning", 1, 1'000'000);
    c.number(s, base, "error", 1e-300, 1.0 - 1e-16, "must lie in (0, 1)");
    c.number(s, base, "failure_probability", 1e-300, 1.0 - 1e-16, "must lie in (0, 1)");
    if (s.contains("truncation_order") && !s.at("truncation_order").is_null()) {
      c.integer(s, base, "truncation_order", 0, 64);
    }
    c.integer(s, base, "mis_samples", 1, 100'000'000);
    (void)burn_in;
    (void)thinning;
  } else if (command == "partition") {
    if (!s.contains("subsets") || s.at("subsets").is_null()) {
      c.fail(base + "/subsets", "missing subsets");
    } else {
      c.subsets(s.at("subsets"), base + "/subsets", m);
    }
  } else if (command == "validate") {
    c.integer(s, base, "trials", 1, 1'000'000);
    c.integer(s, base, "samples", 1, 100'000'000);
    const auto prior = c.number(s, base, "prior", 0.0, 1.0);
    if (prior && (*prior == 0.0 || *prior == 1.0)) c.fail(base + "/prior", "must lie in (0, 1)");
    c.model(s.at("h0"), base + "/h0", n);
    c.model(s.at("ha"), base + "/ha", n);
    const bool has_data = s.contains("data") && !s.at("data").is_null();
    if (has_data && !s.at("data").is_string()) c.fail(base + "/data", "expected a path to a sample CSV file");
    if (!has_data) {
      c.model(s.at("source"), base + "/source", n);
      if (!detail::is_sampleable(s.at("source"))) {
        c.fail(base + "/source/kind", "source needs a bosonic, distinguishable or interpolation model");
      }
    }
    if (s.contains("x_grid") && !s.at("x_grid").is_null()) {
      const json& grid = s.at("x_grid");
      if (!grid.is_array() || grid.empty()) {
        c.fail(base + "/x_grid", "expected a nonempty array of values in [0, 1]");
      } else {
        for (std::size_t i = 0; i < grid.size(); ++i) {
          if (!grid[i].is_number() || !(grid[i].get<double>() >= 0.0 && grid[i].get<double>() <= 1.0)) {
            c.fail(base + "/x_grid/" + std::to_string(i), "must lie in [0, 1]");
          }
        }
        if (loss != 1.0) c.fail(base + "/x_grid", "distinguishability estimates need lossless data");
      }
    }
    if (s.contains("subsets") && !s.at("subsets").is_null()) {
      c.subsets(s.at("subsets"), base + "/subsets", m);
      if (loss != 1.0) c.fail(base + "/subsets", "partition hypotheses need lossless data");
    }
    c.integer(s, base, "t_bins", 1, 100000);
    c.integer(s, base, "xi_bins", 1, 100000);
  } else if (command == "optimize") {
    const std::string objective = s.value("objective", "");
    if (objective == "entry-modulus") {
      c.integer(s, base, "row", 0, m - 1);
      c.integer(s, base, "col", 0, m - 1);
    } else if (objective == "full-bunching") {
      if (s.contains("photons") && !s.at("photons").is_null()) c.index_list(s.at("photons"), base + "/photons", m, false);
      if (s.contains("subset") && !s.at("subset").is_null()) c.index_list(s.at("subset"), base + "/subset", m, false);
    } else if (objective != "trace-overlap") {
      c.fail(base + "/objective", "expected trace-overlap, entry-modulus or full-bunching");
    }
    c.number(s, base, "step", 1e-300, 1e6, "must be positive");
    c.integer(s, base, "max_iter", 1, 100'000'000);
    c.number(s, base, "tol", 1e-300, 1e6, "must be positive");
  } else if (command == "bench") {
    const std::string kernel = s.value("kernel", "");
    if (kernel != "ryser" && kernel != "clifford") c.fail(base + "/kernel", "expected ryser or clifford");
    const auto lo = c.integer(s, base, "n_min", 1, 40);
    const auto hi = c.integer(s, base, "n_max", 1, 40);
    if (lo && hi && *hi < *lo) c.fail(base + "/n_max", "must not be below n_min");
    c.integer(s, base, "repeats", 1, 1'000'000);
    c.number(s, base, "min_seconds", 0.0, 3600.0);
  }
}

}  // namespace

ConfigResult validate_config(std::string_view text, const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    ConfigResult result;
    result.parse_failed = true;
    result.errors.push_back({"", std::string("parse error: ") + e.what()});
    return result;
  }
  return validate_document(std::move(doc), overrides);
}

ConfigResult validate_document(json doc, const Overrides& overrides) {
  ConfigResult result;
  Checker c;
  if (!doc.is_object()) {
    result.errors.push_back({"", "config must be a JSON object"});
    return result;
  }
  // A run manifest carries its resolved config.
  if (doc.contains("config") && doc.contains("version") && doc.at("config").is_object()) {
    doc = doc.at("config");
  }
  if (overrides.command) doc["command"] = *overrides.command;
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.threads) doc["threads"] = *overrides.threads;
  if (overrides.output) doc["output"] = *overrides.output;

  if (!doc.contains("command") || !doc.at("command").is_string()) {
    result.errors.push_back({"/command", "missing command"});
    return result;
  }
  const std::string command = doc.at("command").get<std::string>();
  bool known = false;
  for (auto name : kCommands) known = known || name == command;
  if (!known) {
    result.errors.push_back({"/command", "unknown command '" + command + "'"});
    return result;
  }
  for (const auto& [key, value] : doc.items()) {
    if (!kCommonKeys.contains(key) && key != command) c.fail("/" + key, "unknown key");
  }

  json resolved = merge_defaults(detail::defaults_for(command), doc);
  if (!resolved.contains("output") || resolved.at("output").is_null()) resolved["output"] = default_output();
  if (!resolved.at("output").is_string() || resolved.at("output").get<std::string>().empty()) {
    c.fail("/output", "expected a nonempty directory path");
  }

  const auto seed_ok = is_seed(resolved.at("seed"));
  if (!seed_ok) c.fail("/seed", "expected a nonnegative integer");
  const auto threads = c.integer(resolved, "", "threads", 0, 1024);
  const auto m = c.integer(resolved, "", "m", 1, 4096);
  auto n = c.integer(resolved, "", "n", 0, 4096);
  c.number(resolved, "", "loss", 0.0, 1.0, "invalid probability");

  if (m && !resolved.at("input").is_null()) {
    const json& input = resolved.at("input");
    if (!input.is_array() || input.size() != static_cast<std::size_t>(*m)) {
      c.fail("/input", "expected an array of m counts");
    } else {
      int total = 0;
      for (std::size_t q = 0; q < input.size(); ++q) {
        if (!input[q].is_number_integer() || input[q].get<long long>() < 0 || input[q].get<long long>() > 1) {
          c.fail("/input/" + std::to_string(q), "input counts must be 0 or 1");
        } else {
          total += input[q].get<int>();
        }
      }
      if (doc.contains("n") && n && *n != total) c.fail("/n", "n does not match the input occupation");
      resolved["n"] = total;
      n = total;
    }
  } else if (m && n && *n > *m) {
    c.fail("/n", "n exceeds m");
  }

  if (n && m) {
    c.model(resolved.at("model"), "/model", static_cast<int>(*n));
    c.interferometer(resolved.at("interferometer"), static_cast<int>(*m));
    const double loss = resolved.at("loss").is_number() ? resolved.at("loss").get<double>() : 1.0;
    check_section(c, resolved, command, static_cast<int>(*n), static_cast<int>(*m), loss);
  }

  if (!c.ok()) {
    result.errors = std::move(c.errors);
    return result;
  }
  ExperimentConfig config;
  config.command = command;
  config.seed = resolved.at("seed").get<std::uint64_t>();
  config.threads = static_cast<unsigned>(*threads);
  config.output = resolved.at("output").get<std::string>();
  config.resolved = std::move(resolved);
  result.config = std::move(config);
  return result;
}

}  // namespace bsim::cli
