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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "bsim/errors.hpp"
#include "bsim/interferometers.hpp"
#include "bsim/io.hpp"
#include "bsim/optimize.hpp"
#include "bsim/partitions.hpp"
#include "bsim/samplers.hpp"
#include "bsim/validation.hpp"
#include "bsim/version.hpp"
#include "detail.hpp"

namespace bsim::cli {

namespace {

using io::format_double;

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
  }

  std::ofstream open(const std::string& name) {
    const std::filesystem::path path = root_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    files_.push_back(path);
    return out;
  }

  void write_json(const std::string& name, const json& doc) { open(name) << doc.dump(2) << '\n'; }

  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> files_;
};

struct Context {
  const ExperimentConfig& config;
  const json& doc;
  const json& section;
  OutputDir& out;
  int n;
  int m;
  double loss;
};

Input make_input(const Context& ctx, const json& model_spec) {
  return Input(detail::build_input(ctx.doc), detail::build_model(model_spec, ctx.n));
}

Interferometer make_interferometer(const Context& ctx) {
  return detail::build_interferometer(ctx.doc.at("interferometer"), ctx.m);
}

std::vector<Subset> make_subsets(const json& lists, int modes) {
  std::vector<Subset> subsets;
  for (const json& s : lists) subsets.emplace_back(modes, s.get<std::vector<int>>());
  return subsets;
}

void run_hom(Context& ctx) {
  const json& s = ctx.section;
  const double delta_omega = s.at("delta_omega").get<double>();
  const double lo = s.at("tau_min").get<double>();
  const double hi = s.at("tau_max").get<double>();
  const double step = s.at("tau_step").get<double>();
  const auto points = static_cast<long long>(std::floor((hi - lo) / step + 0.5)) + 1;
  const Interferometer splitter(beam_splitter(s.at("transmission").get<double>()), InterferometerKind::circuit);
  const ModeOccupation pair({1, 1});

  auto csv = ctx.out.open("hom.csv");
  csv << "delta_tau,x,coincidence\n";
  for (long long i = 0; i < points; ++i) {
    const double tau = lo + static_cast<double>(i) * step;
    const double x = std::exp(-std::pow(delta_omega * tau, 2));
    const double p = compute_probability_fock(Input(pair, OneParameterInterpolation{x}), splitter, pair);
    csv << format_double(tau) << ',' << format_double(x) << ',' << format_double(p) << '\n';
  }
}

void run_prob(Context& ctx) {
  const Input input = make_input(ctx, ctx.doc.at("model"));
  const Interferometer u = make_interferometer(ctx);
  const ModeOccupation output(ctx.section.at("output").get<std::vector<int>>());
  double p = 0.0;
  if (ctx.loss == 1.0) {
    Event event(input, FockDetection{output}, u);
    p = compute_probability_fock(event);
    ctx.out.write_json("event.json", io::event_to_json(event));
  } else {
    p = lossy_probability(input, u, ctx.loss, output);
  }
  ctx.out.write_json("probability.json", json{{"input", input.occupation.counts()},
                                              {"output", output.counts()},
                                              {"model", io::model_to_json(input.model)},
                                              {"loss", ctx.loss},
                                              {"probability", p}});
}

void run_sample(Context& ctx) {
  const Input input = make_input(ctx, ctx.doc.at("model"));
  const Interferometer u = make_interferometer(ctx);
  const auto count = ctx.section.at("count").get<std::size_t>();
  const double dark = ctx.section.at("dark_count_p").get<double>();
  const double loss = ctx.loss;
  const Sampler sampler = [&](Rng& rng) {
    ModeOccupation s = sample_fock(input, u, rng, loss);
    if (dark == 0.0) return s;
    std::vector<int> counts = s.counts();
    for (int& c : counts) c += bernoulli(rng, dark) ? 1 : 0;
    return ModeOccupation(std::move(counts));
  };
  const auto samples = sample_batch(sampler, count, ctx.config.seed, ctx.config.threads);
  auto csv = ctx.out.open("samples.csv");
  io::write_samples_csv(csv, samples, ctx.m);
  ctx.out.write_json("samples.json", json{{"seed", ctx.config.seed},
                                          {"n", ctx.n},
                                          {"m", ctx.m},
                                          {"model", io::model_to_json(input.model)},
                                          {"eta", loss},
                                          {"dark_count_p", dark},
                                          {"count", count}});
}

void run_noisy(Context& ctx) {
  const Input input = make_input(ctx, ctx.doc.at("model"));
  const Interferometer u = make_interferometer(ctx);
  const json& s = ctx.section;
  SamplerConfig cfg;
  cfg.seed = ctx.config.seed;
  cfg.burn_in = s.at("burn_in").get<int>();
  cfg.thinning = s.at("thinning").get<int>();
  cfg.error = s.at("error").get<double>();
  cfg.failure_probability = s.at("failure_probability").get<double>();
  if (s.contains("truncation_order") && !s.at("truncation_order").is_null()) {
    cfg.truncation_order = s.at("truncation_order").get<int>();
  }
  cfg.mis_samples = s.at("mis_samples").get<std::size_t>();
  const NoisyDistribution result = noisy_distribution(input, ctx.loss, u, cfg, ctx.config.threads);
  auto exact = ctx.out.open("exact.csv");
  io::write_table_csv(exact, result.exact, "mode");
  auto truncated = ctx.out.open("truncated.csv");
  io::write_table_csv(truncated, result.truncated, "mode");
  auto sampled = ctx.out.open("sampled.csv");
  io::write_table_csv(sampled, result.sampled, "mode");
  ctx.out.write_json("noisy.json", json{{"truncation_order", result.truncation_order},
                                        {"tail_bound", result.tail_bound},
                                        {"mis_acceptance", result.mis_acceptance},
                                        {"exact_total", result.exact.total()}});
}

void run_partition(Context& ctx) {
  const Input input = make_input(ctx, ctx.doc.at("model"));
  const Interferometer u = make_interferometer(ctx);
  Event event(input, PartitionCountsAll{Partition(make_subsets(ctx.section.at("subsets"), ctx.m))}, u);
  const DistributionTable& table = partition_counts_all(event, ctx.config.threads);
  auto csv = ctx.out.open("partition.csv");
  io::write_table_csv(csv, table, "k");
}

void write_traces(Context& ctx, const std::vector<ConfidenceTrace>& traces, const std::vector<double>& mean,
                  const DensityGrid& grid) {
  auto csv = ctx.out.open("traces.csv");
  csv << "trial,t,xi\n";
  for (std::size_t trial = 0; trial < traces.size(); ++trial) {
    for (std::size_t t = 0; t < traces[trial].xi.size(); ++t) {
      csv << trial << ',' << t << ',' << format_double(traces[trial].xi[t]) << '\n';
    }
  }
  auto mean_csv = ctx.out.open("mean.csv");
  mean_csv << "t,xi\n";
  for (std::size_t t = 0; t < mean.size(); ++t) mean_csv << t << ',' << format_double(mean[t]) << '\n';
  auto density = ctx.out.open("density.csv");
  density << "t_bin,xi_bin,count\n";
  for (int tb = 0; tb < grid.t_bins; ++tb) {
    for (int xb = 0; xb < grid.xi_bins; ++xb) density << tb << ',' << xb << ',' << grid.at(tb, xb) << '\n';
  }
}

Hypothesis make_hypothesis(const Context& ctx, const std::string& label, const json& model_spec,
                           const Interferometer& u) {
  const Input input = make_input(ctx, model_spec);
  const json& subsets = ctx.section.at("subsets");
  if (!subsets.is_null()) return partition_hypothesis(label, input, u, Partition(make_subsets(subsets, ctx.m)));
  if (ctx.loss == 1.0) return fock_hypothesis(label, input, u);
  const double loss = ctx.loss;
  return Hypothesis{label, [input, u, loss](const ModeOccupation& s) { return lossy_probability(input, u, loss, s); }};
}

void run_validate(Context& ctx) {
  const json& s = ctx.section;
  const Interferometer u = make_interferometer(ctx);
  const Hypothesis h0 = make_hypothesis(ctx, "h0", s.at("h0"), u);
  const Hypothesis ha = make_hypothesis(ctx, "ha", s.at("ha"), u);
  const double prior = s.at("prior").get<double>();
  const int t_bins = s.at("t_bins").get<int>();
  const int xi_bins = s.at("xi_bins").get<int>();
  json summary = {{"prior", prior}};

  std::vector<ModeOccupation> data;
  ValidationRun run;
  if (!s.at("data").is_null()) {
    data = io::read_samples_csv(std::filesystem::path(s.at("data").get<std::string>()));
    for (const auto& sample : data) {
      if (sample.modes() != ctx.m) throw InvalidArgument("sample data has the wrong number of modes");
    }
    run.traces.push_back(bayesian_confidence(data, h0, ha, prior));
    run.mean = run.traces.front().xi;
    run.density = density_grid(run.traces, t_bins, xi_bins);
    summary["source"] = "data";
    summary["samples"] = data.size();
  } else {
    const Input source = make_input(ctx, s.at("source"));
    const double loss = ctx.loss;
    const Sampler sampler = [&](Rng& rng) { return sample_fock(source, u, rng, loss); };
    run = run_validation_trials(s.at("trials").get<std::size_t>(), s.at("samples").get<std::size_t>(), sampler, h0,
                                ha, prior, ctx.config.seed, ctx.config.threads, t_bins, xi_bins);
    summary["source"] = io::model_to_json(source.model);
    summary["samples"] = s.at("samples");
  }
  std::size_t above = 0;
  std::size_t below = 0;
  for (const auto& trace : run.traces) {
    above += trace.first_at_or_above(0.95).has_value() ? 1 : 0;
    below += trace.first_at_or_below(0.05).has_value() ? 1 : 0;
  }
  summary["trials"] = run.traces.size();
  summary["reached_0.95"] = above;
  summary["reached_0.05"] = below;
  summary["final_mean_xi"] = run.mean.back();
  write_traces(ctx, run.traces, run.mean, run.density);

  if (!s.at("x_grid").is_null()) {
    if (data.empty()) {
      // Estimate from the first trial's stream.
      const Input source = make_input(ctx, s.at("source"));
      Rng rng = make_rng(ctx.config.seed, 0);
      for (std::size_t i = 0; i < s.at("samples").get<std::size_t>(); ++i) data.push_back(sample_fock(source, u, rng));
    }
    const auto estimate = estimate_distinguishability(data, u, detail::build_input(ctx.doc),
                                                      s.at("x_grid").get<std::vector<double>>());
    auto csv = ctx.out.open("estimate.csv");
    csv << "x,log_likelihood\n";
    for (std::size_t g = 0; g < estimate.x_grid.size(); ++g) {
      csv << format_double(estimate.x_grid[g]) << ',' << format_double(estimate.log_likelihood[g]) << '\n';
    }
    summary["x_hat"] = estimate.x_hat;
  }
  ctx.out.write_json("summary.json", summary);
}

void run_optimize(Context& ctx) {
  const json& s = ctx.section;
  const std::string kind = s.at("objective").get<std::string>();
  UnitaryObjective objective;
  if (kind == "trace-overlap") {
    objective = trace_overlap_objective(make_interferometer(ctx).matrix());
  } else if (kind == "entry-modulus") {
    objective = entry_modulus_objective(s.at("row").get<int>(), s.at("col").get<int>());
  } else {
    std::vector<int> photons = s.at("photons").is_null() ? detail::build_input(ctx.doc).photon_modes()
                                                         : s.at("photons").get<std::vector<int>>();
    std::vector<int> subset;
    if (s.at("subset").is_null()) {
      for (int q = 0; q < std::max(1, ctx.m / 2); ++q) subset.push_back(q);
    } else {
      subset = s.at("subset").get<std::vector<int>>();
    }
    if (photons.empty()) throw InvalidArgument("full-bunching needs at least one photon");
    objective = full_bunching_objective(std::move(photons), std::move(subset));
  }
  AscentOptions options;
  options.step = s.at("step").get<double>();
  options.max_iter = s.at("max_iter").get<int>();
  options.tol = s.at("tol").get<double>();
  options.seed = ctx.config.seed;
  const AscentResult result = riemannian_ascent(objective, ctx.m, options);
  auto csv = ctx.out.open("trace.csv");
  csv << "iter,f,grad_norm\n";
  for (const AscentStep& step : result.trace) {
    csv << step.iteration << ',' << format_double(step.value) << ',' << format_double(step.grad_norm) << '\n';
  }
  ctx.out.write_json("result.json", json{{"objective", objective.name},
                                         {"value", result.value},
                                         {"iterations", result.trace.size()},
                                         {"converged", result.converged},
                                         {"max_unitarity_defect", result.max_unitarity_defect},
                                         {"unitary", io::matrix_to_json(result.unitary)}});
}

void run_bench(Context& ctx) {
  const json& s = ctx.section;
  const std::string kernel = s.at("kernel").get<std::string>();
  const int lo = s.at("n_min").get<int>();
  const int hi = s.at("n_max").get<int>();
  const int repeats = s.at("repeats").get<int>();
  const double min_seconds = s.at("min_seconds").get<double>();
  auto csv = ctx.out.open("bench.csv");
  csv << "n,mean_seconds\n";
  double sink = 0.0;
  for (int n = lo; n <= hi; ++n) {
    const int modes = kernel == "ryser" ? n : std::max(n, n * n);
    const Interferometer u = rand_haar(modes, derive_seed(ctx.config.seed, static_cast<std::uint64_t>(n)));
    const ComplexMatrix block = u.matrix().topLeftCorner(n, n);
    std::vector<int> photons(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) photons[static_cast<std::size_t>(k)] = k;
    Rng rng = make_rng(ctx.config.seed, static_cast<std::uint64_t>(n));
    int runs = 0;
    const auto start = std::chrono::steady_clock::now();
    double elapsed = 0.0;
    while (runs < repeats || elapsed < min_seconds) {
      if (kernel == "ryser") {
        sink += std::abs(permanent_ryser(block, ctx.config.threads));
      } else {
        sink += sample_bosonic(u.matrix(), photons, rng).photons();
      }
      ++runs;
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    csv << n << ',' << format_double(elapsed / runs) << '\n';
  }
  if (!std::isfinite(sink)) throw NumericError("benchmark produced a non-finite value");
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  RunResult result;
  const auto start = std::chrono::steady_clock::now();
  try {
    OutputDir out(config.output);
    const json& doc = config.resolved;
    Context ctx{config,
                doc,
                doc.contains(config.command) ? doc.at(config.command) : doc,
                out,
                doc.at("n").get<int>(),
                doc.at("m").get<int>(),
                doc.at("loss").get<double>()};
    if (config.command == "hom") {
      run_hom(ctx);
    } else if (config.command == "prob") {
      run_prob(ctx);
    } else if (config.command == "sample") {
      run_sample(ctx);
    } else if (config.command == "noisy-dist") {
      run_noisy(ctx);
    } else if (config.command == "partition") {
      run_partition(ctx);
    } else if (config.command == "validate") {
      run_validate(ctx);
    } else if (config.command == "optimize") {
      run_optimize(ctx);
    } else if (config.command == "bench") {
      run_bench(ctx);
    } else {
      throw InvalidArgument("unknown command '" + config.command + "'");
    }
    json files = json::array();
    for (const auto& f : out.files()) files.push_back(f.filename().string());
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.write_json("manifest.json", json{{"version", BSIM_VERSION},
                                         {"command", config.command},
                                         {"seed", config.seed},
                                         {"threads", config.threads},
                                         {"wall_time_seconds", wall},
                                         {"files", files},
                                         {"config", config.resolved}});
    result.files = out.files();
    result.message = config.command + ": wrote " + std::to_string(result.files.size()) + " files to " +
                     config.output.string();
  } catch (const GuardExceeded& e) {
    result.exit_code = kGuardExceeded;
    result.message = e.what();
  } catch (const NumericError& e) {
    result.exit_code = kNumericError;
    result.message = e.what();
  } catch (const InvalidArgument& e) {
    result.exit_code = kValidationError;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = kRuntimeFailure;
    result.message = e.what();
  }
  return result;
}

}  // namespace bsim::cli
