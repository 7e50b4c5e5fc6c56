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

#include "bsim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bsim/errors.hpp"
#include "bsim/parallel.hpp"
#include "bsim/partitions.hpp"

namespace bsim {

namespace {

double logistic(double log_odds) {
  if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
  const double e = std::exp(log_odds);
  return e / (1.0 + e);
}

double checked_likelihood(const Hypothesis& h, const ModeOccupation& outcome) {
  const double p = h.law(outcome);
  if (!(p >= 0.0 && p <= 1.0)) {
    throw NumericError("hypothesis '" + h.label + "' returned a value outside [0, 1]");
  }
  return p;
}

}  // namespace

Hypothesis fock_hypothesis(std::string label, const Input& input, const Interferometer& interf) {
  if (input.modes() != interf.modes()) throw InvalidArgument("input and interferometer mode counts differ");
  return Hypothesis{std::move(label), [input, interf](const ModeOccupation& s) {
                      return compute_probability_fock(input, interf, s);
                    }};
}

Hypothesis partition_hypothesis(std::string label, const Input& input, const Interferometer& interf,
                                const Partition& partition) {
  const DistributionTable table = partition_counts_all(input, interf, partition);
  std::map<std::vector<int>, double> lookup;
  for (std::size_t i = 0; i < table.size(); ++i) lookup.emplace(table.outcomes[i].counts(), table.probs[i]);
  return Hypothesis{std::move(label), [lookup = std::move(lookup), partition](const ModeOccupation& s) {
                      const auto it = lookup.find(bin_counts(s, partition).counts());
                      return it == lookup.end() ? 0.0 : it->second;
                    }};
}

std::optional<std::size_t> ConfidenceTrace::first_at_or_above(double threshold) const {
  for (std::size_t t = 0; t < xi.size(); ++t) {
    if (xi[t] >= threshold) return t;
  }
  return std::nullopt;
}

std::optional<std::size_t> ConfidenceTrace::first_at_or_below(double threshold) const {
  for (std::size_t t = 0; t < xi.size(); ++t) {
    if (xi[t] <= threshold) return t;
  }
  return std::nullopt;
}

ConfidenceTrace bayesian_confidence(std::span<const ModeOccupation> samples, const Hypothesis& h0,
                                    const Hypothesis& ha, double prior) {
  if (!(prior > 0.0 && prior < 1.0)) throw InvalidArgument("prior must lie in (0, 1)");
  enum class Pinned { none, null, alternative };
  Pinned pinned = Pinned::none;
  double log_odds = std::log(prior) - std::log1p(-prior);

  ConfidenceTrace trace;
  trace.xi.reserve(samples.size() + 1);
  trace.xi.push_back(prior);
  for (const ModeOccupation& outcome : samples) {
    const double p0 = checked_likelihood(h0, outcome);
    const double pa = checked_likelihood(ha, outcome);
    if (p0 == 0.0 && pa == 0.0) {
      throw InvalidArgument("invalid data: outcome " + outcome.to_string() +
                            " has zero probability under both hypotheses");
    }
    if (pinned == Pinned::none) {
      if (pa == 0.0) {
        pinned = Pinned::null;
      } else if (p0 == 0.0) {
        pinned = Pinned::alternative;
      } else {
        log_odds += std::log(p0) - std::log(pa);
      }
    }
    switch (pinned) {
      case Pinned::null: trace.xi.push_back(1.0); break;
      case Pinned::alternative: trace.xi.push_back(0.0); break;
      case Pinned::none: trace.xi.push_back(logistic(log_odds)); break;
    }
  }
  return trace;
}

DensityGrid density_grid(const std::vector<ConfidenceTrace>& traces, int t_bins, int xi_bins) {
  if (t_bins < 1 || xi_bins < 1) throw InvalidArgument("density grid needs at least one bin per axis");
  DensityGrid grid;
  grid.t_bins = t_bins;
  grid.xi_bins = xi_bins;
  for (const ConfidenceTrace& trace : traces) {
    grid.max_t = std::max(grid.max_t, trace.xi.empty() ? std::size_t{0} : trace.xi.size() - 1);
  }
  grid.counts.assign(static_cast<std::size_t>(t_bins) * static_cast<std::size_t>(xi_bins), 0);
  const double t_span = static_cast<double>(grid.max_t + 1);
  for (const ConfidenceTrace& trace : traces) {
    for (std::size_t t = 0; t < trace.xi.size(); ++t) {
      const int t_bin = std::min(t_bins - 1, static_cast<int>(static_cast<double>(t) * t_bins / t_span));
      const int xi_bin = std::clamp(static_cast<int>(std::floor(trace.xi[t] * xi_bins)), 0, xi_bins - 1);
      ++grid.counts[static_cast<std::size_t>(t_bin) * static_cast<std::size_t>(xi_bins) +
                    static_cast<std::size_t>(xi_bin)];
    }
  }
  return grid;
}

ValidationRun run_validation_trials(std::size_t n_trials, std::size_t n_samples,
                                    const Sampler& sampler, const Hypothesis& h0,
                                    const Hypothesis& ha, double prior, std::uint64_t seed,
                                    unsigned threads, int t_bins, int xi_bins) {
  if (n_trials < 1 || n_samples < 1) throw InvalidArgument("n_trials and n_samples must be positive");
  ValidationRun run;
  run.traces.resize(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t trial) {
    Rng rng = make_rng(seed, trial);
    std::vector<ModeOccupation> samples;
    samples.reserve(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) samples.push_back(sampler(rng));
    run.traces[trial] = bayesian_confidence(samples, h0, ha, prior);
  });
  run.mean.assign(n_samples + 1, 0.0);
  for (const ConfidenceTrace& trace : run.traces) {
    for (std::size_t t = 0; t <= n_samples; ++t) run.mean[t] += trace.xi[t];
  }
  for (double& v : run.mean) v /= static_cast<double>(n_trials);
  run.density = density_grid(run.traces, t_bins, xi_bins);
  return run;
}

DistinguishabilityEstimate estimate_distinguishability(std::span<const ModeOccupation> samples,
                                                       const Interferometer& interf,
                                                       const ModeOccupation& occupation,
                                                       std::vector<double> x_grid) {
  if (x_grid.empty()) throw InvalidArgument("x grid is empty");
  for (double x : x_grid) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("x grid values must lie in [0, 1]");
  }
  // p_x(s) = sum_j x^j orders_j(s) / prod s!, so each distinct outcome needs
  // its interference orders only once.
  std::map<std::vector<int>, std::pair<std::vector<double>, std::size_t>> distinct;
  for (const ModeOccupation& s : samples) {
    auto [it, inserted] = distinct.try_emplace(s.counts());
    if (inserted) {
      const ComplexMatrix m = scattering_submatrix(interf.matrix(), occupation, s);
      std::vector<double> orders = interference_orders(m);
      const double norm = s.factorial_product();
      for (double& c : orders) c /= norm;
      it->second.first = std::move(orders);
    }
    ++it->second.second;
  }

  DistinguishabilityEstimate estimate;
  estimate.log_likelihood.assign(x_grid.size(), 0.0);
  for (std::size_t g = 0; g < x_grid.size(); ++g) {
    double total = 0.0;
    for (const auto& [counts, entry] : distinct) {
      const auto& [orders, multiplicity] = entry;
      double p = 0.0;
      for (std::size_t j = 0; j < orders.size(); ++j) p += std::pow(x_grid[g], static_cast<double>(j)) * orders[j];
      p = std::clamp(p, 0.0, 1.0);
      total += static_cast<double>(multiplicity) *
               (p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity());
    }
    estimate.log_likelihood[g] = total;
  }
  const auto best = std::max_element(estimate.log_likelihood.begin(), estimate.log_likelihood.end());
  estimate.x_hat = x_grid[static_cast<std::size_t>(best - estimate.log_likelihood.begin())];
  estimate.x_grid = std::move(x_grid);
  return estimate;
}

}  // namespace bsim
