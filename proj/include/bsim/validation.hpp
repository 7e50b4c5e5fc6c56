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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bsim/model.hpp"
#include "bsim/samplers.hpp"

namespace bsim {

/// A named law over observed outcomes.
struct Hypothesis {
  std::string label;
  PointwiseLaw law;
};

/// Fock-pattern law of `input` through `interf` (outcomes are full mode patterns).
Hypothesis fock_hypothesis(std::string label, const Input& input, const Interferometer& interf);

/// Binned law: an outcome is scored by the probability of its subset counts.
/// The partition table is computed once up front.
Hypothesis partition_hypothesis(std::string label, const Input& input, const Interferometer& interf,
                                const Partition& partition);

/// Posterior probability of the null hypothesis after each sample.
struct ConfidenceTrace {
  std::vector<double> xi;  // xi[0] is the prior

  /// First t with xi[t] >= threshold.
  std::optional<std::size_t> first_at_or_above(double threshold) const;
  /// First t with xi[t] <= threshold.
  std::optional<std::size_t> first_at_or_below(double threshold) const;
};

/// Sequential Bayesian update of the confidence in h0 against ha.
///
/// Log-likelihoods are accumulated, so long traces do not underflow. An
/// outcome impossible under exactly one hypothesis pins xi to 0 or 1 for the
/// rest of the trace; an outcome impossible under both is an error.
ConfidenceTrace bayesian_confidence(std::span<const ModeOccupation> samples, const Hypothesis& h0,
                                    const Hypothesis& ha, double prior);

/// Counts of (t, xi) pairs over a regular grid.
struct DensityGrid {
  int t_bins = 0;
  int xi_bins = 0;
  std::size_t max_t = 0;
  std::vector<std::size_t> counts;  // row-major, t_bin * xi_bins + xi_bin

  std::size_t at(int t_bin, int xi_bin) const {
    return counts[static_cast<std::size_t>(t_bin) * static_cast<std::size_t>(xi_bins) +
                  static_cast<std::size_t>(xi_bin)];
  }
};

DensityGrid density_grid(const std::vector<ConfidenceTrace>& traces, int t_bins = 50,
                         int xi_bins = 50);

struct ValidationRun {
  std::vector<ConfidenceTrace> traces;
  std::vector<double> mean;
  DensityGrid density;
};

/// n_trials independent runs; trial i draws its samples from stream (seed, i).
ValidationRun run_validation_trials(std::size_t n_trials, std::size_t n_samples,
                                    const Sampler& sampler, const Hypothesis& h0,
                                    const Hypothesis& ha, double prior, std::uint64_t seed,
                                    unsigned threads = 1, int t_bins = 50, int xi_bins = 50);

struct DistinguishabilityEstimate {
  double x_hat = 0.0;
  std::vector<double> x_grid;
  std::vector<double> log_likelihood;
};

/// Grid maximum-likelihood estimate of the interpolation parameter x. Ties go
/// to the first grid point.
DistinguishabilityEstimate estimate_distinguishability(std::span<const ModeOccupation> samples,
                                                       const Interferometer& interf,
                                                       const ModeOccupation& occupation,
                                                       std::vector<double> x_grid);

}  // namespace bsim
