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
#include <functional>
#include <optional>
#include <vector>

#include "bsim/model.hpp"
#include "bsim/rng.hpp"

namespace bsim {

struct SamplerConfig {
  std::uint64_t seed = 0;
  int burn_in = 100;
  int thinning = 10;
  /// Target max error of the truncated table.
  double error = 1e-4;
  double failure_probability = 1e-4;
  /// Overrides the automatic truncation order when set.
  std::optional<int> truncation_order;
  /// Kept MIS samples behind the sampled table.
  std::size_t mis_samples = 100'000;

  void validate() const;
};

/// Exact sampling of indistinguishable photons (Clifford & Clifford): photons
/// are placed one at a time, each conditional law coming from a Laplace
/// expansion over the column-deleted minors of the partial scattering matrix.
ModeOccupation sample_bosonic(const ComplexMatrix& u, const std::vector<int>& input_modes, Rng& rng);
ModeOccupation sample_bosonic(const Input& input, const Interferometer& interf, Rng& rng);

/// Each photon independently lands in mode q with probability |U(q, j)|^2.
ModeOccupation sample_distinguishable(const ComplexMatrix& u, const std::vector<int>& input_modes,
                                      Rng& rng);
ModeOccupation sample_distinguishable(const Input& input, const Interferometer& interf, Rng& rng);

/// Uniform loss and (1 - x) I + x J partial distinguishability. Each photon
/// survives with probability `transmission`; each survivor interferes with
/// probability x. Interfering photons are sampled jointly as bosons and the
/// rest as distinguishable particles. Bosonic and Distinguishable inputs are
/// accepted as x = 1 and x = 0.
ModeOccupation sample_noisy(const Input& input, const Interferometer& interf, double transmission,
                            Rng& rng);

/// FockSample dispatch on the input model; `transmission` < 1 routes through
/// sample_noisy.
ModeOccupation sample_fock(const Input& input, const Interferometer& interf, Rng& rng,
                           double transmission = 1.0);

/// Draws a FockSample and adds an independent Bernoulli(p) count on every mode.
ModeOccupation sample_dark_counts(const Input& input, const Interferometer& interf, double p,
                                  Rng& rng);
/// Requires a DarkCountFockSample event; stores and returns the sample.
ModeOccupation sample_dark_counts(Event& event, Rng& rng);

using Sampler = std::function<ModeOccupation(Rng&)>;
using PointwiseLaw = std::function<double(const ModeOccupation&)>;

/// Sample i is drawn from stream (seed, i), so the batch is the same for any
/// worker count.
std::vector<ModeOccupation> sample_batch(const Sampler& sampler, std::size_t count,
                                         std::uint64_t seed, unsigned threads = 1);

struct Proposal {
  Sampler draw;
  PointwiseLaw law;
};

struct MisChain {
  std::vector<ModeOccupation> samples;
  std::size_t proposed = 0;
  std::size_t accepted = 0;
};

/// Metropolis independence sampler. Discards cfg.burn_in steps, then keeps
/// every cfg.thinning-th state until `count` states are kept.
MisChain sample_mis(const PointwiseLaw& target, const Proposal& proposal, const SamplerConfig& cfg,
                    std::size_t count);

/// Empirical frequencies of `samples` over the listed outcomes. Samples not
/// in `outcomes` are appended.
DistributionTable empirical_table(const std::vector<ModeOccupation>& samples,
                                  std::vector<ModeOccupation> outcomes = {});

/// Output patterns of 0..n photons in m modes: n photons first, each block in
/// descending lexicographic order.
std::vector<ModeOccupation> enumerate_lossy_patterns(int photons, int modes,
                                                     std::uint64_t limit = 1'000'000);

/// Pointwise lossy law, summing over which photons survived:
/// p(s) = sum_{|T| = |s|} eta^|T| (1 - eta)^(n - |T|) P_T(s).
double lossy_probability(const Input& input, const Interferometer& interf, double transmission,
                         const ModeOccupation& out);

/// Number of permutations of n elements that move exactly j of them.
double permutations_moving(int n, int j);

/// Bound on the summed absolute error of all entries when interference orders
/// above `order` are dropped at distinguishability x:
/// sum_{j > order} C(n, j) D_j x^j, with D_j the derangement count.
double truncation_tail_bound(int photons, double x, int order);

/// Smallest order whose tail bound is at most `error`.
int select_truncation_order(int photons, double x, double error);

struct NoisyDistribution {
  DistributionTable exact;
  DistributionTable truncated;
  DistributionTable sampled;
  int truncation_order = 0;
  double tail_bound = 0.0;
  double mis_acceptance = 0.0;
};

/// Exact, truncated and MIS-reconstructed output laws under uniform loss and
/// partial distinguishability. The exact table marginalizes the environment
/// modes of to_lossy(interf, transmission).
NoisyDistribution noisy_distribution(const Input& input, double transmission,
                                     const Interferometer& interf, const SamplerConfig& cfg,
                                     unsigned threads = 1);

/// Interpolation parameter of a Bosonic / Distinguishable / interpolation model.
double interpolation_parameter(const DistinguishabilityModel& model);

}  // namespace bsim
