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

#include "bsim/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "bsim/errors.hpp"
#include "bsim/parallel.hpp"

namespace bsim {

namespace {

int draw_weighted(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericError("sampling weights do not sum to a positive value");
  const double target = uniform01(rng) * total;
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    running += weights[i];
    if (target < running) return static_cast<int>(i);
  }
  // Rounding put the target past the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

void require_transmission(double transmission) {
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw InvalidArgument("transmission must lie in [0, 1]");
  }
}

void require_match(const Input& input, const Interferometer& interf) {
  if (input.modes() != interf.modes()) {
    throw InvalidArgument("input and interferometer mode counts differ");
  }
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double value = 1.0;
  for (int i = 1; i <= k; ++i) value = value * (n - k + i) / i;
  return value;
}

double derangements(int j) {
  // D_0 = 1, D_1 = 0, D_j = (j - 1)(D_{j-1} + D_{j-2})
  double previous = 1.0;
  double current = 0.0;
  if (j == 0) return previous;
  for (int i = 2; i <= j; ++i) {
    const double next = (i - 1) * (current + previous);
    previous = current;
    current = next;
  }
  return current;
}

// Marginal over the first `modes` entries of a 2m pattern.
std::vector<int> physical_counts(const ModeOccupation& pattern, int modes) {
  return {pattern.counts().begin(), pattern.counts().begin() + modes};
}

}  // namespace

void SamplerConfig::validate() const {
  if (burn_in < 0) throw InvalidArgument("burn_in must be nonnegative");
  if (thinning < 1) throw InvalidArgument("thinning must be at least 1");
  if (!(error > 0.0 && error < 1.0)) throw InvalidArgument("error must lie in (0, 1)");
  if (!(failure_probability > 0.0 && failure_probability < 1.0)) {
    throw InvalidArgument("failure_probability must lie in (0, 1)");
  }
  if (truncation_order && *truncation_order < 0) {
    throw InvalidArgument("truncation order must be nonnegative");
  }
  if (mis_samples < 1) throw InvalidArgument("mis_samples must be positive");
}

double interpolation_parameter(const DistinguishabilityModel& model) {
  if (std::holds_alternative<Bosonic>(model)) return 1.0;
  if (std::holds_alternative<Distinguishable>(model)) return 0.0;
  if (const auto* interp = std::get_if<OneParameterInterpolation>(&model)) return interp->x;
  throw InvalidArgument("operation requires a Bosonic, Distinguishable or interpolation model");
}

ModeOccupation sample_bosonic(const ComplexMatrix& u, const std::vector<int>& input_modes, Rng& rng) {
  const auto m = static_cast<int>(u.rows());
  const auto n = static_cast<int>(input_modes.size());
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  if (n == 0) return ModeOccupation(std::move(counts));

  // Photon order is randomized; the chain rule below is over that ordering.
  std::vector<int> order = input_modes;
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  ComplexMatrix columns(m, n);
  for (int k = 0; k < n; ++k) columns.col(k) = u.col(order[static_cast<std::size_t>(k)]);

  std::vector<int> placed;
  placed.reserve(static_cast<std::size_t>(n));
  std::vector<double> weights(static_cast<std::size_t>(m));
  for (int k = 1; k <= n; ++k) {
    // Partial scattering matrix: rows = modes already drawn, columns = first k photons.
    ComplexMatrix partial(k - 1, k);
    for (int r = 0; r < k - 1; ++r) {
      partial.row(r) = columns.row(placed[static_cast<std::size_t>(r)]).head(k);
    }
    const std::vector<Complex> minors = permanent_column_minors(partial);
    for (int q = 0; q < m; ++q) {
      Complex amplitude = 0.0;
      for (int l = 0; l < k; ++l) amplitude += columns(q, l) * minors[static_cast<std::size_t>(l)];
      weights[static_cast<std::size_t>(q)] = std::norm(amplitude);
    }
    placed.push_back(draw_weighted(weights, rng));
  }
  for (int q : placed) ++counts[static_cast<std::size_t>(q)];
  return ModeOccupation(std::move(counts));
}

ModeOccupation sample_bosonic(const Input& input, const Interferometer& interf, Rng& rng) {
  require_match(input, interf);
  if (!std::holds_alternative<Bosonic>(input.model)) {
    throw InvalidArgument("sample_bosonic requires a Bosonic input");
  }
  return sample_bosonic(interf.matrix(), input.occupation.photon_modes(), rng);
}

ModeOccupation sample_distinguishable(const ComplexMatrix& u, const std::vector<int>& input_modes,
                                      Rng& rng) {
  const auto m = static_cast<int>(u.rows());
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  std::vector<double> weights(static_cast<std::size_t>(m));
  for (int j : input_modes) {
    for (int q = 0; q < m; ++q) weights[static_cast<std::size_t>(q)] = std::norm(u(q, j));
    ++counts[static_cast<std::size_t>(draw_weighted(weights, rng))];
  }
  return ModeOccupation(std::move(counts));
}

ModeOccupation sample_distinguishable(const Input& input, const Interferometer& interf, Rng& rng) {
  require_match(input, interf);
  return sample_distinguishable(interf.matrix(), input.occupation.photon_modes(), rng);
}

ModeOccupation sample_noisy(const Input& input, const Interferometer& interf, double transmission,
                            Rng& rng) {
  require_match(input, interf);
  require_transmission(transmission);
  const double x = interpolation_parameter(input.model);
  std::vector<int> interfering;
  std::vector<int> independent;
  for (int j : input.occupation.photon_modes()) {
    if (!bernoulli(rng, transmission)) continue;
    if (bernoulli(rng, x)) {
      interfering.push_back(j);
    } else {
      independent.push_back(j);
    }
  }
  const ModeOccupation bosons = sample_bosonic(interf.matrix(), interfering, rng);
  const ModeOccupation singles = sample_distinguishable(interf.matrix(), independent, rng);
  std::vector<int> counts = bosons.counts();
  for (int q = 0; q < interf.modes(); ++q) counts[static_cast<std::size_t>(q)] += singles[q];
  return ModeOccupation(std::move(counts));
}

ModeOccupation sample_fock(const Input& input, const Interferometer& interf, Rng& rng,
                           double transmission) {
  require_transmission(transmission);
  if (transmission == 1.0) {
    if (std::holds_alternative<Bosonic>(input.model)) return sample_bosonic(input, interf, rng);
    if (std::holds_alternative<Distinguishable>(input.model)) {
      return sample_distinguishable(input, interf, rng);
    }
  }
  return sample_noisy(input, interf, transmission, rng);
}

ModeOccupation sample_dark_counts(const Input& input, const Interferometer& interf, double p,
                                  Rng& rng) {
  const DarkCountFockSample detector(p);
  std::vector<int> counts = sample_fock(input, interf, rng).counts();
  for (int& c : counts) c += bernoulli(rng, detector.p) ? 1 : 0;
  return ModeOccupation(std::move(counts));
}

ModeOccupation sample_dark_counts(Event& event, Rng& rng) {
  const auto* detector = std::get_if<DarkCountFockSample>(&event.measurement);
  if (detector == nullptr) throw InvalidArgument("event measurement is not DarkCountFockSample");
  ModeOccupation sample = sample_dark_counts(event.input, event.interferometer, detector->p, rng);
  event.result = sample;
  return sample;
}

std::vector<ModeOccupation> sample_batch(const Sampler& sampler, std::size_t count,
                                         std::uint64_t seed, unsigned threads) {
  std::vector<ModeOccupation> samples(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    samples[i] = sampler(rng);
  });
  return samples;
}

MisChain sample_mis(const PointwiseLaw& target, const Proposal& proposal, const SamplerConfig& cfg,
                    std::size_t count) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, 0x4d4953);
  MisChain chain;
  chain.samples.reserve(count);

  ModeOccupation state = proposal.draw(rng);
  double state_target = target(state);
  double state_proposal = proposal.law(state);
  if (!(state_proposal > 0.0)) throw NumericError("proposal assigns zero probability to a visited state");

  const std::size_t total_steps =
      static_cast<std::size_t>(cfg.burn_in) + count * static_cast<std::size_t>(cfg.thinning);
  for (std::size_t step = 1; step <= total_steps; ++step) {
    ModeOccupation candidate = proposal.draw(rng);
    const double candidate_target = target(candidate);
    const double candidate_proposal = proposal.law(candidate);
    if (!(candidate_proposal > 0.0)) {
      throw NumericError("proposal assigns zero probability to a visited state");
    }
    ++chain.proposed;
    // Acceptance min(1, t(y) q(x) / (t(x) q(y))), written without division.
    const double numerator = candidate_target * state_proposal;
    const double denominator = state_target * candidate_proposal;
    const double u = uniform01(rng);
    if (state_target <= 0.0 || u * denominator < numerator) {
      state = std::move(candidate);
      state_target = candidate_target;
      state_proposal = candidate_proposal;
      ++chain.accepted;
    }
    if (step > static_cast<std::size_t>(cfg.burn_in) &&
        (step - static_cast<std::size_t>(cfg.burn_in)) % static_cast<std::size_t>(cfg.thinning) == 0) {
      chain.samples.push_back(state);
    }
  }
  return chain;
}

DistributionTable empirical_table(const std::vector<ModeOccupation>& samples,
                                  std::vector<ModeOccupation> outcomes) {
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < outcomes.size(); ++i) index.emplace(outcomes[i].counts(), i);
  std::vector<double> counts(outcomes.size(), 0.0);
  for (const ModeOccupation& s : samples) {
    auto [it, inserted] = index.emplace(s.counts(), outcomes.size());
    if (inserted) {
      outcomes.push_back(s);
      counts.push_back(0.0);
    }
    counts[it->second] += 1.0;
  }
  DistributionTable table;
  table.outcomes = std::move(outcomes);
  table.probs.resize(counts.size());
  const double total = samples.empty() ? 1.0 : static_cast<double>(samples.size());
  for (std::size_t i = 0; i < counts.size(); ++i) table.probs[i] = counts[i] / total;
  return table;
}

std::vector<ModeOccupation> enumerate_lossy_patterns(int photons, int modes, std::uint64_t limit) {
  std::uint64_t total = 0;
  for (int k = 0; k <= photons; ++k) {
    total += pattern_count(k, modes);
    if (total > limit) throw GuardExceeded("output pattern count exceeds the enumeration guard");
  }
  std::vector<ModeOccupation> patterns;
  patterns.reserve(total);
  for (int k = photons; k >= 0; --k) {
    std::vector<ModeOccupation> block = enumerate_patterns(k, modes, limit);
    patterns.insert(patterns.end(), block.begin(), block.end());
  }
  return patterns;
}

double lossy_probability(const Input& input, const Interferometer& interf, double transmission,
                         const ModeOccupation& out) {
  require_match(input, interf);
  require_transmission(transmission);
  if (out.modes() != interf.modes()) throw InvalidArgument("output pattern has the wrong mode count");
  const std::vector<int> photon_modes = input.occupation.photon_modes();
  const auto n = static_cast<int>(photon_modes.size());
  const int k = out.photons();
  if (k > n) return 0.0;
  const double sector_weight = std::pow(transmission, k) * std::pow(1.0 - transmission, n - k);
  if (sector_weight == 0.0) return 0.0;

  // Walk all k-subsets of the photons.
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  std::fill(chosen.begin(), chosen.begin() + k, true);
  double total = 0.0;
  do {
    std::vector<int> photons;
    std::vector<int> counts(static_cast<std::size_t>(interf.modes()), 0);
    for (int p = 0; p < n; ++p) {
      if (chosen[static_cast<std::size_t>(p)]) {
        photons.push_back(p);
        counts[static_cast<std::size_t>(photon_modes[static_cast<std::size_t>(p)])] = 1;
      }
    }
    total += fock_probability(interf.matrix(), ModeOccupation(std::move(counts)), out,
                              restrict_model(input.model, photons));
  } while (std::prev_permutation(chosen.begin(), chosen.end()));
  return sector_weight * total;
}

double permutations_moving(int n, int j) { return binomial(n, j) * derangements(j); }

double truncation_tail_bound(int photons, double x, int order) {
  double bound = 0.0;
  for (int j = std::max(order + 1, 0); j <= photons; ++j) {
    bound += permutations_moving(photons, j) * std::pow(x, j);
  }
  return bound;
}

int select_truncation_order(int photons, double x, double error) {
  for (int order = 0; order < photons; ++order) {
    if (truncation_tail_bound(photons, x, order) <= error) return order;
  }
  return std::max(photons, 0);
}

NoisyDistribution noisy_distribution(const Input& input, double transmission,
                                     const Interferometer& interf, const SamplerConfig& cfg,
                                     unsigned threads) {
  require_match(input, interf);
  require_transmission(transmission);
  cfg.validate();
  const double x = interpolation_parameter(input.model);
  const int m = interf.modes();
  const int n = input.photons();

  NoisyDistribution result;
  const std::vector<ModeOccupation> outcomes = enumerate_lossy_patterns(n, m);

  // Exact and truncated tables through the 2m-mode dilation.
  const Interferometer dilated = to_lossy(interf, transmission);
  std::vector<int> padded = input.occupation.counts();
  padded.resize(static_cast<std::size_t>(2 * m), 0);
  const ModeOccupation dilated_input(std::move(padded));
  const std::vector<ModeOccupation> dilated_patterns = enumerate_patterns(n, 2 * m);

  result.truncation_order =
      cfg.truncation_order ? std::min(*cfg.truncation_order, n) : select_truncation_order(n, x, cfg.error);
  result.tail_bound = truncation_tail_bound(n, x, result.truncation_order);

  std::vector<double> exact_terms(dilated_patterns.size());
  std::vector<double> truncated_terms(dilated_patterns.size());
  const GramMatrix gram = GramMatrix::interpolation(n, x);
  parallel_for(dilated_patterns.size(), threads, [&](std::size_t i) {
    const ModeOccupation& pattern = dilated_patterns[i];
    const ComplexMatrix scattering = scattering_submatrix(dilated.matrix(), dilated_input, pattern);
    const double norm = pattern.factorial_product();
    exact_terms[i] = (n == 0 ? 1.0 : gram_permanent(scattering, gram)) / norm;
    const std::vector<double> orders = interference_orders(scattering);
    double truncated = 0.0;
    for (int j = 0; j <= result.truncation_order; ++j) {
      truncated += std::pow(x, j) * orders[static_cast<std::size_t>(j)];
    }
    truncated_terms[i] = truncated / norm;
  });

  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < outcomes.size(); ++i) index.emplace(outcomes[i].counts(), i);
  std::vector<double> exact(outcomes.size(), 0.0);
  std::vector<double> truncated(outcomes.size(), 0.0);
  for (std::size_t i = 0; i < dilated_patterns.size(); ++i) {
    const std::size_t slot = index.at(physical_counts(dilated_patterns[i], m));
    exact[slot] += exact_terms[i];
    truncated[slot] += truncated_terms[i];
  }
  for (double& p : exact) {
    if (p < -1e-12 || p > 1.0 + 1e-12) throw NumericError("exact noisy probability outside [0, 1]");
    p = std::clamp(p, 0.0, 1.0);
  }
  for (double& p : truncated) p = std::clamp(p, 0.0, 1.0);
  result.exact = DistributionTable{outcomes, std::move(exact)};
  result.truncated = DistributionTable{outcomes, std::move(truncated)};

  // MIS against the distinguishable law with the same loss. The target is
  // evaluated through the survivor-subset formula, not the dilation above.
  const Input proposal_input(input.occupation, Distinguishable{});
  std::map<std::vector<int>, double> target_cache;
  std::map<std::vector<int>, double> proposal_cache;
  const PointwiseLaw target = [&](const ModeOccupation& s) {
    auto it = target_cache.find(s.counts());
    if (it == target_cache.end()) {
      it = target_cache.emplace(s.counts(), lossy_probability(input, interf, transmission, s)).first;
    }
    return it->second;
  };
  const Proposal proposal{
      [&](Rng& rng) { return sample_noisy(proposal_input, interf, transmission, rng); },
      [&](const ModeOccupation& s) {
        auto it = proposal_cache.find(s.counts());
        if (it == proposal_cache.end()) {
          it = proposal_cache.emplace(s.counts(), lossy_probability(proposal_input, interf, transmission, s)).first;
        }
        return it->second;
      },
  };
  const MisChain chain = sample_mis(target, proposal, cfg, cfg.mis_samples);
  result.sampled = empirical_table(chain.samples, outcomes);
  result.mis_acceptance = chain.proposed == 0
                              ? 0.0
                              : static_cast<double>(chain.accepted) / static_cast<double>(chain.proposed);
  return result;
}

}  // namespace bsim
