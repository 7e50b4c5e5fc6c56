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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bsim/interferometers.hpp"
#include "bsim/permanents.hpp"

namespace bsim {

/// Photon counts per optical mode.
class ModeOccupation {
 public:
  ModeOccupation() = default;
  explicit ModeOccupation(std::vector<int> counts);

  int modes() const { return static_cast<int>(counts_.size()); }
  int photons() const { return photons_; }
  const std::vector<int>& counts() const { return counts_; }
  int operator[](int mode) const { return counts_[static_cast<std::size_t>(mode)]; }

  /// One entry per photon: the mode it occupies, in increasing mode order.
  std::vector<int> photon_modes() const;
  /// True when every mode holds at most one photon.
  bool is_single_photon() const;
  /// prod_q counts[q]!
  double factorial_product() const;

  std::string to_string() const;

  friend bool operator==(const ModeOccupation& a, const ModeOccupation& b) {
    return a.counts_ == b.counts_;
  }
  friend auto operator<=>(const ModeOccupation& a, const ModeOccupation& b) {
    return a.counts_ <=> b.counts_;
  }

 private:
  std::vector<int> counts_;
  int photons_ = 0;
};

/// n photons in the first n of m modes.
ModeOccupation first_modes(int photons, int modes);

struct Bosonic {};
struct Distinguishable {};
struct OneParameterInterpolation {
  double x;
};
struct UserGram {
  GramMatrix gram;
};

using DistinguishabilityModel =
    std::variant<Bosonic, Distinguishable, OneParameterInterpolation, UserGram>;

std::string model_name(const DistinguishabilityModel& model);

/// Bosonic -> J, Distinguishable -> I, interpolation(x) -> (1-x) I + x J,
/// UserGram -> itself (size must equal n).
GramMatrix gram_of(const DistinguishabilityModel& model, int photons);

/// The same model acting on a subset of the photons.
DistinguishabilityModel restrict_model(const DistinguishabilityModel& model,
                                       const std::vector<int>& photons);

/// A Fock input state with at most one photon per mode.
struct Input {
  Input(ModeOccupation occupation, DistinguishabilityModel model);

  int modes() const { return occupation.modes(); }
  int photons() const { return occupation.photons(); }

  ModeOccupation occupation;
  DistinguishabilityModel model;
};

/// A set of output modes.
class Subset {
 public:
  Subset(int modes, std::vector<int> members);
  /// Modes with a nonzero count in `occupation`.
  static Subset from_occupation(const ModeOccupation& occupation);

  int modes() const { return static_cast<int>(membership_.size()); }
  bool contains(int mode) const { return membership_[static_cast<std::size_t>(mode)]; }
  const std::vector<int>& members() const { return members_; }

 private:
  std::vector<bool> membership_;
  std::vector<int> members_;
};

/// Pairwise-disjoint subsets of the output modes. Modes outside every subset
/// form an untracked remainder bin.
class Partition {
 public:
  explicit Partition(std::vector<Subset> subsets);

  int modes() const { return subsets_.front().modes(); }
  int size() const { return static_cast<int>(subsets_.size()); }
  const std::vector<Subset>& subsets() const { return subsets_; }
  bool covers_all_modes() const;

 private:
  std::vector<Subset> subsets_;
};

struct FockDetection {
  ModeOccupation output;
};
struct FockSample {};
struct PartitionCountsAll {
  Partition partition;
};
struct DarkCountFockSample {
  explicit DarkCountFockSample(double p);
  double p;
};

using Measurement = std::variant<FockDetection, FockSample, PartitionCountsAll, DarkCountFockSample>;

/// Outcomes with their probabilities.
struct DistributionTable {
  std::vector<ModeOccupation> outcomes;
  std::vector<double> probs;

  std::size_t size() const { return outcomes.size(); }
  double total() const;
  /// Probability of `outcome`, or 0 if it is not listed.
  double probability_of(const ModeOccupation& outcome) const;
};

using EventResult = std::variant<std::monostate, double, ModeOccupation, DistributionTable>;

/// Container tying an input, a measurement and an interferometer together.
struct Event {
  Event(Input input, Measurement measurement, Interferometer interferometer);

  Input input;
  Measurement measurement;
  Interferometer interferometer;
  EventResult result;
};

/// n x n matrix M(k, l) = U(mode of output photon l, mode of input photon k).
ComplexMatrix scattering_submatrix(const ComplexMatrix& u, const ModeOccupation& in,
                                   const ModeOccupation& out);

/// Probability of detecting `out` given single-photon input `in` through `u`.
double fock_probability(const ComplexMatrix& u, const ModeOccupation& in,
                        const ModeOccupation& out, const DistinguishabilityModel& model);

double compute_probability_fock(const Input& input, const Interferometer& interf,
                                const ModeOccupation& out);

/// Requires a FockDetection event; stores and returns the probability.
double compute_probability_fock(Event& event);

/// C(n + m - 1, n), saturating at UINT64_MAX.
std::uint64_t pattern_count(int photons, int modes);

/// Every output pattern of `photons` photons in `modes` modes, in descending
/// lexicographic order ((n,0,..,0) first). Refuses more than `limit` patterns.
std::vector<ModeOccupation> enumerate_patterns(int photons, int modes,
                                               std::uint64_t limit = 1'000'000);

/// Exact output law. Outcomes are evaluated independently, so the table does
/// not depend on `threads`.
DistributionTable full_distribution(const Input& input, const Interferometer& interf,
                                    unsigned threads = 1);

}  // namespace bsim
