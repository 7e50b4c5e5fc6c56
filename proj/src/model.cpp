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

#include "bsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bsim/errors.hpp"
#include "bsim/parallel.hpp"

namespace bsim {

namespace {

constexpr double kProbabilitySlack = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double clamp_probability(double p) {
  if (!std::isfinite(p)) throw NumericError("probability is not finite");
  if (p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack) {
    throw NumericError("probability " + std::to_string(p) + " outside [0, 1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

ModeOccupation::ModeOccupation(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0) throw InvalidArgument("mode occupation counts must be nonnegative");
    photons_ += c;
  }
}

std::vector<int> ModeOccupation::photon_modes() const {
  std::vector<int> modes;
  modes.reserve(static_cast<std::size_t>(photons_));
  for (int q = 0; q < this->modes(); ++q) {
    for (int c = 0; c < counts_[static_cast<std::size_t>(q)]; ++c) modes.push_back(q);
  }
  return modes;
}

bool ModeOccupation::is_single_photon() const {
  return std::all_of(counts_.begin(), counts_.end(), [](int c) { return c <= 1; });
}

double ModeOccupation::factorial_product() const {
  double product = 1.0;
  for (int c : counts_) product *= std::tgamma(c + 1.0);
  return product;
}

std::string ModeOccupation::to_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t q = 0; q < counts_.size(); ++q) out << (q ? "," : "") << counts_[q];
  out << ']';
  return out.str();
}

ModeOccupation first_modes(int photons, int modes) {
  if (photons < 0 || modes < 0) throw InvalidArgument("first_modes: negative size");
  if (photons > modes) throw InvalidArgument("n exceeds m");
  std::vector<int> counts(static_cast<std::size_t>(modes), 0);
  std::fill_n(counts.begin(), photons, 1);
  return ModeOccupation(std::move(counts));
}

std::string model_name(const DistinguishabilityModel& model) {
  return std::visit(overloaded{
                        [](const Bosonic&) { return std::string("bosonic"); },
                        [](const Distinguishable&) { return std::string("distinguishable"); },
                        [](const OneParameterInterpolation&) { return std::string("interpolation"); },
                        [](const UserGram&) { return std::string("gram"); },
                    },
                    model);
}

GramMatrix gram_of(const DistinguishabilityModel& model, int photons) {
  if (photons < 1) throw InvalidArgument("gram_of: need at least one photon");
  return std::visit(overloaded{
                        [&](const Bosonic&) { return GramMatrix::ones(photons); },
                        [&](const Distinguishable&) { return GramMatrix::identity(photons); },
                        [&](const OneParameterInterpolation& m) {
                          return GramMatrix::interpolation(photons, m.x);
                        },
                        [&](const UserGram& m) {
                          if (m.gram.size() != photons) {
                            throw InvalidArgument("Gram matrix size does not match photon count");
                          }
                          return m.gram;
                        },
                    },
                    model);
}

DistinguishabilityModel restrict_model(const DistinguishabilityModel& model,
                                       const std::vector<int>& photons) {
  if (const auto* user = std::get_if<UserGram>(&model)) {
    return UserGram{user->gram.restricted(photons)};
  }
  return model;
}

Input::Input(ModeOccupation occ, DistinguishabilityModel mdl)
    : occupation(std::move(occ)), model(std::move(mdl)) {
  if (!occupation.is_single_photon()) {
    throw InvalidArgument("input must have at most one photon per mode");
  }
  if (const auto* interp = std::get_if<OneParameterInterpolation>(&model)) {
    if (!(interp->x >= 0.0 && interp->x <= 1.0)) {
      throw InvalidArgument("interpolation parameter must lie in [0, 1]");
    }
  }
  if (const auto* user = std::get_if<UserGram>(&model)) {
    if (user->gram.size() != occupation.photons()) {
      throw InvalidArgument("Gram matrix size does not match photon count");
    }
  }
}

Subset::Subset(int modes, std::vector<int> members)
    : membership_(static_cast<std::size_t>(std::max(modes, 0)), false) {
  if (modes < 1) throw InvalidArgument("subset needs at least one mode");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty()) throw InvalidArgument("subset must select at least one mode");
  for (int q : members) {
    if (q < 0 || q >= modes) throw InvalidArgument("subset mode index out of range");
    membership_[static_cast<std::size_t>(q)] = true;
  }
  members_ = std::move(members);
}

Subset Subset::from_occupation(const ModeOccupation& occupation) {
  std::vector<int> members;
  for (int q = 0; q < occupation.modes(); ++q) {
    if (occupation[q] > 0) members.push_back(q);
  }
  return Subset(occupation.modes(), std::move(members));
}

Partition::Partition(std::vector<Subset> subsets) : subsets_(std::move(subsets)) {
  if (subsets_.empty()) throw InvalidArgument("partition needs at least one subset");
  const int m = subsets_.front().modes();
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (const Subset& s : subsets_) {
    if (s.modes() != m) throw InvalidArgument("partition subsets disagree on mode count");
    for (int q : s.members()) {
      if (used[static_cast<std::size_t>(q)]) throw InvalidArgument("partition subsets overlap");
      used[static_cast<std::size_t>(q)] = true;
    }
  }
}

bool Partition::covers_all_modes() const {
  int covered = 0;
  for (const Subset& s : subsets_) covered += static_cast<int>(s.members().size());
  return covered == modes();
}

DarkCountFockSample::DarkCountFockSample(double probability) : p(probability) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("invalid probability");
}

double DistributionTable::total() const {
  double sum = 0.0;
  for (double p : probs) sum += p;
  return sum;
}

double DistributionTable::probability_of(const ModeOccupation& outcome) const {
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i] == outcome) return probs[i];
  }
  return 0.0;
}

Event::Event(Input in, Measurement meas, Interferometer interf)
    : input(std::move(in)), measurement(std::move(meas)), interferometer(std::move(interf)) {
  const int m = interferometer.modes();
  if (input.modes() != m) throw InvalidArgument("input and interferometer mode counts differ");
  if (const auto* fock = std::get_if<FockDetection>(&measurement)) {
    if (fock->output.modes() != m) {
      throw InvalidArgument("detected pattern and interferometer mode counts differ");
    }
    if (fock->output.photons() > input.photons()) {
      throw InvalidArgument("detected pattern has more photons than the input");
    }
  }
  if (const auto* part = std::get_if<PartitionCountsAll>(&measurement)) {
    if (part->partition.modes() != m) {
      throw InvalidArgument("partition and interferometer mode counts differ");
    }
  }
}

ComplexMatrix scattering_submatrix(const ComplexMatrix& u, const ModeOccupation& in,
                                   const ModeOccupation& out) {
  if (in.photons() != out.photons()) {
    throw InvalidArgument("inconsistent photon totals between input and output");
  }
  if (in.modes() != u.cols() || out.modes() != u.rows()) {
    throw InvalidArgument("occupation and unitary mode counts differ");
  }
  const std::vector<int> in_modes = in.photon_modes();
  const std::vector<int> out_modes = out.photon_modes();
  const auto n = static_cast<Eigen::Index>(in_modes.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) m(k, l) = u(out_modes[l], in_modes[k]);
  }
  return m;
}

double fock_probability(const ComplexMatrix& u, const ModeOccupation& in, const ModeOccupation& out,
                        const DistinguishabilityModel& model) {
  if (!in.is_single_photon()) throw InvalidArgument("input must have at most one photon per mode");
  const ComplexMatrix m = scattering_submatrix(u, in, out);
  if (m.rows() == 0) return 1.0;
  const double weight = std::visit(
      overloaded{
          [&](const Bosonic&) { return std::norm(permanent_ryser(m)); },
          [&](const Distinguishable&) {
            return permanent_ryser(abs2(m).cast<Complex>()).real();
          },
          [&](const OneParameterInterpolation& interp) {
            return gram_permanent(m, GramMatrix::interpolation(m.rows(), interp.x));
          },
          [&](const UserGram& user) {
            if (user.gram.size() != m.rows()) {
              throw InvalidArgument("Gram matrix size does not match photon count");
            }
            return gram_permanent(m, user.gram);
          },
      },
      model);
  return clamp_probability(weight / out.factorial_product());
}

double compute_probability_fock(const Input& input, const Interferometer& interf,
                                const ModeOccupation& out) {
  if (input.modes() != interf.modes() || out.modes() != interf.modes()) {
    throw InvalidArgument("mode counts of input, output and interferometer differ");
  }
  return fock_probability(interf.matrix(), input.occupation, out, input.model);
}

double compute_probability_fock(Event& event) {
  const auto* fock = std::get_if<FockDetection>(&event.measurement);
  if (fock == nullptr) throw InvalidArgument("event measurement is not FockDetection");
  const double p = compute_probability_fock(event.input, event.interferometer, fock->output);
  event.result = p;
  return p;
}

std::uint64_t pattern_count(int photons, int modes) {
  if (photons < 0 || modes < 1) return photons == 0 ? 1 : 0;
  // C(n + m - 1, n) computed incrementally; each prefix is itself a binomial.
  unsigned __int128 value = 1;
  for (int i = 1; i <= photons; ++i) {
    value = value * static_cast<unsigned>(modes - 1 + i) / static_cast<unsigned>(i);
    if (value > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(value);
}

std::vector<ModeOccupation> enumerate_patterns(int photons, int modes, std::uint64_t limit) {
  if (photons < 0 || modes < 1) throw InvalidArgument("enumerate_patterns: invalid sizes");
  if (pattern_count(photons, modes) > limit) {
    throw GuardExceeded("output pattern count exceeds the enumeration guard");
  }
  std::vector<ModeOccupation> patterns;
  patterns.reserve(pattern_count(photons, modes));
  std::vector<int> counts(static_cast<std::size_t>(modes), 0);
  counts[0] = photons;
  while (true) {
    patterns.emplace_back(counts);
    // Next composition in descending lexicographic order: find the rightmost
    // nonzero entry before the last slot, move one photon right and gather the
    // tail behind it.
    int pivot = modes - 2;
    while (pivot >= 0 && counts[static_cast<std::size_t>(pivot)] == 0) --pivot;
    if (pivot < 0) break;
    const int tail = counts[static_cast<std::size_t>(modes - 1)];
    counts[static_cast<std::size_t>(modes - 1)] = 0;
    counts[static_cast<std::size_t>(pivot)] -= 1;
    counts[static_cast<std::size_t>(pivot + 1)] = tail + 1;
  }
  return patterns;
}

DistributionTable full_distribution(const Input& input, const Interferometer& interf,
                                    unsigned threads) {
  if (input.modes() != interf.modes()) {
    throw InvalidArgument("input and interferometer mode counts differ");
  }
  DistributionTable table;
  table.outcomes = enumerate_patterns(input.photons(), interf.modes());
  table.probs.resize(table.outcomes.size());
  parallel_for(table.outcomes.size(), threads, [&](std::size_t i) {
    table.probs[i] = fock_probability(interf.matrix(), input.occupation, table.outcomes[i], input.model);
  });
  return table;
}

}  // namespace bsim
