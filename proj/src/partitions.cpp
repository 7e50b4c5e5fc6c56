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

#include "bsim/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bsim/errors.hpp"
#include "bsim/parallel.hpp"

namespace bsim {

namespace {

constexpr double kImagTolerance = 1e-10;

std::vector<int> grid_digits(std::uint64_t index, int base, int length) {
  std::vector<int> digits(static_cast<std::size_t>(length));
  for (int r = length - 1; r >= 0; --r) {
    digits[static_cast<std::size_t>(r)] = static_cast<int>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return digits;
}

}  // namespace

Complex characteristic_function(const Input& input, const Interferometer& interf,
                                const Partition& partition, std::span<const double> phases) {
  if (input.modes() != interf.modes() || partition.modes() != interf.modes()) {
    throw InvalidArgument("input, partition and interferometer mode counts differ");
  }
  if (static_cast<int>(phases.size()) != partition.size()) {
    throw InvalidArgument("phase vector length does not match the number of subsets");
  }
  const std::vector<int> occupied = input.occupation.photon_modes();
  const auto n = static_cast<Eigen::Index>(occupied.size());
  if (n == 0) return 1.0;
  const int m = interf.modes();

  Eigen::VectorXcd diagonal = Eigen::VectorXcd::Ones(m);
  for (int r = 0; r < partition.size(); ++r) {
    const Complex phase = std::polar(1.0, phases[static_cast<std::size_t>(r)]);
    for (int q : partition.subsets()[static_cast<std::size_t>(r)].members()) diagonal[q] = phase;
  }
  ComplexMatrix columns(m, n);
  for (Eigen::Index k = 0; k < n; ++k) columns.col(k) = interf.matrix().col(occupied[static_cast<std::size_t>(k)]);
  const ComplexMatrix g = columns.adjoint() * diagonal.asDiagonal() * columns;
  const GramMatrix gram = gram_of(input.model, static_cast<int>(n));
  return permanent_ryser(gram.matrix().cwiseProduct(g));
}

DistributionTable partition_counts_all(const Input& input, const Interferometer& interf,
                                       const Partition& partition, unsigned threads,
                                       std::uint64_t grid_limit) {
  const int n = input.photons();
  const int base = n + 1;
  const int r_count = partition.size();
  std::uint64_t points = 1;
  for (int r = 0; r < r_count; ++r) {
    points *= static_cast<std::uint64_t>(base);
    if (points > grid_limit) throw GuardExceeded("partition grid exceeds the feasibility guard");
  }

  std::vector<Complex> values(points);
  parallel_for(points, threads, [&](std::size_t i) {
    const std::vector<int> digits = grid_digits(i, base, r_count);
    std::vector<double> phases(digits.size());
    for (std::size_t r = 0; r < digits.size(); ++r) {
      phases[r] = 2.0 * std::numbers::pi * digits[r] / base;
    }
    values[i] = characteristic_function(input, interf, partition, phases);
  });

  DistributionTable table;
  table.outcomes.reserve(points);
  table.probs.resize(points);
  std::vector<std::vector<int>> grid(points);
  for (std::uint64_t i = 0; i < points; ++i) grid[i] = grid_digits(i, base, r_count);

  parallel_for(points, threads, [&](std::size_t k) {
    Complex sum = 0.0;
    for (std::uint64_t q = 0; q < points; ++q) {
      long long dot = 0;
      for (int r = 0; r < r_count; ++r) dot += static_cast<long long>(grid[q][static_cast<std::size_t>(r)]) * grid[k][static_cast<std::size_t>(r)];
      dot %= base;
      sum += values[q] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(dot) / base);
    }
    sum /= static_cast<double>(points);
    if (std::abs(sum.imag()) > kImagTolerance) {
      throw NumericError("partition probability has an imaginary residue above tolerance");
    }
    table.probs[k] = std::clamp(sum.real(), 0.0, 1.0);
  });
  for (std::uint64_t k = 0; k < points; ++k) table.outcomes.emplace_back(grid[k]);
  return table;
}

const DistributionTable& partition_counts_all(Event& event, unsigned threads) {
  const auto* meas = std::get_if<PartitionCountsAll>(&event.measurement);
  if (meas == nullptr) throw InvalidArgument("event measurement is not PartitionCountsAll");
  event.result = partition_counts_all(event.input, event.interferometer, meas->partition, threads);
  return std::get<DistributionTable>(event.result);
}

double full_bunching_probability(const Input& input, const Interferometer& interf,
                                 const Subset& subset) {
  const Partition partition({subset});
  const DistributionTable table = partition_counts_all(input, interf, partition);
  return table.probability_of(ModeOccupation({input.photons()}));
}

ModeOccupation bin_counts(const ModeOccupation& pattern, const Partition& partition) {
  if (pattern.modes() != partition.modes()) throw InvalidArgument("pattern and partition mode counts differ");
  std::vector<int> counts;
  counts.reserve(partition.subsets().size());
  for (const Subset& s : partition.subsets()) {
    int total = 0;
    for (int q : s.members()) total += pattern[q];
    counts.push_back(total);
  }
  return ModeOccupation(std::move(counts));
}

}  // namespace bsim
