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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bsim/errors.hpp"
#include "bsim/interferometers.hpp"
#include "bsim/partitions.hpp"
#include "oracles.hpp"

using bsim::Complex;
using bsim::Input;
using bsim::ModeOccupation;
using bsim::Partition;
using bsim::Subset;

namespace {

std::vector<bsim::DistinguishabilityModel> all_models(int n, bsim::Rng& rng) {
  return {bsim::Bosonic{}, bsim::Distinguishable{}, bsim::OneParameterInterpolation{0.37},
          bsim::UserGram{bsim::GramMatrix(oracle::random_gram(n, 2, rng))}};
}

// Random partition into `r` nonempty disjoint subsets; some modes may stay uncovered.
Partition random_partition(int m, int r, bsim::Rng& rng) {
  std::vector<int> modes(static_cast<std::size_t>(m));
  std::iota(modes.begin(), modes.end(), 0);
  for (int i = m - 1; i > 0; --i) {
    std::swap(modes[static_cast<std::size_t>(i)], modes[bsim::uniform_index(rng, static_cast<std::uint64_t>(i) + 1)]);
  }
  const int used = r + static_cast<int>(bsim::uniform_index(rng, static_cast<std::uint64_t>(m - r) + 1));
  std::vector<std::vector<int>> members(static_cast<std::size_t>(r));
  for (int i = 0; i < used; ++i) {
    const int slot = i < r ? i : static_cast<int>(bsim::uniform_index(rng, static_cast<std::uint64_t>(r)));
    members[static_cast<std::size_t>(slot)].push_back(modes[static_cast<std::size_t>(i)]);
  }
  std::vector<Subset> subsets;
  for (auto& s : members) subsets.emplace_back(m, s);
  return Partition(std::move(subsets));
}

std::vector<std::vector<int>> member_lists(const Partition& p) {
  std::vector<std::vector<int>> out;
  for (const auto& s : p.subsets()) out.push_back(s.members());
  return out;
}

}  // namespace

TEST_CASE("characteristic function basics") {
  auto rng = bsim::make_rng(301, 0);
  const auto u = bsim::rand_haar(5, 302);
  const Partition half({Subset(5, {0, 1})});
  for (const auto& model : all_models(3, rng)) {
    const double zero[] = {0.0};
    const Complex g = bsim::characteristic_function(Input(bsim::first_modes(3, 5), model), u, half, zero);
    CHECK(std::abs(g - 1.0) <= 1e-12);
  }
  const Input single(ModeOccupation({0, 0, 1, 0, 0}), bsim::Bosonic{});
  const double eta[] = {0.8};
  const Complex expected = (std::norm(u(0, 2)) + std::norm(u(1, 2))) * std::polar(1.0, 0.8) +
                           std::norm(u(2, 2)) + std::norm(u(3, 2)) + std::norm(u(4, 2));
  CHECK(std::abs(bsim::characteristic_function(single, u, half, eta) - expected) < 1e-14);
  const double two[] = {0.1, 0.2};
  CHECK_THROWS_AS(bsim::characteristic_function(single, u, half, two), bsim::InvalidArgument);
}

TEST_CASE("characteristic function matches the enumerated expectation") {
  auto rng = bsim::make_rng(311, 0);
  const auto u = bsim::rand_haar(5, 312);
  const Partition half({Subset(5, {0, 1})});
  for (const auto& model : all_models(3, rng)) {
    const Input input(bsim::first_modes(3, 5), model);
    const auto table = bsim::full_distribution(input, u);
    for (double eta : {0.3, 1.7, -2.2}) {
      Complex expected = 0.0;
      for (std::size_t i = 0; i < table.size(); ++i) {
        const int k = table.outcomes[i][0] + table.outcomes[i][1];
        expected += table.probs[i] * std::polar(1.0, eta * k);
      }
      const double phases[] = {eta};
      CHECK(std::abs(bsim::characteristic_function(input, u, half, phases) - expected) < 1e-12);
    }
  }
}

TEST_CASE("single covering subset conserves photons") {
  const auto u = bsim::rand_haar(4, 321);
  const Input input(bsim::first_modes(3, 4), bsim::OneParameterInterpolation{0.5});
  const auto table = bsim::partition_counts_all(input, u, Partition({Subset(4, {0, 1, 2, 3})}));
  REQUIRE(table.size() == 4);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double expected = table.outcomes[i][0] == 3 ? 1.0 : 0.0;
    CHECK(std::abs(table.probs[i] - expected) < 1e-12);
  }
  CHECK(bsim::full_bunching_probability(input, u, Subset(4, {0, 1, 2, 3})) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partition counts match the marginalized enumeration") {
  auto rng = bsim::make_rng(331, 0);
  std::uint64_t seed = 332;
  int cases = 0;
  for (int n = 1; n <= 4; ++n) {
    for (int m = n; m <= 8; ++m) {
      for (int r = 1; r <= std::min(3, m); ++r) {
        const auto u = bsim::rand_haar(m, ++seed);
        const Partition partition = random_partition(m, r, rng);
        for (const auto& model : all_models(n, rng)) {
          const Input input(bsim::first_modes(n, m), model);
          const auto table = bsim::partition_counts_all(input, u, partition);
          const auto marginal = oracle::marginalize(bsim::full_distribution(input, u), member_lists(partition));
          double total = 0.0;
          for (std::size_t i = 0; i < table.size(); ++i) {
            const auto it = marginal.find(table.outcomes[i].counts());
            const double expected = it == marginal.end() ? 0.0 : it->second;
            CHECK(std::abs(table.probs[i] - expected) <= 1e-10);
            total += table.probs[i];
          }
          CHECK(std::abs(total - 1.0) <= 1e-8);
          ++cases;
        }
      }
    }
  }
  CHECK(cases > 200);
}

TEST_CASE("HOM full bunching") {
  const bsim::Interferometer bs(bsim::beam_splitter(1.0 / std::numbers::sqrt2));
  const ModeOccupation in({1, 1});
  CHECK(bsim::full_bunching_probability(Input(in, bsim::Bosonic{}), bs, Subset(2, {0})) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bsim::full_bunching_probability(Input(in, bsim::Distinguishable{}), bs, Subset(2, {0})) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("bosons bunch at least as much as distinguishable photons") {
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    const int m = 5;
    const auto u = bsim::rand_haar(m, 400 + static_cast<std::uint64_t>(trial));
    const Subset subset(m, {0, 1});
    const auto in = bsim::first_modes(n, m);
    const double bos = bsim::full_bunching_probability(Input(in, bsim::Bosonic{}), u, subset);
    const double dis = bsim::full_bunching_probability(Input(in, bsim::Distinguishable{}), u, subset);
    if (bos < dis - 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("partition counts are thread-count independent") {
  const auto u = bsim::rand_haar(8, 341);
  const Input input(bsim::first_modes(4, 8), bsim::OneParameterInterpolation{0.6});
  const Partition p({Subset(8, {0, 1, 2}), Subset(8, {3, 4}), Subset(8, {6})});
  const auto one = bsim::partition_counts_all(input, u, p, 1);
  const auto many = bsim::partition_counts_all(input, u, p, 3);
  CHECK(one.probs == many.probs);
  CHECK(one.outcomes == many.outcomes);
}

TEST_CASE("partition event and guard") {
  const auto u = bsim::rand_haar(4, 351);
  bsim::Event ev(Input(bsim::first_modes(2, 4), bsim::Bosonic{}), bsim::PartitionCountsAll{Partition({Subset(4, {0})})}, u);
  const auto& table = bsim::partition_counts_all(ev);
  CHECK(table.size() == 3);
  CHECK(std::holds_alternative<bsim::DistributionTable>(ev.result));
  const Input big(bsim::first_modes(4, 8), bsim::Bosonic{});
  CHECK_THROWS_AS(bsim::partition_counts_all(big, bsim::rand_haar(8, 1),
                                             Partition({Subset(8, {0}), Subset(8, {1}), Subset(8, {2})}), 1, 100),
                  bsim::GuardExceeded);
  CHECK(bsim::bin_counts(ModeOccupation({1, 0, 2, 1}), Partition({Subset(4, {0, 2}), Subset(4, {3})})).counts() ==
        std::vector<int>{3, 1});
}
