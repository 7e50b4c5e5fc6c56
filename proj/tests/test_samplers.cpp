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
#include "bsim/samplers.hpp"
#include "oracles.hpp"

using bsim::Input;
using bsim::ModeOccupation;
using bsim::Rng;
using bsim::ComplexMatrix;

namespace {

constexpr std::size_t kDraws = 100000;

std::vector<ModeOccupation> draw(const Input& input, const bsim::Interferometer& u, std::uint64_t seed,
                                 std::size_t count = kDraws, double eta = 1.0, unsigned threads = 1) {
  return bsim::sample_batch([&](Rng& rng) { return bsim::sample_fock(input, u, rng, eta); }, count, seed,
                            threads);
}

}  // namespace

TEST_CASE("single photon law") {
  const auto u = bsim::rand_haar(5, 201);
  const Input input(ModeOccupation({0, 1, 0, 0, 0}), bsim::Bosonic{});
  for (bool bosonic : {true, false}) {
    const auto samples = bsim::sample_batch(
        [&](Rng& rng) {
          return bosonic ? bsim::sample_bosonic(input, u, rng) : bsim::sample_distinguishable(input, u, rng);
        },
        kDraws, 202);
    std::vector<double> observed(5, 0.0);
    for (const auto& s : samples) {
      for (int q = 0; q < 5; ++q) observed[static_cast<std::size_t>(q)] += s[q];
    }
    double chi2 = 0.0;
    for (int q = 0; q < 5; ++q) {
      const double expected = kDraws * std::norm(u(q, 1));
      chi2 += std::pow(observed[static_cast<std::size_t>(q)] - expected, 2) / expected;
    }
    CHECK(chi2 < 13.28);  // 99th percentile of chi-square with 4 degrees of freedom
  }
}

TEST_CASE("bosonic sampler matches enumeration") {
  const auto u = bsim::rand_haar(5, 211);
  const Input input(bsim::first_modes(3, 5), bsim::Bosonic{});
  const auto exact = oracle::as_map(bsim::full_distribution(input, u));
  CHECK(oracle::tvd(oracle::frequencies(draw(input, u, 212)), exact) < 0.02);
  // Non-contiguous input modes.
  const Input spread(ModeOccupation({1, 0, 1, 0, 1}), bsim::Bosonic{});
  CHECK(oracle::tvd(oracle::frequencies(draw(spread, u, 213)), oracle::as_map(bsim::full_distribution(spread, u))) <
        0.02);
}

TEST_CASE("distinguishable sampler") {
  const bsim::Interferometer bs(bsim::beam_splitter(1.0 / std::numbers::sqrt2));
  const Input hom(ModeOccupation({1, 1}), bsim::Distinguishable{});
  const auto samples = draw(hom, bs, 221);
  double coincidences = 0.0;
  for (const auto& s : samples) coincidences += (s[0] == 1) ? 1.0 : 0.0;
  const double freq = coincidences / kDraws;
  CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(0.25 / kDraws));

  const auto u = bsim::rand_haar(5, 222);
  const Input input(bsim::first_modes(3, 5), bsim::Distinguishable{});
  CHECK(oracle::tvd(oracle::frequencies(draw(input, u, 223)), oracle::as_map(bsim::full_distribution(input, u))) <
        0.02);
}

TEST_CASE("noisy sampler limits and law") {
  const auto u = bsim::rand_haar(5, 231);
  const auto in = bsim::first_modes(3, 5);
  const Input one(in, bsim::OneParameterInterpolation{1.0});
  const Input zero(in, bsim::OneParameterInterpolation{0.0});
  auto rng = bsim::make_rng(232, 0);
  for (int i = 0; i < 100; ++i) CHECK(bsim::sample_noisy(one, u, 0.0, rng).photons() == 0);
  const auto noisy_one = bsim::sample_batch([&](Rng& r) { return bsim::sample_noisy(one, u, 1.0, r); }, kDraws, 233);
  CHECK(oracle::tvd(oracle::frequencies(noisy_one),
                    oracle::as_map(bsim::full_distribution(Input(in, bsim::Bosonic{}), u))) < 0.02);
  const auto noisy_zero = bsim::sample_batch([&](Rng& r) { return bsim::sample_noisy(zero, u, 1.0, r); }, kDraws, 234);
  CHECK(oracle::tvd(oracle::frequencies(noisy_zero),
                    oracle::as_map(bsim::full_distribution(Input(in, bsim::Distinguishable{}), u))) < 0.02);

  // Partial distinguishability with loss against the survivor-subset law.
  const Input partial(in, bsim::OneParameterInterpolation{0.74});
  const auto samples = bsim::sample_batch([&](Rng& r) { return bsim::sample_noisy(partial, u, 0.63, r); }, kDraws, 235);
  std::map<std::vector<int>, double> law;
  for (const auto& out : bsim::enumerate_lossy_patterns(3, 5)) {
    law[out.counts()] = bsim::lossy_probability(partial, u, 0.63, out);
  }
  CHECK(oracle::tvd(oracle::frequencies(samples), law) < 0.02);
}

TEST_CASE("loss thinning") {
  const auto u = bsim::rand_haar(6, 241);
  const Input input(bsim::first_modes(4, 6), bsim::OneParameterInterpolation{0.5});
  const double eta = 0.63;
  const std::size_t count = 10000;
  const auto samples = draw(input, u, 242, count, eta);
  double mean = 0.0;
  for (const auto& s : samples) mean += s.photons();
  mean /= count;
  CHECK(std::abs(mean - eta * 4) < 3.0 * std::sqrt(4 * eta * (1 - eta) / count));
}

TEST_CASE("dark counts") {
  const auto u = bsim::rand_haar(10, 251);
  const Input input(bsim::first_modes(10, 10), bsim::Distinguishable{});
  const std::size_t count = 10000;
  const auto noisy = bsim::sample_batch([&](Rng& r) { return bsim::sample_dark_counts(input, u, 0.1, r); }, count, 252);
  double mean = 0.0;
  for (const auto& s : noisy) mean += s.photons();
  mean /= count;
  CHECK(std::abs(mean - 11.0) < 3.0 * std::sqrt(10 * 0.1 * 0.9 / count));

  const auto clean = bsim::sample_batch([&](Rng& r) { return bsim::sample_dark_counts(input, u, 0.0, r); }, 500, 253);
  const auto plain = bsim::sample_batch([&](Rng& r) { return bsim::sample_fock(input, u, r); }, 500, 253);
  CHECK(clean == plain);

  const auto saturated = bsim::sample_batch([&](Rng& r) { return bsim::sample_dark_counts(input, u, 1.0, r); }, 200, 254);
  for (const auto& s : saturated) {
    for (int q = 0; q < 10; ++q) CHECK(s[q] >= 1);
  }

  bsim::Event ev(input, bsim::DarkCountFockSample(0.2), u);
  Rng rng = bsim::make_rng(255, 0);
  const auto sample = bsim::sample_dark_counts(ev, rng);
  CHECK(std::get<ModeOccupation>(ev.result) == sample);
  CHECK_THROWS_WITH_AS(bsim::sample_dark_counts(input, u, -0.1, rng), "invalid probability", bsim::InvalidArgument);
}

TEST_CASE("large bosonic draw completes") {
  const auto u = bsim::rand_haar(400, 261);
  const Input input(bsim::first_modes(20, 400), bsim::Bosonic{});
  Rng rng = bsim::make_rng(262, 0);
  const auto s = bsim::sample_bosonic(input, u, rng);
  CHECK(s.photons() == 20);
  CHECK(s.modes() == 400);
}

TEST_CASE("sampler determinism and thread independence") {
  const auto u = bsim::rand_haar(5, 271);
  for (const bsim::DistinguishabilityModel& model :
       {bsim::DistinguishabilityModel{bsim::Bosonic{}}, bsim::DistinguishabilityModel{bsim::Distinguishable{}},
        bsim::DistinguishabilityModel{bsim::OneParameterInterpolation{0.3}}}) {
    const Input input(bsim::first_modes(3, 5), model);
    const auto a = draw(input, u, 272, 2000, 0.8, 1);
    CHECK(a == draw(input, u, 272, 2000, 0.8, 1));
    CHECK(a == draw(input, u, 272, 2000, 0.8, 3));
    CHECK(a != draw(input, u, 273, 2000, 0.8, 1));
  }
  Rng rng = bsim::make_rng(274, 0);
  CHECK_THROWS_AS(bsim::sample_bosonic(Input(bsim::first_modes(2, 5), bsim::Distinguishable{}), u, rng),
                  bsim::InvalidArgument);
}

TEST_CASE("metropolis independence sampler") {
  bsim::SamplerConfig cfg;
  cfg.seed = 281;
  const ModeOccupation a({1, 0});
  const ModeOccupation b({0, 1});
  const auto uniform = bsim::Proposal{[&](Rng& rng) { return bsim::bernoulli(rng, 0.5) ? a : b; },
                                      [](const ModeOccupation&) { return 0.5; }};

  const auto same = bsim::sample_mis([](const ModeOccupation&) { return 0.5; }, uniform, cfg, 1000);
  CHECK(same.accepted == same.proposed);
  CHECK(same.samples.size() == 1000);

  const std::size_t kept = 100000;
  const auto chain =
      bsim::sample_mis([&](const ModeOccupation& s) { return s == a ? 0.3 : 0.7; }, uniform, cfg, kept);
  double freq = 0.0;
  for (const auto& s : chain.samples) freq += (s == a) ? 1.0 : 0.0;
  freq /= kept;
  // Thinned chain is close to independent; allow 3 sigma of the iid estimate.
  CHECK(std::abs(freq - 0.3) < 3.0 * std::sqrt(0.21 / kept));

  const auto zero = bsim::Proposal{[&](Rng&) { return a; }, [](const ModeOccupation&) { return 0.0; }};
  CHECK_THROWS_AS(bsim::sample_mis([](const ModeOccupation&) { return 1.0; }, zero, cfg, 10), bsim::NumericError);
  cfg.thinning = 0;
  CHECK_THROWS_AS(bsim::sample_mis([](const ModeOccupation&) { return 1.0; }, uniform, cfg, 10),
                  bsim::InvalidArgument);
}

TEST_CASE("truncation bound") {
  CHECK(bsim::permutations_moving(3, 0) == 1.0);
  CHECK(bsim::permutations_moving(3, 1) == 0.0);
  CHECK(bsim::permutations_moving(3, 2) == 3.0);
  CHECK(bsim::permutations_moving(3, 3) == 2.0);
  CHECK(bsim::permutations_moving(4, 4) == 9.0);
  CHECK(bsim::truncation_tail_bound(3, 0.5, 3) == 0.0);
  CHECK(bsim::truncation_tail_bound(3, 0.5, 1) == doctest::Approx(3 * 0.25 + 2 * 0.125));
  CHECK(bsim::select_truncation_order(3, 0.0, 1e-4) == 0);
  CHECK(bsim::select_truncation_order(3, 0.74, 1e-4) == 3);
  CHECK(bsim::select_truncation_order(8, 1e-3, 1e-4) == 0);
  CHECK(bsim::select_truncation_order(8, 1e-2, 1e-4) == 3);
}

TEST_CASE("noisy distribution tables") {
  const auto u = bsim::rand_haar(5, 291);
  const auto in = bsim::first_modes(3, 5);
  bsim::SamplerConfig cfg;
  cfg.seed = 292;
  cfg.mis_samples = 2000;

  SUBCASE("ideal limit matches full distribution") {
    const auto result = bsim::noisy_distribution(Input(in, bsim::OneParameterInterpolation{1.0}), 1.0, u, cfg);
    const auto full = bsim::full_distribution(Input(in, bsim::Bosonic{}), u);
    for (std::size_t i = 0; i < result.exact.size(); ++i) {
      CHECK(std::abs(result.exact.probs[i] - full.probability_of(result.exact.outcomes[i])) <= 1e-10);
    }
  }

  SUBCASE("two exact routes agree and truncation is bounded") {
    const Input input(in, bsim::OneParameterInterpolation{0.74});
    for (int order = 0; order <= 3; ++order) {
      cfg.truncation_order = order;
      const auto result = bsim::noisy_distribution(input, 0.63, u, cfg);
      CHECK(std::abs(result.exact.total() - 1.0) <= 1e-8);
      CHECK(result.truncation_order == order);
      double l1 = 0.0;
      for (std::size_t i = 0; i < result.exact.size(); ++i) {
        const double pointwise = bsim::lossy_probability(input, u, 0.63, result.exact.outcomes[i]);
        CHECK(std::abs(result.exact.probs[i] - pointwise) <= 1e-12);
        l1 += std::abs(result.truncated.probs[i] - result.exact.probs[i]);
      }
      CHECK(l1 <= result.tail_bound + 1e-12);
      if (order == 3) CHECK(l1 <= 1e-12 * static_cast<double>(result.exact.size()));
    }
  }

  SUBCASE("outcomes cover every loss sector") {
    const auto result = bsim::noisy_distribution(Input(in, bsim::OneParameterInterpolation{0.5}), 0.5, u, cfg);
    std::uint64_t expected = 0;
    for (int k = 0; k <= 3; ++k) expected += bsim::pattern_count(k, 5);
    CHECK(result.exact.size() == expected);
    CHECK(result.sampled.size() == expected);
    CHECK(std::abs(result.sampled.total() - 1.0) < 1e-12);
    CHECK(result.mis_acceptance > 0.0);
  }

  SUBCASE("requires an interpolation-compatible model") {
    ComplexMatrix s = ComplexMatrix::Identity(3, 3);
    CHECK_THROWS_AS(bsim::noisy_distribution(Input(in, bsim::UserGram{bsim::GramMatrix(s)}), 0.5, u, cfg),
                    bsim::InvalidArgument);
  }
}
