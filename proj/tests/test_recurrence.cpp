#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ergolab/involutions.hpp"
#include "ergolab/rank_one.hpp"
#include "ergolab/recurrence.hpp"
#include "oracles.hpp"

using namespace ergolab;
using oracle::brute_triple;

namespace {

FinitePermutationSystem random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<Atom> map(n);
  for (std::size_t i = 0; i < n; ++i) map[i] = static_cast<Atom>(i);
  std::mt19937_64 rng(seed);
  std::shuffle(map.begin(), map.end(), rng);
  return FinitePermutationSystem(map);
}

}  // namespace

TEST_CASE("triple intersection anchors") {
  auto z9 = FinitePermutationSystem::cycle(9);
  AtomSet a(9, {0, 1});
  CHECK(triple_intersection(z9, a, a, a, 3) == 0);
  CHECK(triple_intersection(z9, a, a, a, 0) == Rational(2, 9));
  CHECK(triple_intersection(z9, a, a, a, 9) == Rational(2, 9));
  AtomSet b(9, {1, 4, 6});
  CHECK(triple_intersection(z9, a, b, a, 0) == a.intersected(b).measure());
}

TEST_CASE("furstenberg average anchors") {
  auto z5 = FinitePermutationSystem::cycle(5);
  AtomSet zero(5, {0});
  auto avg = furstenberg_average(z5, zero, zero, zero, 5);
  CHECK(avg.value == Rational(1, 25));
  CHECK(avg.product == Rational(1, 125));

  auto sys = random_single_cycle(40, 3);
  auto a = random_subset(40, 0.3, 1);
  auto full = AtomSet::full(40);
  CHECK(furstenberg_average(sys, a, full, full, 17).value == a.measure());
  CHECK_THROWS_AS(furstenberg_average(sys, a, a, a, 0), std::invalid_argument);
}

TEST_CASE("exact agreement with the brute-force loop") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t n = 5 + seed * 16;
    std::vector<FinitePermutationSystem> systems = {FinitePermutationSystem::cycle(n), random_single_cycle(n, seed),
                                                    random_permutation(n, seed + 100)};
    for (const auto& sys : systems) {
      auto a = random_subset(n, 0.5, 3 * seed), a1 = random_subset(n, 0.4, 3 * seed + 1),
           a2 = random_subset(n, 0.6, 3 * seed + 2);
      const std::size_t horizon = n + 3;
      BigInt total = 0;
      auto series = triple_series(sys, a, a1, a2, horizon);
      for (std::size_t i = 1; i <= horizon; ++i) {
        auto c = brute_triple(sys.map(), a.mask(), a1.mask(), a2.mask(), i, 2 * i);
        total += c;
        CHECK(series[i - 1] == Rational(BigInt(c), BigInt(n)));
      }
      CHECK(furstenberg_average(sys, a, a1, a2, horizon).value == Rational(total, BigInt(horizon * n)));
    }
  }
}

TEST_CASE("roth witness") {
  auto z9 = FinitePermutationSystem::cycle(9);
  CHECK(roth_witness(z9, AtomSet(9, {0, 1, 2}), 9) == 1);
  CHECK(roth_witness(z9, AtomSet(9, {0, 1}), 9) == 9);
  CHECK(roth_witness(z9, AtomSet(9, {0, 1}), 8) == std::nullopt);
  CHECK(roth_witness(z9, AtomSet::full(9), 3) == 1);
  CHECK_THROWS_AS(roth_witness(z9, AtomSet::empty(9), 3), std::invalid_argument);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 30 + seed;
    auto sys = random_single_cycle(n, seed);
    auto a = random_subset(n, 0.1, seed);
    if (a.empty()) continue;
    auto w = roth_witness(sys, a, static_cast<std::int64_t>(n));
    REQUIRE(w);
    CHECK(brute_triple(sys.map(), a.mask(), a.mask(), a.mask(), *w, 2 * *w) > 0);
    for (std::int64_t i = 1; i < *w; ++i) CHECK(brute_triple(sys.map(), a.mask(), a.mask(), a.mask(), i, 2 * i) == 0);
  }
}

TEST_CASE("joining estimate") {
  auto sys = random_single_cycle(31, 8);
  auto a = random_subset(31, 0.5, 1), a1 = random_subset(31, 0.5, 2), a2 = random_subset(31, 0.5, 3);
  CHECK(joining_estimate(sys, {0}, a, a1, a2) == a.intersected(a1).intersected(a2).measure());
  std::vector<std::int64_t> period;
  for (std::int64_t i = 1; i <= 31; ++i) period.push_back(i);
  CHECK(joining_estimate(sys, period, a, a1, a2) == furstenberg_average(sys, a, a1, a2, 31).value);
  CHECK_THROWS_AS(joining_estimate(sys, {}, a, a1, a2), std::invalid_argument);
}

TEST_CASE("joining along rank-one heights deviates by half") {
  rank_one::RankOneSpec spec{1, {}};
  spec = rank_one::extend_spacers(spec, 8);
  auto sys = rank_one::discretize(spec, 8);
  auto hs = rank_one::heights(spec, 8);
  const std::size_t j0 = 3;
  auto positions = rank_one::positions_at_stage(spec, rank_one::LevelSet{j0, {1}}, 8);
  std::vector<Atom> members(positions.begin(), positions.end());
  AtomSet a(sys.size(), members);
  auto full = AtomSet::full(sys.size());
  // On the closed tower the set returns half of itself at every later height;
  // T^{2 h_j} also lands in the full set, so the third factor is inert.
  for (std::size_t j = j0; j < 6; ++j) {
    auto v = joining_estimate(sys, {static_cast<std::int64_t>(hs[j - 1])}, a, a, full);
    CHECK(v == a.measure() / 2);
  }
}

TEST_CASE("mix2 profile on a product of rotations") {
  auto sys = FinitePermutationSystem::product(FinitePermutationSystem::rotation(7, 2), FinitePermutationSystem::cycle(5));
  auto a = random_subset(35, 0.4, 11), a1 = random_subset(35, 0.5, 12), a2 = random_subset(35, 0.3, 13);
  std::vector<TimePair> pairs = {{0, 0}, {1, 2}, {2, 5}, {3, 3}, {4, 11}, {6, 35}};
  auto values = mix2_profile(sys, a, a1, a2, pairs);
  for (std::size_t k = 0; k < pairs.size(); ++k)
    CHECK(values[k] == Rational(BigInt(brute_triple(sys.map(), a.mask(), a1.mask(), a2.mask(), pairs[k].first,
                                                    pairs[k].second)),
                                BigInt(35)));
  CHECK(values[0] == a.intersected(a1).intersected(a2).measure());
  CHECK(values[3] == a.intersected(sys.image(a1.intersected(a2), 3)).measure());

  std::ostringstream csv;
  write_profile_csv(csv, pairs, values);
  CHECK(csv.str().rfind("i,j,numerator,denominator\n0,0,", 0) == 0);
}

TEST_CASE("shift invariance of each term") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto sys = random_permutation(50, seed);
    auto a = random_subset(50, 0.5, seed), a1 = random_subset(50, 0.5, seed + 1), a2 = random_subset(50, 0.5, seed + 2);
    for (std::int64_t i = 0; i < 12; ++i)
      CHECK(triple_intersection(sys, a, a1, a2, i) ==
            triple_intersection(sys, sys.image(a), sys.image(a1), sys.image(a2), i));
  }
}

TEST_CASE("random triples concentrate near the product on prime cycles") {
  for (std::size_t p : {101, 211, 307}) {
    auto sys = FinitePermutationSystem::cycle(p);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      auto a = random_subset(p, 0.5, seed * 3), a1 = random_subset(p, 0.3, seed * 3 + 1),
           a2 = random_subset(p, 0.7, seed * 3 + 2);
      auto avg = furstenberg_average(sys, a, a1, a2, p);
      CHECK(std::abs(to_double(avg.value) - to_double(avg.product)) <= 3.0 / std::sqrt(static_cast<double>(p)));
      CHECK(avg.value * BigInt(p) * BigInt(p) * BigInt(p) == numerator_of(avg.value * BigInt(p) * BigInt(p) * BigInt(p)));
    }
  }
}
