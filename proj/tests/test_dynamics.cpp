#include <random>

#include "doctest.h"
#include "ergolab/dynamics.hpp"
#include "ergolab/involutions.hpp"

using namespace ergolab;

namespace {

// Residual subsets of Y (given as cycle positions) cutting the n-cycle into
// arcs of length divisible by h; the arcs run from one residual atom to the next.
bool brute_force_feasible(std::size_t n, std::size_t h, const std::vector<Atom>& y) {
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << y.size()); ++m) {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < y.size(); ++i)
      if ((m >> i) & 1) chosen.push_back(y[i]);
    if (chosen.empty()) {
      if (n % h == 0) return true;
      continue;
    }
    bool ok = true;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      auto next = i + 1 < chosen.size() ? chosen[i + 1] : chosen[0] + n;
      if ((next - chosen[i] - 1) % h) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("systems and sets") {
  auto c = FinitePermutationSystem::cycle(5);
  CHECK(c(4) == 0);
  CHECK(c.power(1, -3) == 3);
  CHECK(c.power(2, 17) == 4);
  CHECK(c.is_single_cycle());
  CHECK_THROWS_AS(FinitePermutationSystem({0, 0, 1}), std::invalid_argument);

  auto r = FinitePermutationSystem::rotation(6, 2);
  CHECK(r.cycle_count() == 2);
  CHECK(r.cycle_length_of(1) == 3);

  auto p = FinitePermutationSystem::product(FinitePermutationSystem::cycle(2), FinitePermutationSystem::cycle(3));
  CHECK(p.size() == 6);
  CHECK(p(0) == 4);

  AtomSet a(10, {3, 1, 3});
  CHECK(a.members() == std::vector<Atom>{1, 3});
  CHECK(a.measure() == Rational(1, 5));
  CHECK(a.complement().size() == 8);
  CHECK(a.united(AtomSet(10, {4})).size() == 3);
  CHECK(a.disjoint_from(AtomSet(10, {0, 2})));
  CHECK(a.subset_of(AtomSet::full(10)));
  CHECK(FinitePermutationSystem::cycle(10).image(a, 2) == AtomSet(10, {3, 5}));
  CHECK_THROWS_AS(AtomSet(3, {3}), std::invalid_argument);
}

TEST_CASE("rokhlin towers on a cycle") {
  auto t12 = rokhlin_tower(FinitePermutationSystem::cycle(12), 11);
  CHECK(t12.base == AtomSet(12, {0}));
  CHECK(t12.residual == AtomSet(12, {11}));
  CHECK(roof_returns_to_base(FinitePermutationSystem::cycle(12), t12));

  for (auto layout : {RoofLayout::UnderBase, RoofLayout::Contiguous}) {
    auto sys = FinitePermutationSystem::cycle(10);
    auto t = rokhlin_tower(sys, 3, layout);
    CHECK(t.base == AtomSet(10, {0, 3, 6}));
    CHECK(t.residual == AtomSet(10, {9}));
    CHECK(t.residual.measure() == Rational(1, 10));
    CHECK(is_valid_tower(sys, t));
  }

  auto one = rokhlin_tower(FinitePermutationSystem::cycle(7), 1);
  CHECK(one.base == AtomSet::full(7));
  CHECK(one.residual.empty());

  CHECK_THROWS_AS(rokhlin_tower(FinitePermutationSystem::rotation(6, 2), 2), std::invalid_argument);
  CHECK_THROWS_AS(rokhlin_tower(FinitePermutationSystem::cycle(6), 7), std::invalid_argument);
}

TEST_CASE("rokhlin towers on random cycles") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::size_t n = 2 + seed * 7;
    auto sys = random_single_cycle(n, seed);
    for (std::size_t h : {std::size_t{1}, std::size_t{2}, std::size_t{5}, n / 3 + 1, n}) {
      for (auto layout : {RoofLayout::UnderBase, RoofLayout::Contiguous}) {
        auto t = rokhlin_tower(sys, h, layout);
        CHECK(is_valid_tower(sys, t));
        CHECK(t.residual.measure() == Rational(static_cast<long long>(n % h), static_cast<long long>(n)));
        if (layout == RoofLayout::UnderBase && n % h <= n / h && !t.residual.empty())
          CHECK(roof_returns_to_base(sys, t));
      }
    }
  }
  // residual < h/n <= eps once n >= h^2 / eps
  auto t = rokhlin_tower(random_single_cycle(12100, 3), 11);
  CHECK(t.residual.measure() < Rational(1, 11));
}

TEST_CASE("lehrer-weiss towers") {
  auto c7 = FinitePermutationSystem::cycle(7);
  auto t7 = lehrer_weiss_tower(c7, 3, AtomSet(7, {0}));
  REQUIRE(t7);
  CHECK(t7->residual == AtomSet(7, {0}));

  auto c8 = FinitePermutationSystem::cycle(8);
  auto t8 = lehrer_weiss_tower(c8, 3, AtomSet(8, {0, 4}));
  REQUIRE(t8);
  CHECK(t8->residual == AtomSet(8, {0, 4}));
  CHECK(is_valid_tower(c8, *t8));
  CHECK_FALSE(lehrer_weiss_tower(c8, 3, AtomSet(8, {0})));

  std::mt19937_64 rng(9);
  for (std::size_t n = 1; n <= 12; ++n) {
    auto sys = random_single_cycle(n, n);
    for (std::size_t h = 1; h <= n; ++h)
      for (int trial = 0; trial < 6; ++trial) {
        std::vector<Atom> y_pos, y_atoms;
        for (std::size_t p = 0; p < n; ++p)
          if (rng() % 3 == 0) y_pos.push_back(static_cast<Atom>(p));
        if (y_pos.empty()) continue;
        auto order = sys.cycle_order();
        for (auto p : y_pos) y_atoms.push_back(order[p]);
        AtomSet y(n, y_atoms);
        auto t = lehrer_weiss_tower(sys, h, y);
        CHECK(t.has_value() == brute_force_feasible(n, h, y_pos));
        if (t) {
          CHECK(is_valid_tower(sys, *t));
          CHECK(t->residual.subset_of(y));
          CHECK(t->residual.size() % h == n % h);
        }
      }
  }
}

TEST_CASE("cycle reflections") {
  auto r3 = cycle_two_involutions(3);
  CHECK(r3.second == PermutationArray{0, 2, 1});
  CHECK(r3.first == PermutationArray{1, 0, 2});
  CHECK(compose(r3.first, r3.second) == PermutationArray{1, 2, 0});

  auto r1 = cycle_two_involutions(1);
  CHECK(r1.first == PermutationArray{0});
  CHECK(r1.second == PermutationArray{0});

  for (std::size_t k = 1; k <= 10000; k += (k < 50 ? 1 : 97)) {
    auto r = cycle_two_involutions(k);
    CHECK(is_involution(r.first));
    CHECK(is_involution(r.second));
    CHECK(compose(r.first, r.second) == FinitePermutationSystem::cycle(k).map());
  }
}

TEST_CASE("three involutions") {
  auto check = [](const FinitePermutationSystem& sys, std::size_t h) {
    auto f = factor_three_involutions_traced(sys, h);
    CHECK(is_involution(f.triple.s1));
    CHECK(is_involution(f.triple.s2));
    CHECK(is_involution(f.triple.s3));
    CHECK(compose(f.triple.s1, compose(f.triple.s2, f.triple.s3)) == sys.map());
    // The base copy and its lift act on different levels and commute.
    auto lo = support_of(f.base_second), hi = support_of(f.lifted_second);
    CHECK(AtomSet(sys.size(), lo).disjoint_from(AtomSet(sys.size(), hi)));
    CHECK(compose(f.base_second, f.lifted_second) == compose(f.lifted_second, f.base_second));
    CHECK(is_involution(f.roof_swap));
  };
  check(FinitePermutationSystem::cycle(12), 11);
  check(FinitePermutationSystem::cycle(2), 2);
  for (std::size_t n : {11, 13, 21, 22, 25, 109, 110, 121, 1000, 99991}) check(random_single_cycle(n, n), 11);
  for (std::size_t h = 2; h <= 30; ++h)
    for (std::size_t n = h; n <= 90; n += 7)
      if (h != 2 || n % 2 == 0) check(random_single_cycle(n, n * 31 + h), h);

  CHECK_THROWS_AS(factor_three_involutions(FinitePermutationSystem::cycle(10)), std::invalid_argument);
  CHECK_THROWS_AS(factor_three_involutions(FinitePermutationSystem({1, 0, 3, 2, 4, 5, 6, 7, 8, 9, 10, 11})),
                  std::invalid_argument);
}
