#include "ergolab/involutions.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace ergolab {

PermutationArray compose(std::span<const Atom> f, std::span<const Atom> g) {
  if (f.size() != g.size()) throw std::invalid_argument("compose: size mismatch");
  PermutationArray out(f.size());
  for (std::size_t x = 0; x < g.size(); ++x) out[x] = f[g[x]];
  return out;
}

PermutationArray identity_permutation(std::size_t n) {
  PermutationArray id(n);
  std::iota(id.begin(), id.end(), Atom{0});
  return id;
}

bool is_involution(std::span<const Atom> p) {
  for (std::size_t x = 0; x < p.size(); ++x)
    if (p[x] >= p.size() || p[p[x]] != x) return false;
  return true;
}

std::vector<Atom> support_of(std::span<const Atom> p) {
  std::vector<Atom> out;
  for (std::size_t x = 0; x < p.size(); ++x)
    if (p[x] != x) out.push_back(static_cast<Atom>(x));
  return out;
}

ReflectionPair cycle_two_involutions(std::size_t k) {
  if (k == 0) throw std::invalid_argument("cycle_two_involutions: k must be positive");
  ReflectionPair out{PermutationArray(k), PermutationArray(k)};
  for (std::size_t i = 0; i < k; ++i) {
    out.first[i] = static_cast<Atom>((k + 1 - i) % k);
    out.second[i] = static_cast<Atom>((k - i) % k);
  }
  return out;
}

namespace {

// Writes reflections (first, second) of every cycle of `perm` into the two
// arrays so that perm = first o second. Cycles are walked from their least element.
void split_into_reflections(const PermutationArray& perm, PermutationArray& first, PermutationArray& second) {
  const auto n = perm.size();
  std::vector<char> seen(n, 0);
  std::vector<Atom> cycle;
  for (Atom start = 0; start < n; ++start) {
    if (seen[start]) continue;
    cycle.clear();
    for (Atom x = start; !seen[x]; x = perm[x]) {
      seen[x] = 1;
      cycle.push_back(x);
    }
    const auto k = cycle.size();
    auto refl = cycle_two_involutions(k);
    for (std::size_t i = 0; i < k; ++i) {
      first[cycle[i]] = cycle[refl.first[i]];
      second[cycle[i]] = cycle[refl.second[i]];
    }
  }
}

PermutationArray to_atoms(const PermutationArray& by_position, const std::vector<Atom>& order) {
  PermutationArray out(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) out[order[p]] = order[by_position[p]];
  return out;
}

}  // namespace

InvolutionFactorization factor_three_involutions_traced(const FinitePermutationSystem& sys,
                                                        std::size_t tower_height) {
  const auto n = sys.size();
  const auto h = tower_height;
  if (h < 2) throw std::invalid_argument("factor_three_involutions: tower height must be at least 2");
  if (n < h)
    throw std::invalid_argument("factor_three_involutions: need n >= " + std::to_string(h) + ", got " +
                                std::to_string(n));
  if (!sys.is_single_cycle()) throw std::invalid_argument("factor_three_involutions: system must be a single cycle");
  if (h == 2 && n % 2 != 0)
    throw std::invalid_argument("factor_three_involutions: tower height 2 needs an even cycle length");

  InvolutionFactorization out;
  out.tower = rokhlin_tower(sys, h, RoofLayout::UnderBase);

  // Everything below runs on cycle positions, where T is p -> p + 1.
  std::vector<std::size_t> column_start;
  for (auto atom : out.tower.base.members()) column_start.push_back(sys.position_in_cycle(atom));
  std::sort(column_start.begin(), column_start.end());
  const auto columns = column_start.size();
  column_start.push_back(n);

  auto s = identity_permutation(n);
  for (std::size_t c = 0; c < columns; ++c) {
    auto top = column_start[c] + h - 1;
    auto run_end = column_start[c + 1];
    if (run_end > top + 1) std::swap(s[top], s[run_end - 1]);
  }

  PermutationArray shifted(n);
  for (std::size_t p = 0; p < n; ++p) shifted[p] = s[(p + 1) % n];

  // level_cycle agrees with `shifted` except at the last level of each column,
  // which it sends straight back to the column's base.
  auto level_cycle = shifted;
  auto base_return = identity_permutation(n);
  for (std::size_t c = 0; c < columns; ++c) {
    Atom x = static_cast<Atom>(column_start[c]);
    for (std::size_t i = 0; i + 1 < h; ++i) x = shifted[x];
    level_cycle[x] = static_cast<Atom>(column_start[c]);
    base_return[column_start[c]] = shifted[x];
  }

  PermutationArray base_first = identity_permutation(n), base_second = identity_permutation(n);
  split_into_reflections(base_return, base_first, base_second);

  // Carry base_second one level up: lifted = level_cycle o base_second o level_cycle^{-1}.
  auto lifted = identity_permutation(n);
  for (std::size_t c = 0; c < columns; ++c) {
    auto x = static_cast<Atom>(column_start[c]);
    lifted[level_cycle[x]] = level_cycle[base_second[x]];
  }
  auto periodic = compose(lifted, compose(base_second, level_cycle));

  PermutationArray rotate_first = identity_permutation(n), rotate_second = identity_permutation(n);
  split_into_reflections(periodic, rotate_first, rotate_second);

  auto corrector = compose(s, compose(base_first, lifted));

  std::size_t short_cycles = 0;
  for (std::size_t c = 0; c < columns; ++c)
    if (column_start[c + 1] > column_start[c] + h) ++short_cycles;

  const auto order = sys.cycle_order();
  out.roof_swap = to_atoms(s, order);
  out.shifted = to_atoms(shifted, order);
  out.base_return = to_atoms(base_return, order);
  out.level_cycle = to_atoms(level_cycle, order);
  out.base_first = to_atoms(base_first, order);
  out.base_second = to_atoms(base_second, order);
  out.lifted_second = to_atoms(lifted, order);
  out.periodic = to_atoms(periodic, order);
  out.short_cycles = short_cycles;
  out.triple = InvolutionTriple{to_atoms(corrector, order), to_atoms(rotate_first, order),
                                to_atoms(rotate_second, order)};
  return out;
}

InvolutionTriple factor_three_involutions(const FinitePermutationSystem& sys, std::size_t tower_height) {
  return factor_three_involutions_traced(sys, tower_height).triple;
}

FinitePermutationSystem random_single_cycle(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto map = identity_permutation(n);
  // Sattolo: swapping with a strictly earlier slot yields a uniform n-cycle.
  for (std::size_t i = n; i-- > 1;) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(map[i], map[pick(rng)]);
  }
  return FinitePermutationSystem(std::move(map));
}

}  // namespace ergolab
