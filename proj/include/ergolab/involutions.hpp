#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ergolab/dynamics.hpp"

namespace ergolab {

using PermutationArray = std::vector<Atom>;

/// (f o g)(x) = f(g(x)).
PermutationArray compose(std::span<const Atom> f, std::span<const Atom> g);
PermutationArray identity_permutation(std::size_t n);
bool is_involution(std::span<const Atom> p);
/// Atoms moved by p.
std::vector<Atom> support_of(std::span<const Atom> p);

/// Two reflections of Z_k whose composition is the rotation i -> i+1:
/// first(i) = 1 - i, second(i) = -i (mod k), first o second = rotation.
struct ReflectionPair {
  PermutationArray first;
  PermutationArray second;
};
ReflectionPair cycle_two_involutions(std::size_t k);

/// T = s1 o s2 o s3 with every factor an involution.
struct InvolutionTriple {
  PermutationArray s1;
  PermutationArray s2;
  PermutationArray s3;
};

/// Intermediate objects of the factorization, all as permutations of the atoms.
struct InvolutionFactorization {
  Tower tower;
  /// Swaps each residual run's last atom with the column top below it.
  PermutationArray roof_swap;
  /// roof_swap o T.
  PermutationArray shifted;
  /// First-return map of `shifted` on the base, identity elsewhere.
  PermutationArray base_return;
  /// Level-cycling map with shifted = base_return o level_cycle.
  PermutationArray level_cycle;
  /// base_return = base_first o base_second, both supported on the base.
  PermutationArray base_first;
  PermutationArray base_second;
  /// Copy of base_second carried one level up by level_cycle.
  PermutationArray lifted_second;
  /// lifted_second o base_second o level_cycle; its cycles have length
  /// `tower.height` except for the short cycles left by residual runs.
  PermutationArray periodic;
  std::size_t short_cycles = 0;
  InvolutionTriple triple;
};

/// Factors a single n-cycle into three involutions through a Rokhlin tower of
/// the given height (n >= height >= 2; height 2 requires an even n).
/// Throws std::invalid_argument otherwise.
InvolutionTriple factor_three_involutions(const FinitePermutationSystem& sys, std::size_t tower_height = 11);
InvolutionFactorization factor_three_involutions_traced(const FinitePermutationSystem& sys,
                                                        std::size_t tower_height = 11);

/// Uniformly random single n-cycle (Sattolo shuffle).
FinitePermutationSystem random_single_cycle(std::size_t n, std::uint64_t seed);

}  // namespace ergolab
