#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "ergolab/numeric.hpp"

namespace ergolab {

using Atom = std::uint32_t;

class AtomSet;

/// n atoms of mass 1/n permuted by a bijection: the finite model of an
/// invertible measure-preserving map. Immutable once built.
class FinitePermutationSystem {
 public:
  /// Throws std::invalid_argument unless `map` is a bijection of {0..n-1}.
  explicit FinitePermutationSystem(std::vector<Atom> map);

  /// The n-cycle i -> i+1 mod n.
  static FinitePermutationSystem cycle(std::size_t n);
  /// Rotation i -> i+step mod n.
  static FinitePermutationSystem rotation(std::size_t n, std::int64_t step);
  /// Product system on n1*n2 atoms; atom (x, y) is x*n2 + y.
  static FinitePermutationSystem product(const FinitePermutationSystem& first,
                                         const FinitePermutationSystem& second);

  std::size_t size() const { return map_.size(); }
  const std::vector<Atom>& map() const { return map_; }
  Atom operator()(Atom x) const { return map_[x]; }

  /// T^k(x) for any integer k, in O(1) via the cycle index.
  Atom power(Atom x, std::int64_t k) const;
  /// The whole map T^k.
  std::vector<Atom> power_map(std::int64_t k) const;
  std::vector<Atom> inverse_map() const { return power_map(-1); }

  std::size_t cycle_count() const { return cycle_start_.size() - 1; }
  bool is_single_cycle() const { return cycle_count() == 1; }
  std::size_t cycle_length_of(Atom x) const;

  /// Atoms listed along the orbit of atom 0: position p holds T^p(0).
  /// Only meaningful for a single cycle.
  std::vector<Atom> cycle_order() const;
  /// Offset of x along its cycle; for a single cycle, the p with T^p(0) = x.
  std::size_t position_in_cycle(Atom x) const { return offset_in_cycle_[x]; }

  /// T^k applied to a set.
  AtomSet image(const AtomSet& set, std::int64_t k = 1) const;

  friend bool operator==(const FinitePermutationSystem& a, const FinitePermutationSystem& b) {
    return a.map_ == b.map_;
  }

 private:
  std::vector<Atom> map_;
  // Cycle index: atoms of every cycle stored contiguously.
  std::vector<Atom> cycle_atoms_;
  std::vector<std::size_t> cycle_start_;
  std::vector<std::uint32_t> cycle_of_;
  std::vector<std::uint32_t> offset_in_cycle_;
};

/// Subset of the atoms of an n-atom system. Members are kept sorted and unique;
/// the measure is always derived from them.
class AtomSet {
 public:
  AtomSet() = default;
  AtomSet(std::size_t universe, std::vector<Atom> members);
  AtomSet(std::size_t universe, std::initializer_list<Atom> members)
      : AtomSet(universe, std::vector<Atom>(members)) {}

  static AtomSet empty(std::size_t universe) { return AtomSet(universe, std::vector<Atom>{}); }
  static AtomSet full(std::size_t universe);
  static AtomSet from_mask(std::span<const char> mask);

  std::size_t universe() const { return universe_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<Atom>& members() const { return members_; }
  bool contains(Atom x) const;

  /// |members| / n, exactly.
  Rational measure() const;

  /// Indicator vector of length n.
  std::vector<char> mask() const;

  AtomSet united(const AtomSet& other) const;
  AtomSet intersected(const AtomSet& other) const;
  AtomSet minus(const AtomSet& other) const;
  AtomSet complement() const;
  bool disjoint_from(const AtomSet& other) const;
  bool subset_of(const AtomSet& other) const;

  friend bool operator==(const AtomSet&, const AtomSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<Atom> members_;
};

/// base, T base, ..., T^{h-1} base and a residual ("roof") partitioning the atoms.
struct Tower {
  AtomSet base;
  std::size_t height = 0;
  AtomSet residual;

  /// T^i base for i = 0..height-1.
  std::vector<AtomSet> levels(const FinitePermutationSystem& sys) const;
};

/// Checks the tower invariant: levels and residual pairwise disjoint and
/// covering every atom.
bool is_valid_tower(const FinitePermutationSystem& sys, const Tower& tower);

/// Where the n mod h leftover atoms of a Rokhlin tower go.
enum class RoofLayout {
  /// Leftover atoms sit after the top of the last columns, each run directly
  /// below a base atom. T(residual) lies in the base whenever n mod h <= n / h.
  UnderBase,
  /// Base at cycle positions 0, h, 2h, ...; residual is the final n mod h positions.
  Contiguous,
};

/// Rokhlin tower of height h on a single n-cycle. Residual measure (n mod h)/n.
/// Throws std::invalid_argument if sys is not one cycle or h is not in [1, n].
Tower rokhlin_tower(const FinitePermutationSystem& sys, std::size_t h,
                    RoofLayout layout = RoofLayout::UnderBase);

/// True when T(residual) is contained in the base.
bool roof_returns_to_base(const FinitePermutationSystem& sys, const Tower& tower);

/// Tower of height h whose residual lies inside `roof_target`. On a cycle this
/// is possible exactly when some subset of the target cuts the cycle into arcs
/// of lengths divisible by h. Returns the first such subset in cycle-position
/// order, or nullopt when none exists.
std::optional<Tower> lehrer_weiss_tower(const FinitePermutationSystem& sys, std::size_t h,
                                        const AtomSet& roof_target);

}  // namespace ergolab
