#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "ergolab/dynamics.hpp"
#include "ergolab/numeric.hpp"

namespace ergolab {

/// mu(A ∩ T^i A1 ∩ T^{2i} A2): atoms x in A with T^{-i}x in A1 and T^{-2i}x in A2.
Rational triple_intersection(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1,
                             const AtomSet& a2, std::int64_t i);

/// mu(A ∩ T^i A1 ∩ T^j A2) for arbitrary i, j.
Rational mix2_value(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1, const AtomSet& a2,
                    std::int64_t i, std::int64_t j);

struct TripleAverage {
  std::size_t horizon = 0;
  /// (1/N) sum_{i=1..N} mu(A ∩ T^i A1 ∩ T^{2i} A2)
  Rational value;
  /// mu(A) mu(A1) mu(A2)
  Rational product;
};

/// Throws std::invalid_argument for N = 0.
TripleAverage furstenberg_average(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1,
                                  const AtomSet& a2, std::size_t horizon);

/// Terms i = 1..N of the average, in order.
std::vector<Rational> triple_series(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1,
                                    const AtomSet& a2, std::size_t horizon);

/// Least i in [1, i_max] with mu(A ∩ T^i A ∩ T^{2i} A) > 0.
/// Throws std::invalid_argument when A is empty.
std::optional<std::int64_t> roth_witness(const FinitePermutationSystem& sys, const AtomSet& a, std::int64_t i_max);

/// Average of triple_intersection over the given times (which must be non-empty).
Rational joining_estimate(const FinitePermutationSystem& sys, const std::vector<std::int64_t>& times,
                          const AtomSet& a, const AtomSet& a1, const AtomSet& a2);

using TimePair = std::pair<std::int64_t, std::int64_t>;

std::vector<Rational> mix2_profile(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1,
                                   const AtomSet& a2, const std::vector<TimePair>& pairs);

/// Each atom joins the set independently with probability `density`.
AtomSet random_subset(std::size_t universe, double density, std::uint64_t seed);

/// CSV with columns i,numerator,denominator (i starting at 1).
void write_series_csv(std::ostream& out, const std::vector<Rational>& series);
/// CSV with columns i,j,numerator,denominator.
void write_profile_csv(std::ostream& out, const std::vector<TimePair>& pairs, const std::vector<Rational>& values);

}  // namespace ergolab
