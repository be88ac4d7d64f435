#include "ergolab/recurrence.hpp"

#include <ostream>
#include <random>
#include <stdexcept>

namespace ergolab {

namespace {

void require_universe(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1, const AtomSet& a2) {
  if (a.universe() != sys.size() || a1.universe() != sys.size() || a2.universe() != sys.size())
    throw std::invalid_argument("recurrence: set universe does not match the system size");
}

std::size_t count_hits(const FinitePermutationSystem& sys, const AtomSet& a, const std::vector<char>& m1,
                       const std::vector<char>& m2, std::int64_t i, std::int64_t j) {
  std::size_t hits = 0;
  for (auto x : a.members())
    if (m1[sys.power(x, -i)] && m2[sys.power(x, -j)]) ++hits;
  return hits;
}

Rational fraction(std::size_t count, std::size_t denom) {
  if (denom == 0) return Rational(0);
  return Rational(BigInt(count), BigInt(denom));
}

}  // namespace

Rational triple_intersection(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1,
                             const AtomSet& a2, std::int64_t i) {
  return mix2_value(sys, a, a1, a2, i, 2 * i);
}

Rational mix2_value(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1, const AtomSet& a2,
                    std::int64_t i, std::int64_t j) {
  require_universe(sys, a, a1, a2);
  return fraction(count_hits(sys, a, a1.mask(), a2.mask(), i, j), sys.size());
}

std::vector<Rational> triple_series(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1,
                                    const AtomSet& a2, std::size_t horizon) {
  require_universe(sys, a, a1, a2);
  auto m1 = a1.mask(), m2 = a2.mask();
  std::vector<Rational> out;
  out.reserve(horizon);
  for (std::size_t i = 1; i <= horizon; ++i) {
    auto k = static_cast<std::int64_t>(i);
    out.push_back(fraction(count_hits(sys, a, m1, m2, k, 2 * k), sys.size()));
  }
  return out;
}

TripleAverage furstenberg_average(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1,
                                  const AtomSet& a2, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("furstenberg_average: horizon must be at least 1");
  require_universe(sys, a, a1, a2);
  auto m1 = a1.mask(), m2 = a2.mask();
  BigInt total = 0;
  for (std::size_t i = 1; i <= horizon; ++i) {
    auto k = static_cast<std::int64_t>(i);
    total += count_hits(sys, a, m1, m2, k, 2 * k);
  }
  TripleAverage out;
  out.horizon = horizon;
  out.value = sys.size() == 0 ? Rational(0) : Rational(total, BigInt(horizon) * sys.size());
  out.product = a.measure() * a1.measure() * a2.measure();
  return out;
}

std::optional<std::int64_t> roth_witness(const FinitePermutationSystem& sys, const AtomSet& a, std::int64_t i_max) {
  if (a.empty()) throw std::invalid_argument("roth_witness: set must have positive measure");
  require_universe(sys, a, a, a);
  auto m = a.mask();
  for (std::int64_t i = 1; i <= i_max; ++i)
    if (count_hits(sys, a, m, m, i, 2 * i) > 0) return i;
  return std::nullopt;
}

Rational joining_estimate(const FinitePermutationSystem& sys, const std::vector<std::int64_t>& times,
                          const AtomSet& a, const AtomSet& a1, const AtomSet& a2) {
  if (times.empty()) throw std::invalid_argument("joining_estimate: times must be non-empty");
  require_universe(sys, a, a1, a2);
  auto m1 = a1.mask(), m2 = a2.mask();
  BigInt total = 0;
  for (auto i : times) total += count_hits(sys, a, m1, m2, i, 2 * i);
  if (sys.size() == 0) return Rational(0);
  return Rational(total, BigInt(times.size()) * sys.size());
}

std::vector<Rational> mix2_profile(const FinitePermutationSystem& sys, const AtomSet& a, const AtomSet& a1,
                                   const AtomSet& a2, const std::vector<TimePair>& pairs) {
  require_universe(sys, a, a1, a2);
  auto m1 = a1.mask(), m2 = a2.mask();
  std::vector<Rational> out;
  out.reserve(pairs.size());
  for (auto [i, j] : pairs) out.push_back(fraction(count_hits(sys, a, m1, m2, i, j), sys.size()));
  return out;
}

AtomSet random_subset(std::size_t universe, double density, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("random_subset: density must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  // Compare raw 53-bit draws so the result does not depend on the library's distributions.
  const auto cut = static_cast<std::uint64_t>(density * 9007199254740992.0);
  std::vector<Atom> members;
  for (std::size_t x = 0; x < universe; ++x)
    if ((rng() >> 11) < cut) members.push_back(static_cast<Atom>(x));
  return AtomSet(universe, std::move(members));
}

void write_series_csv(std::ostream& out, const std::vector<Rational>& series) {
  out << "i,numerator,denominator\n";
  for (std::size_t k = 0; k < series.size(); ++k)
    out << k + 1 << ',' << numerator_of(series[k]) << ',' << denominator_of(series[k]) << '\n';
}

void write_profile_csv(std::ostream& out, const std::vector<TimePair>& pairs, const std::vector<Rational>& values) {
  if (pairs.size() != values.size()) throw std::invalid_argument("write_profile_csv: size mismatch");
  out << "i,j,numerator,denominator\n";
  for (std::size_t k = 0; k < pairs.size(); ++k)
    out << pairs[k].first << ',' << pairs[k].second << ',' << numerator_of(values[k]) << ','
        << denominator_of(values[k]) << '\n';
}

}  // namespace ergolab
