#include "ergolab/dynamics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ergolab {

namespace {

std::size_t wrap_index(std::int64_t value, std::size_t modulus) {
  auto m = static_cast<std::int64_t>(modulus);
  auto r = value % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

void require_single_cycle(const FinitePermutationSystem& sys, const char* who) {
  if (sys.size() == 0 || !sys.is_single_cycle())
    throw std::invalid_argument(std::string(who) + ": system must be a single cycle (got " +
                                std::to_string(sys.cycle_count()) + " cycles)");
}

AtomSet atoms_at_positions(const FinitePermutationSystem& sys, const std::vector<std::size_t>& positions) {
  std::vector<Atom> atoms;
  atoms.reserve(positions.size());
  for (auto p : positions) atoms.push_back(sys.power(0, static_cast<std::int64_t>(p)));
  return AtomSet(sys.size(), std::move(atoms));
}

}  // namespace

// ---------------------------------------------------------------------------
// FinitePermutationSystem

FinitePermutationSystem::FinitePermutationSystem(std::vector<Atom> map) : map_(std::move(map)) {
  const auto n = map_.size();
  std::vector<char> hit(n, 0);
  for (auto y : map_) {
    if (y >= n) throw std::invalid_argument("permutation image out of range: " + std::to_string(y));
    if (hit[y]) throw std::invalid_argument("map is not injective: " + std::to_string(y) + " hit twice");
    hit[y] = 1;
  }

  cycle_atoms_.reserve(n);
  cycle_of_.assign(n, 0);
  offset_in_cycle_.assign(n, 0);
  cycle_start_.push_back(0);
  std::vector<char> seen(n, 0);
  for (Atom start = 0; start < n; ++start) {
    if (seen[start]) continue;
    const auto id = static_cast<std::uint32_t>(cycle_start_.size() - 1);
    std::uint32_t offset = 0;
    for (Atom x = start; !seen[x]; x = map_[x]) {
      seen[x] = 1;
      cycle_of_[x] = id;
      offset_in_cycle_[x] = offset++;
      cycle_atoms_.push_back(x);
    }
    cycle_start_.push_back(cycle_atoms_.size());
  }
}

FinitePermutationSystem FinitePermutationSystem::cycle(std::size_t n) { return rotation(n, 1); }

FinitePermutationSystem FinitePermutationSystem::rotation(std::size_t n, std::int64_t step) {
  std::vector<Atom> map(n);
  for (std::size_t i = 0; i < n; ++i)
    map[i] = static_cast<Atom>(wrap_index(static_cast<std::int64_t>(i) + step, n));
  return FinitePermutationSystem(std::move(map));
}

FinitePermutationSystem FinitePermutationSystem::product(const FinitePermutationSystem& first,
                                                         const FinitePermutationSystem& second) {
  const auto n1 = first.size(), n2 = second.size();
  std::vector<Atom> map(n1 * n2);
  for (std::size_t x = 0; x < n1; ++x)
    for (std::size_t y = 0; y < n2; ++y)
      map[x * n2 + y] = static_cast<Atom>(first(static_cast<Atom>(x)) * n2 + second(static_cast<Atom>(y)));
  return FinitePermutationSystem(std::move(map));
}

std::size_t FinitePermutationSystem::cycle_length_of(Atom x) const {
  auto id = cycle_of_[x];
  return cycle_start_[id + 1] - cycle_start_[id];
}

Atom FinitePermutationSystem::power(Atom x, std::int64_t k) const {
  auto id = cycle_of_[x];
  auto begin = cycle_start_[id];
  auto len = cycle_start_[id + 1] - begin;
  return cycle_atoms_[begin + wrap_index(static_cast<std::int64_t>(offset_in_cycle_[x]) + k, len)];
}

std::vector<Atom> FinitePermutationSystem::power_map(std::int64_t k) const {
  std::vector<Atom> out(size());
  for (Atom x = 0; x < size(); ++x) out[x] = power(x, k);
  return out;
}

std::vector<Atom> FinitePermutationSystem::cycle_order() const {
  if (size() == 0) return {};
  return {cycle_atoms_.begin(), cycle_atoms_.begin() + static_cast<std::ptrdiff_t>(cycle_start_[1])};
}

AtomSet FinitePermutationSystem::image(const AtomSet& set, std::int64_t k) const {
  std::vector<Atom> out;
  out.reserve(set.size());
  for (auto x : set.members()) out.push_back(power(x, k));
  return AtomSet(size(), std::move(out));
}

// ---------------------------------------------------------------------------
// AtomSet

AtomSet::AtomSet(std::size_t universe, std::vector<Atom> members)
    : universe_(universe), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.back() >= universe_)
    throw std::invalid_argument("atom " + std::to_string(members_.back()) + " outside universe of size " +
                                std::to_string(universe_));
}

AtomSet AtomSet::full(std::size_t universe) {
  std::vector<Atom> all(universe);
  for (std::size_t i = 0; i < universe; ++i) all[i] = static_cast<Atom>(i);
  return AtomSet(universe, std::move(all));
}

AtomSet AtomSet::from_mask(std::span<const char> mask) {
  std::vector<Atom> members;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) members.push_back(static_cast<Atom>(i));
  return AtomSet(mask.size(), std::move(members));
}

bool AtomSet::contains(Atom x) const { return std::binary_search(members_.begin(), members_.end(), x); }

Rational AtomSet::measure() const {
  if (universe_ == 0) return Rational(0);
  return Rational(BigInt(members_.size()), BigInt(universe_));
}

std::vector<char> AtomSet::mask() const {
  std::vector<char> m(universe_, 0);
  for (auto x : members_) m[x] = 1;
  return m;
}

AtomSet AtomSet::united(const AtomSet& other) const {
  std::vector<Atom> out;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                 std::back_inserter(out));
  return AtomSet(universe_, std::move(out));
}

AtomSet AtomSet::intersected(const AtomSet& other) const {
  std::vector<Atom> out;
  std::set_intersection(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                        std::back_inserter(out));
  return AtomSet(universe_, std::move(out));
}

AtomSet AtomSet::minus(const AtomSet& other) const {
  std::vector<Atom> out;
  std::set_difference(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                      std::back_inserter(out));
  return AtomSet(universe_, std::move(out));
}

AtomSet AtomSet::complement() const { return full(universe_).minus(*this); }

bool AtomSet::disjoint_from(const AtomSet& other) const {
  auto a = members_.begin(), b = other.members_.begin();
  while (a != members_.end() && b != other.members_.end()) {
    if (*a == *b) return false;
    if (*a < *b) ++a; else ++b;
  }
  return true;
}

bool AtomSet::subset_of(const AtomSet& other) const {
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
}

// ---------------------------------------------------------------------------
// Towers

std::vector<AtomSet> Tower::levels(const FinitePermutationSystem& sys) const {
  std::vector<AtomSet> out;
  out.reserve(height);
  for (std::size_t i = 0; i < height; ++i) out.push_back(sys.image(base, static_cast<std::int64_t>(i)));
  return out;
}

bool is_valid_tower(const FinitePermutationSystem& sys, const Tower& tower) {
  const auto n = sys.size();
  if (tower.height == 0 || tower.base.universe() != n || tower.residual.universe() != n) return false;
  std::vector<char> covered(n, 0);
  auto mark = [&](Atom x) {
    if (covered[x]) return false;
    covered[x] = 1;
    return true;
  };
  for (auto x : tower.base.members())
    for (std::size_t i = 0; i < tower.height; ++i)
      if (!mark(sys.power(x, static_cast<std::int64_t>(i)))) return false;
  for (auto x : tower.residual.members())
    if (!mark(x)) return false;
  return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
}

Tower rokhlin_tower(const FinitePermutationSystem& sys, std::size_t h, RoofLayout layout) {
  require_single_cycle(sys, "rokhlin_tower");
  const auto n = sys.size();
  if (h < 1 || h > n)
    throw std::invalid_argument("rokhlin_tower: height " + std::to_string(h) + " not in [1, " +
                                std::to_string(n) + "]");
  const auto columns = n / h;
  const auto leftover = n % h;

  std::vector<std::size_t> base, residual;
  if (layout == RoofLayout::Contiguous) {
    for (std::size_t c = 0; c < columns; ++c) base.push_back(c * h);
    for (auto p = columns * h; p < n; ++p) residual.push_back(p);
  } else {
    // Extra atoms are dealt to the last columns so every column top is
    // followed by at most ceil(leftover / columns) residual atoms.
    const auto per_column = leftover / columns;
    const auto with_one_more = leftover % columns;
    std::size_t start = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      base.push_back(start);
      auto extra = per_column + (c >= columns - with_one_more ? 1 : 0);
      for (std::size_t e = 0; e < extra; ++e) residual.push_back(start + h + e);
      start += h + extra;
    }
  }
  return Tower{atoms_at_positions(sys, base), h, atoms_at_positions(sys, residual)};
}

bool roof_returns_to_base(const FinitePermutationSystem& sys, const Tower& tower) {
  return sys.image(tower.residual).subset_of(tower.base);
}

std::optional<Tower> lehrer_weiss_tower(const FinitePermutationSystem& sys, std::size_t h,
                                        const AtomSet& roof_target) {
  require_single_cycle(sys, "lehrer_weiss_tower");
  const auto n = sys.size();
  if (h < 1 || h > n)
    throw std::invalid_argument("lehrer_weiss_tower: height " + std::to_string(h) + " not in [1, " +
                                std::to_string(n) + "]");
  if (roof_target.empty()) throw std::invalid_argument("lehrer_weiss_tower: roof target must be non-empty");
  if (roof_target.universe() != n) throw std::invalid_argument("lehrer_weiss_tower: roof target universe mismatch");

  if (n % h == 0) return rokhlin_tower(sys, h, RoofLayout::Contiguous);

  const auto need = n % h;
  if (roof_target.size() < need) return std::nullopt;

  std::vector<std::size_t> ys;
  ys.reserve(roof_target.size());
  for (auto y : roof_target.members()) ys.push_back(sys.position_in_cycle(y));
  std::sort(ys.begin(), ys.end());

  // Consecutive residual positions r < r' leave an arc of r' - r - 1 atoms,
  // so r' = r + 1 (mod h); closing the cycle forces |residual| = n (mod h).
  // Taking the earliest admissible successor never loses a solution, so for
  // each start a single forward scan decides feasibility.
  std::vector<std::size_t> chain;
  for (std::size_t s = 0; s < ys.size(); ++s) {
    chain.assign(1, ys[s]);
    for (std::size_t i = s + 1; i < ys.size() && chain.size() < need; ++i)
      if (ys[i] % h == (chain.back() + 1) % h) chain.push_back(ys[i]);
    if (chain.size() != need) continue;

    std::vector<std::size_t> base;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      auto arc_begin = chain[k] + 1;
      auto arc_end = (k + 1 < chain.size()) ? chain[k + 1] : chain[0] + n;
      for (auto p = arc_begin; p < arc_end; p += h) base.push_back(p % n);
    }
    return Tower{atoms_at_positions(sys, base), h, atoms_at_positions(sys, chain)};
  }
  return std::nullopt;
}

}  // namespace ergolab
