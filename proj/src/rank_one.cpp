#include "ergolab/rank_one.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ergolab/error.hpp"

namespace ergolab::rank_one {

namespace {

constexpr std::size_t kMaxPositions = std::size_t{1} << 27;
constexpr Height kMaxListedHeight = Height{1} << 26;

Height checked_add(Height a, Height b) {
  Height out;
  if (__builtin_add_overflow(a, b, &out)) throw DomainError("rank-one height overflows 64 bits");
  return out;
}

Height checked_mul(Height a, Height b) {
  Height out;
  if (__builtin_mul_overflow(a, b, &out)) throw DomainError("rank-one height overflows 64 bits");
  return out;
}

void check_level_set(const std::vector<Height>& hs, const LevelSet& set, std::size_t working_stage) {
  if (set.stage < 1) throw std::invalid_argument("level set stage must be >= 1");
  if (set.stage > working_stage)
    throw std::invalid_argument("level set stage " + std::to_string(set.stage) + " exceeds working stage " +
                                std::to_string(working_stage));
  for (auto level : set.levels)
    if (level >= hs[set.stage - 1])
      throw std::invalid_argument("level " + std::to_string(level) + " outside stage " + std::to_string(set.stage) +
                                  " of height " + std::to_string(hs[set.stage - 1]));
}

}  // namespace

std::vector<Height> heights(const RankOneSpec& spec, std::size_t stage_count) {
  if (stage_count < 1) throw std::invalid_argument("heights: need at least one stage");
  if (spec.first_height < 1) throw std::invalid_argument("heights: first height must be positive");
  if (stage_count > spec.stages())
    throw std::invalid_argument("heights: spec defines " + std::to_string(spec.stages()) + " stages, asked for " +
                                std::to_string(stage_count));
  std::vector<Height> hs{spec.first_height};
  for (std::size_t j = 1; j < stage_count; ++j) hs.push_back(checked_add(checked_mul(2, hs.back()), spec.spacers[j - 1]));
  return hs;
}

RankOneSpec extend_spacers(const RankOneSpec& spec, std::size_t stage_count) {
  RankOneSpec out = spec;
  if (out.stages() >= stage_count) return out;
  auto hs = heights(out, out.stages());
  while (out.stages() < stage_count) {
    auto h = hs.back();
    out.spacers.push_back(h);
    hs.push_back(checked_add(checked_mul(2, h), h));
  }
  return out;
}

Rational level_width(std::size_t stage) {
  if (stage < 1) throw std::invalid_argument("level_width: stage must be >= 1");
  return Rational(BigInt(1), BigInt(1) << (stage - 1));
}

TowerStage tower_stage(const RankOneSpec& spec, std::size_t stage) {
  auto hs = heights(spec, stage);
  if (hs.back() > kMaxListedHeight) throw DomainError("tower_stage: stage too tall to list level by level");
  std::vector<char> spacer(hs[0], 0);
  for (std::size_t j = 1; j < stage; ++j) {
    std::vector<char> next;
    next.reserve(hs[j]);
    next.insert(next.end(), spacer.begin(), spacer.end());
    next.insert(next.end(), spacer.begin(), spacer.end());
    next.insert(next.end(), spec.spacers[j - 1], 1);
    spacer = std::move(next);
  }
  TowerStage out{stage, hs.back(), level_width(stage), {}};
  for (Height i = 0; i < spacer.size(); ++i)
    if (spacer[i]) out.spacer_levels.push_back(i);
  return out;
}

Rational measure(const LevelSet& set) {
  auto distinct = set.levels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  return level_width(set.stage) * Rational(BigInt(distinct.size()));
}

std::vector<Height> positions_at_stage(const RankOneSpec& spec, const LevelSet& set, std::size_t stage) {
  auto hs = heights(spec, stage);
  check_level_set(hs, set, stage);

  auto levels = set.levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // A stage-j level reappears in the stage-J tower at every offset that is a
  // subset sum of h_j, ..., h_{J-1} (left copy: +0, right copy: +h_i).
  const auto copies_log = stage - set.stage;
  if (copies_log >= 40 || (levels.size() << copies_log) > kMaxPositions)
    throw DomainError("positions_at_stage: set has too many copies at stage " + std::to_string(stage));
  std::vector<Height> offsets{0};
  for (std::size_t i = set.stage; i < stage; ++i) {
    auto count = offsets.size();
    for (std::size_t k = 0; k < count; ++k) offsets.push_back(offsets[k] + hs[i - 1]);
  }
  std::vector<Height> out;
  out.reserve(levels.size() * offsets.size());
  for (auto o : offsets)
    for (auto l : levels) out.push_back(o + l);
  std::sort(out.begin(), out.end());
  return out;
}

Correlation correlation(const RankOneSpec& spec, const LevelSet& set, Height n, std::size_t working_stage) {
  auto hs = heights(spec, working_stage);
  const auto top = hs.back();
  if (n >= top)
    throw DomainError("correlation: time " + std::to_string(n) + " leaves the stage-" + std::to_string(working_stage) +
                      " tower of height " + std::to_string(top));
  auto pos = positions_at_stage(spec, set, working_stage);

  std::size_t hits = 0, unresolved = 0, j = 0;
  for (auto p : pos) {
    auto target = p + n;
    if (target >= top) {
      ++unresolved;
      continue;
    }
    while (j < pos.size() && pos[j] < target) ++j;
    if (j < pos.size() && pos[j] == target) ++hits;
  }
  auto width = level_width(working_stage);
  Correlation out;
  out.value = width * Rational(BigInt(hits));
  out.unresolved = width * Rational(BigInt(unresolved));
  out.status = unresolved == 0 ? CorrelationStatus::Exact : CorrelationStatus::Unstable;
  return out;
}

CorrelationSeries correlation_series(const RankOneSpec& spec, const LevelSet& set, Height n_max,
                                     std::size_t working_stage) {
  auto hs = heights(spec, working_stage);
  const auto top = hs.back();
  if (n_max >= top)
    throw DomainError("correlation_series: n_max " + std::to_string(n_max) + " leaves the stage-" +
                      std::to_string(working_stage) + " tower of height " + std::to_string(top));
  auto pos = positions_at_stage(spec, set, working_stage);

  // Pairwise differences up to n_max; never more work than one scan per n.
  std::vector<std::uint64_t> hits(n_max + 1, 0);
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t k = i; k < pos.size() && pos[k] - pos[i] <= n_max; ++k) ++hits[pos[k] - pos[i]];

  auto width = level_width(working_stage);
  CorrelationSeries out;
  out.entries.reserve(n_max + 1);
  for (Height n = 0; n <= n_max; ++n) {
    // Points at positions >= top - n leave the tower within n steps.
    auto leaving = pos.end() - std::lower_bound(pos.begin(), pos.end(), top - n);
    if (leaving > 0) {
      out.unstable.push_back(n);
      continue;
    }
    out.entries.push_back({n, width * Rational(BigInt(hits[n]))});
  }
  return out;
}

std::pair<RankOneSpec, std::size_t> certifying_stage(const RankOneSpec& spec, const LevelSet& set, Height n_max,
                                                     std::size_t max_stage) {
  if (set.levels.empty()) throw std::invalid_argument("certifying_stage: empty level set");
  auto top_level = *std::max_element(set.levels.begin(), set.levels.end());
  for (std::size_t stage = std::max<std::size_t>(set.stage, 1); stage <= max_stage; ++stage) {
    auto extended = extend_spacers(spec, stage);
    auto hs = heights(extended, stage);
    Height highest = top_level;
    for (std::size_t i = set.stage; i < stage; ++i) highest = checked_add(highest, hs[i - 1]);
    if (checked_add(highest, n_max) < hs.back()) return {extended, stage};
  }
  throw DomainError("certifying_stage: no stage up to " + std::to_string(max_stage) + " certifies n <= " +
                    std::to_string(n_max));
}

void write_csv(std::ostream& out, const CorrelationSeries& series) {
  out << "n,numerator,denominator\n";
  for (const auto& e : series.entries)
    out << e.n << ',' << numerator_of(e.value) << ',' << denominator_of(e.value) << '\n';
}

int max_terms_for_threshold(const Rational& mu_a, const Rational& threshold) {
  if (threshold <= 0) return 64;
  if (mu_a < threshold) return -1;
  int m = 0;
  Rational scaled = mu_a / 2;
  while (m < 64 && scaled >= threshold) {
    ++m;
    scaled /= 2;
  }
  return m;
}

namespace {

class DecompositionSearch {
 public:
  DecompositionSearch(const std::vector<Height>& hs, std::int64_t max_remainder)
      : hs_(hs), max_remainder_(max_remainder), prefix_(hs.size() + 1, 0) {
    for (std::size_t i = 0; i < hs.size(); ++i) prefix_[i + 1] = prefix_[i] + static_cast<__int128>(hs[i]);
  }

  bool run(__int128 rem, std::size_t upper, int terms_left, std::vector<SignedTerm>& terms) {
    if (abs128(rem) <= max_remainder_) {
      remainder_ = static_cast<std::int64_t>(rem);
      return true;
    }
    if (terms_left <= 0 || upper == 0) return false;
    if (abs128(rem) - reach(upper, terms_left) > max_remainder_) return false;

    struct Candidate {
      __int128 next;
      std::size_t index;
      int sign;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = upper; i-- > 0;)
      for (int sign : {+1, -1}) {
        __int128 next = rem - sign * static_cast<__int128>(hs_[i]);
        if (abs128(next) - reach(i, terms_left - 1) > max_remainder_) continue;
        candidates.push_back({next, i, sign});
      }
    // Nearest height first; ties go to the larger index.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return abs128(a.next) < abs128(b.next); });
    for (const auto& c : candidates) {
      terms.push_back({c.index, c.sign});
      if (run(c.next, c.index, terms_left - 1, terms)) return true;
      terms.pop_back();
    }
    return false;
  }

  std::int64_t remainder() const { return remainder_; }

 private:
  static __int128 abs128(__int128 v) { return v < 0 ? -v : v; }

  // Largest total the `count` biggest heights below `upper` can contribute.
  __int128 reach(std::size_t upper, int count) const {
    if (count <= 0) return 0;
    auto lo = upper > static_cast<std::size_t>(count) ? upper - static_cast<std::size_t>(count) : 0;
    return prefix_[upper] - prefix_[lo];
  }

  const std::vector<Height>& hs_;
  std::int64_t max_remainder_;
  std::vector<__int128> prefix_;
  std::int64_t remainder_ = 0;
};

}  // namespace

std::optional<SignedDecomposition> nonmixing_decomposition(Height n, const std::vector<Height>& hs,
                                                           const Rational& threshold, const Rational& mu_a,
                                                           Height max_remainder) {
  for (std::size_t i = 1; i < hs.size(); ++i)
    if (hs[i] <= hs[i - 1]) throw std::invalid_argument("nonmixing_decomposition: heights must increase strictly");
  auto max_terms = max_terms_for_threshold(mu_a, threshold);
  if (max_terms < 0) return std::nullopt;

  DecompositionSearch search(hs, static_cast<std::int64_t>(std::min<Height>(max_remainder, INT64_MAX)));
  std::vector<SignedTerm> terms;
  if (!search.run(static_cast<__int128>(n), hs.size(), max_terms, terms)) return std::nullopt;
  return SignedDecomposition{std::move(terms), search.remainder()};
}

DesignedSpec design_spacers(const std::vector<Interval>& intervals, Height first_height) {
  if (first_height < 1) throw std::invalid_argument("design_spacers: first height must be positive");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& cur = intervals[i];
    if (cur.lo > cur.hi) throw std::invalid_argument("design_spacers: interval " + std::to_string(i) + " is empty");
    if (i == 0) continue;
    const auto& prev = intervals[i - 1];
    if (cur.lo <= prev.hi)
      throw std::invalid_argument("design_spacers: interval " + std::to_string(i) + " starts at or before the end of interval " +
                                  std::to_string(i - 1));
    if (cur.hi - cur.lo <= prev.hi - prev.lo)
      throw std::invalid_argument("design_spacers: interval lengths must increase (index " + std::to_string(i) + ")");
  }

  DesignedSpec out;
  out.spec.first_height = first_height;
  Height h = first_height;
  Height lower_sum = first_height;
  std::optional<std::size_t> first_rejected;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    auto mid = iv.mid();
    bool spacers_ok = h <= std::numeric_limits<Height>::max() / 3 && mid >= 3 * h;
    bool margin_ok = (iv.hi - iv.lo) / 2 >= lower_sum;
    if (!spacers_ok || !margin_ok) {
      if (!first_rejected) first_rejected = i;
      continue;
    }
    out.spec.spacers.push_back(mid - 2 * h);
    out.selected.push_back(iv);
    out.selected_indices.push_back(i);
    h = mid;
    lower_sum = checked_add(lower_sum, h);
  }
  if (out.selected.empty())
    throw std::invalid_argument("design_spacers: intervals too dense, none admits s_j >= h_j (first failure at index " +
                                std::to_string(first_rejected.value_or(0)) + ")");
  return out;
}

std::vector<Interval> gap_intervals(const SequenceGenerator& sequence, std::size_t count, std::size_t scan_limit) {
  std::vector<Interval> out;
  if (count == 0) return out;
  auto prev = sequence();
  if (!prev) throw DomainError("gap_intervals: empty sequence");
  Height last_length = 0;
  for (std::size_t scanned = 1; out.size() < count; ++scanned) {
    if (scanned > scan_limit)
      throw DomainError("gap_intervals: only " + std::to_string(out.size()) + " usable gaps in the first " +
                        std::to_string(scan_limit) + " elements");
    auto next = sequence();
    if (!next)
      throw DomainError("gap_intervals: sequence ended after " + std::to_string(out.size()) + " of " +
                        std::to_string(count) + " intervals");
    if (*next <= *prev) throw std::invalid_argument("gap_intervals: sequence must increase strictly");
    const Height interior = *next - *prev - 1;
    const Height length = interior / 4;
    if (length >= 1 && length > last_length) {
      const Height centre = *prev + 1 + (interior - 1) / 2;
      const Height lo = centre - length / 2;
      out.push_back({lo, lo + length});
      last_length = length;
    }
    prev = next;
  }
  return out;
}

std::vector<Interval> decade_intervals(int from_exponent, int to_exponent) {
  std::vector<Interval> out;
  for (int j = from_exponent; j <= to_exponent; ++j) {
    Height p = 1;
    for (int k = 0; k < j; ++k) p = checked_mul(p, 10);
    out.push_back({p, checked_mul(p, 2)});
  }
  return out;
}

ConfinementReport confinement_scan(const RankOneSpec& spec, const LevelSet& set, Height n_max,
                                   std::size_t working_stage, const std::vector<Interval>& intervals,
                                   const Rational& threshold) {
  auto series = correlation_series(spec, set, n_max, working_stage);
  if (!series.unstable.empty())
    throw DomainError("confinement_scan: stage " + std::to_string(working_stage) + " does not certify n = " +
                      std::to_string(series.unstable.front()));
  auto hs = heights(spec, working_stage);
  std::vector<Height> usable(hs.begin() + static_cast<std::ptrdiff_t>(set.stage - 1), hs.end() - 1);
  const auto mu_a = measure(set);
  const Height max_remainder = hs[set.stage - 1] - 1;

  ConfinementReport report;
  report.n_max = n_max;
  report.threshold = threshold;
  for (const auto& e : series.entries) {
    if (e.n == 0 || e.value < threshold) continue;
    ++report.nonmixing;
    bool inside = std::any_of(intervals.begin(), intervals.end(), [&](const Interval& iv) { return iv.contains(e.n); });
    auto dec = nonmixing_decomposition(e.n, usable, threshold, mu_a, max_remainder);
    if (dec) {
      auto r = static_cast<Height>(dec->remainder < 0 ? -dec->remainder : dec->remainder);
      report.max_remainder_seen = std::max(report.max_remainder_seen, r);
    }
    if (inside)
      ++report.inside_intervals;
    else if (dec)
      ++report.decomposed;
    else {
      ++report.unexplained;
      report.unexplained_times.push_back(e.n);
    }
  }
  return report;
}

FinitePermutationSystem discretize(const RankOneSpec& spec, std::size_t stage) {
  auto hs = heights(spec, stage);
  if (hs.back() > kMaxListedHeight) throw DomainError("discretize: stage too tall");
  return FinitePermutationSystem::cycle(hs.back());
}

}  // namespace ergolab::rank_one
