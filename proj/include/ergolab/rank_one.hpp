#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ergolab/dynamics.hpp"
#include "ergolab/numeric.hpp"

/// Rank-one cutting and stacking with two columns per stage and every spacer
/// stacked above the second column. Stage-1 levels have width 1, so the
/// invariant measure is infinite and only finite unions of levels are used as
/// test sets.
namespace ergolab::rank_one {

using Height = std::uint64_t;

struct RankOneSpec {
  Height first_height = 1;
  /// s_1, s_2, ...; stage j+1 is built from stage j with s_j spacers.
  std::vector<Height> spacers;

  /// Number of stages whose heights are determined.
  std::size_t stages() const { return spacers.size() + 1; }
};

/// h_1..h_J with h_{j+1} = 2 h_j + s_j. Throws std::invalid_argument when the
/// spec defines fewer than J stages and DomainError on 64-bit overflow.
std::vector<Height> heights(const RankOneSpec& spec, std::size_t stage_count);

/// Appends s_j = h_j until `stage_count` stages are defined; the smallest
/// spacer count for which the deviation at n = h_j is exactly half.
RankOneSpec extend_spacers(const RankOneSpec& spec, std::size_t stage_count);

/// Width of each stage-j level (stage 1 has width 1).
Rational level_width(std::size_t stage);

struct TowerStage {
  std::size_t stage = 0;
  Height height = 0;
  Rational width;
  /// Indices of levels that are spacers (inserted at any earlier stage).
  std::vector<Height> spacer_levels;
  Rational total_measure() const { return width * Rational(BigInt(height)); }
};

TowerStage tower_stage(const RankOneSpec& spec, std::size_t stage);

/// A finite-measure set: a union of levels of one stage.
struct LevelSet {
  std::size_t stage = 1;
  std::vector<Height> levels;
};

Rational measure(const LevelSet& set);

/// Positions (sorted) occupied by `set` inside the stage-J tower.
std::vector<Height> positions_at_stage(const RankOneSpec& spec, const LevelSet& set, std::size_t stage);

enum class CorrelationStatus { Exact, Unstable };

/// mu(T^n A ∩ A) read off the stage-J tower. Exact when no point of A within n
/// levels of the top exists (nothing can leave the tower); otherwise Unstable,
/// and `value` is the part already accounted for (a lower bound).
struct Correlation {
  CorrelationStatus status = CorrelationStatus::Exact;
  Rational value;
  Rational unresolved;
  bool exact() const { return status == CorrelationStatus::Exact; }
};

/// Throws DomainError when n >= h_J, std::invalid_argument if A's stage exceeds J.
Correlation correlation(const RankOneSpec& spec, const LevelSet& set, Height n, std::size_t working_stage);

struct CorrelationSeries {
  struct Entry {
    Height n;
    Rational value;
  };
  std::vector<Entry> entries;
  /// Times in the requested range that could not be certified at this stage.
  std::vector<Height> unstable;
};

/// correlation() for every n in [0, n_max].
CorrelationSeries correlation_series(const RankOneSpec& spec, const LevelSet& set, Height n_max,
                                     std::size_t working_stage);

/// Smallest stage J >= A's stage at which every n <= n_max is certified exact,
/// extending the spec with s_j = h_j as needed. Returns the extended spec and J.
std::pair<RankOneSpec, std::size_t> certifying_stage(const RankOneSpec& spec, const LevelSet& set, Height n_max,
                                                     std::size_t max_stage = 48);

/// CSV with columns n,numerator,denominator.
void write_csv(std::ostream& out, const CorrelationSeries& series);

struct SignedTerm {
  std::size_t index;  // into the heights list
  int sign;           // +1 or -1
};

/// n = sum sign_i h_{index_i} + remainder with strictly decreasing indices.
struct SignedDecomposition {
  std::vector<SignedTerm> terms;
  std::int64_t remainder = 0;
};

/// Largest m with 2^-m * mu_A >= threshold, or -1 when mu_A < threshold.
int max_terms_for_threshold(const Rational& mu_a, const Rational& threshold);

/// Greedy descent (nearest height first, with backtracking) for a signed
/// decomposition using at most max_terms_for_threshold(mu_a, threshold) terms
/// and |remainder| <= max_remainder. nullopt when none exists.
std::optional<SignedDecomposition> nonmixing_decomposition(Height n, const std::vector<Height>& heights,
                                                           const Rational& threshold, const Rational& mu_a,
                                                           Height max_remainder);

struct Interval {
  Height lo = 0;
  Height hi = 0;
  Height mid() const { return lo + (hi - lo) / 2; }
  bool contains(Height x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct DesignedSpec {
  RankOneSpec spec;
  /// selected[k] is the interval holding h_{k+2}.
  std::vector<Interval> selected;
  std::vector<std::size_t> selected_indices;
};

/// Targets h_2, h_3, ... at the midpoints of a sparse subsequence of the
/// intervals. An interval is taken when s = mid - 2h >= h and its half-length
/// covers the sum of all previous heights; otherwise it is skipped.
/// Throws std::invalid_argument (with the index) when the intervals are not
/// increasing and disjoint or when no interval can be used.
DesignedSpec design_spacers(const std::vector<Interval>& intervals, Height first_height = 1);

/// Returns the next element of a strictly increasing sequence, or nullopt at its end.
using SequenceGenerator = std::function<std::optional<Height>()>;

/// `count` intervals of strictly increasing length, each centred strictly
/// inside a gap of M (length floor(g/4) for a gap of g interior integers).
/// Throws DomainError when the sequence ends or `scan_limit` elements pass
/// before enough gaps are found.
std::vector<Interval> gap_intervals(const SequenceGenerator& sequence, std::size_t count,
                                    std::size_t scan_limit = 100'000'000);

/// [10^j, 2*10^j] for j = from..to.
std::vector<Interval> decade_intervals(int from_exponent, int to_exponent);

/// Summary of an exhaustive scan of non-mixing times.
struct ConfinementReport {
  Height n_max = 0;
  Rational threshold;
  std::size_t nonmixing = 0;
  std::size_t inside_intervals = 0;
  std::size_t decomposed = 0;
  std::size_t unexplained = 0;
  Height max_remainder_seen = 0;
  std::vector<Height> unexplained_times;
};

/// Every n in [1, n_max] with correlation >= threshold is classified as lying
/// in one of the intervals or admitting a decomposition over the heights from
/// A's stage upward with |remainder| < h_{stage(A)}. Requires exact values.
ConfinementReport confinement_scan(const RankOneSpec& spec, const LevelSet& set, Height n_max,
                                   std::size_t working_stage, const std::vector<Interval>& intervals,
                                   const Rational& threshold);

/// The stage-J tower closed into a single h_J-cycle (top level mapped to the
/// bottom); atom p is tower position p.
FinitePermutationSystem discretize(const RankOneSpec& spec, std::size_t stage);

}  // namespace ergolab::rank_one
