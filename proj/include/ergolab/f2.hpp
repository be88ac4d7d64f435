#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/numeric.hpp"

/// Cylinder sets of the Bernoulli shift of the free group F2 = <a, b> and
/// Rokhlin families shaped like the cross {e, a, b, a^-1, b^-1}.
namespace ergolab::f2 {

/// Letters a, b, a^-1, b^-1 are coded 0, 1, 2, 3 and written a, b, A, B.
using Letter = std::uint8_t;
constexpr Letter inverse_letter(Letter c) { return static_cast<Letter>((c + 2) & 3); }

class Word {
 public:
  Word() = default;
  /// Reduces the letters on construction.
  explicit Word(const std::vector<Letter>& letters);
  /// "e" is the identity; otherwise letters from {a, b, A, B}.
  static Word parse(const std::string& text);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool identity() const { return letters_.empty(); }
  Word inverse() const;
  std::string str() const;

  /// Shortlex: shorter first, then letter codes a < b < A < B.
  friend bool operator<(const Word& u, const Word& v);
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

Word multiply(const Word& u, const Word& v);
inline Word operator*(const Word& u, const Word& v) { return multiply(u, v); }

/// All reduced words of length <= radius, in shortlex order.
std::vector<Word> ball(std::size_t radius);
/// e, a, b, a^-1, b^-1.
std::vector<Word> cross();

/// Largest window a pattern set may have (assignments are 64-bit masks).
constexpr std::size_t kWindowCap = 64;

/// Cylinder condition: x(window[i]) = bit i of value for every bit i in care.
struct Cylinder {
  std::uint64_t care = 0;
  std::uint64_t value = 0;
  friend bool operator==(const Cylinder&, const Cylinder&) = default;
  friend bool operator<(const Cylinder& p, const Cylinder& q) {
    return p.care != q.care ? p.care < q.care : p.value < q.value;
  }
};

/// A union of cylinders over a finite window (kept sorted shortlex). Full-care
/// cylinders are single satisfying assignments.
class PatternSet {
 public:
  PatternSet() = default;
  /// Throws std::invalid_argument for repeated words and DomainError past kWindowCap.
  PatternSet(std::vector<Word> window, std::vector<Cylinder> terms);
  /// Explicit satisfying assignments (bit i is the value at window[i]).
  static PatternSet from_assignments(std::vector<Word> window, const std::vector<std::uint64_t>& assignments);
  /// The single cylinder fixing the given words to the given values.
  static PatternSet cylinder(const std::vector<std::pair<Word, int>>& conditions);

  const std::vector<Word>& window() const { return window_; }
  const std::vector<Cylinder>& terms() const { return terms_; }
  std::uint64_t full_mask() const;
  /// True when every term fixes the whole window.
  bool explicit_assignments() const;

  friend bool operator==(const PatternSet&, const PatternSet&) = default;

 private:
  std::vector<Word> window_;
  std::vector<Cylinder> terms_;
};

/// Window g W with each condition moved from w to g w: the set of x with
/// (x(g w))_{w in W} satisfying the predicate.
PatternSet translate(const PatternSet& set, const Word& g);

/// Exact dyadic measure.
Rational measure(const PatternSet& set);

/// Whether no configuration lies in both sets. Throws DomainError when the
/// merged window exceeds kWindowCap.
bool disjoint(const PatternSet& p, const PatternSet& q);

struct RokhlinCertificate {
  PatternSet base;
  /// base translated by each element of cross(), in that order.
  std::vector<PatternSet> translates;
  bool verdict = false;
  /// Pairs (i, j) of translates that intersect.
  std::vector<std::pair<std::size_t, std::size_t>> overlaps;
  Rational measure;
};

RokhlinCertificate verify_rokhlin_family(const PatternSet& base);

/// x(e) = 1 and x(w) = 0 for every other word of length <= radius.
PatternSet local_peak(std::size_t radius);

/// Largest radius the search handles (17 words).
constexpr std::size_t kSearchRadiusCap = 2;

struct SearchOptions {
  std::size_t radius = 2;
  /// Candidate insertions per restart; 0 returns the baseline.
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::size_t restarts = 4;
  /// 0: ERGOLAB_THREADS if set, else the hardware concurrency.
  std::size_t threads = 0;
};

struct SearchResult {
  RokhlinCertificate certificate;
  std::uint64_t seed = 0;
  std::size_t radius = 0;
  std::uint64_t budget = 0;
  std::size_t restarts = 0;
  /// 1/17 - measure (negative would mean the target was beaten).
  double gap_to_target = 0.0;
};

/// Best verified Rokhlin base among predicates on the radius-L ball. The local
/// peak (radius 2) or the empty set (smaller radii) is the baseline; restarts
/// run on separate seed streams and merge deterministically.
SearchResult search_best(const SearchOptions& options);

/// JSON with window words, assignments (or cylinders), measure {num, den}, verdict.
std::string certificate_json(const RokhlinCertificate& certificate);
std::string search_json(const SearchResult& result);

/// Worker count from ERGOLAB_THREADS, falling back to the hardware concurrency.
std::size_t default_threads();

}  // namespace ergolab::f2
