#include "ergolab/f2.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "ergolab/error.hpp"
#include "json.hpp"

namespace ergolab::f2 {

// ---------------------------------------------------------------------------
// Words

Word::Word(const std::vector<Letter>& letters) {
  for (auto c : letters) {
    if (c > 3) throw std::invalid_argument("Word: letter code out of range");
    if (!letters_.empty() && letters_.back() == inverse_letter(c))
      letters_.pop_back();
    else
      letters_.push_back(c);
  }
}

Word Word::parse(const std::string& text) {
  if (text == "e" || text.empty()) return Word();
  std::vector<Letter> letters;
  for (char ch : text) {
    switch (ch) {
      case 'a': letters.push_back(0); break;
      case 'b': letters.push_back(1); break;
      case 'A': letters.push_back(2); break;
      case 'B': letters.push_back(3); break;
      default: throw std::invalid_argument(std::string("Word::parse: unexpected letter '") + ch + "'");
    }
  }
  return Word(letters);
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (auto& c : out) c = inverse_letter(c);
  return Word(out);
}

std::string Word::str() const {
  if (letters_.empty()) return "e";
  static const char names[] = {'a', 'b', 'A', 'B'};
  std::string out;
  for (auto c : letters_) out.push_back(names[c]);
  return out;
}

bool operator<(const Word& u, const Word& v) {
  if (u.length() != v.length()) return u.length() < v.length();
  return u.letters_ < v.letters_;
}

Word multiply(const Word& u, const Word& v) {
  auto letters = u.letters();
  letters.insert(letters.end(), v.letters().begin(), v.letters().end());
  return Word(letters);
}

std::vector<Word> ball(std::size_t radius) {
  std::vector<Word> out{Word()};
  std::vector<std::vector<Letter>> level{{}};
  for (std::size_t len = 1; len <= radius; ++len) {
    std::vector<std::vector<Letter>> next;
    for (const auto& w : level)
      for (Letter c = 0; c < 4; ++c) {
        if (!w.empty() && w.back() == inverse_letter(c)) continue;
        auto ext = w;
        ext.push_back(c);
        next.push_back(ext);
      }
    std::sort(next.begin(), next.end());
    for (const auto& w : next) out.emplace_back(w);
    level = std::move(next);
  }
  return out;
}

std::vector<Word> cross() { return {Word(), Word({0}), Word({1}), Word({2}), Word({3})}; }

// ---------------------------------------------------------------------------
// Pattern sets

namespace {

std::uint64_t low_bits(std::size_t n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

// Moves bit i of mask to bit target[i].
std::uint64_t remap(std::uint64_t mask, const std::vector<std::size_t>& target) {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < target.size(); ++i)
    if ((mask >> i) & 1) out |= std::uint64_t{1} << target[i];
  return out;
}

std::vector<std::size_t> positions_in(const std::vector<Word>& words, const std::vector<Word>& sorted) {
  std::vector<std::size_t> out;
  out.reserve(words.size());
  for (const auto& w : words)
    out.push_back(static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), w) - sorted.begin()));
  return out;
}

}  // namespace

PatternSet::PatternSet(std::vector<Word> window, std::vector<Cylinder> terms) {
  if (window.size() > kWindowCap)
    throw DomainError("PatternSet: window of " + std::to_string(window.size()) + " words exceeds the cap of " +
                      std::to_string(kWindowCap));
  auto sorted = window;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("PatternSet: repeated word in window");
  const auto target = positions_in(window, sorted);
  const auto full = low_bits(window.size());
  for (auto& t : terms) {
    if (t.care & ~full) throw std::invalid_argument("PatternSet: cylinder refers to bits outside the window");
    t = Cylinder{remap(t.care, target), remap(t.value & t.care, target)};
  }
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  window_ = std::move(sorted);
  terms_ = std::move(terms);
}

PatternSet PatternSet::from_assignments(std::vector<Word> window, const std::vector<std::uint64_t>& assignments) {
  const auto full = low_bits(window.size());
  std::vector<Cylinder> terms;
  terms.reserve(assignments.size());
  for (auto a : assignments) {
    if (a & ~full) throw std::invalid_argument("PatternSet: assignment has bits outside the window");
    terms.push_back({full, a});
  }
  return PatternSet(std::move(window), std::move(terms));
}

PatternSet PatternSet::cylinder(const std::vector<std::pair<Word, int>>& conditions) {
  std::vector<Word> window;
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    window.push_back(conditions[i].first);
    if (conditions[i].second) value |= std::uint64_t{1} << i;
  }
  const auto full = low_bits(window.size());
  return PatternSet(std::move(window), {Cylinder{full, value}});
}

std::uint64_t PatternSet::full_mask() const { return low_bits(window_.size()); }

bool PatternSet::explicit_assignments() const {
  const auto full = full_mask();
  return std::all_of(terms_.begin(), terms_.end(), [&](const Cylinder& c) { return c.care == full; });
}

PatternSet translate(const PatternSet& set, const Word& g) {
  std::vector<Word> window;
  window.reserve(set.window().size());
  for (const auto& w : set.window()) window.push_back(g * w);
  return PatternSet(std::move(window), set.terms());
}

namespace {

// Assignments inside c (over n bits) that avoid terms [from, upto).
BigInt count_outside(Cylinder c, const std::vector<Cylinder>& terms, std::size_t from, std::size_t upto, std::size_t n) {
  for (std::size_t j = from; j < upto; ++j) {
    const auto& t = terms[j];
    if ((c.value ^ t.value) & c.care & t.care) continue;
    const auto extra = t.care & ~c.care;
    if (!extra) return 0;
    const auto bit = extra & (~extra + 1);
    Cylinder agree{c.care | bit, c.value | (t.value & bit)};
    Cylinder differ{c.care | bit, c.value | (~t.value & bit)};
    return count_outside(agree, terms, j, upto, n) + count_outside(differ, terms, j + 1, upto, n);
  }
  return BigInt(1) << (n - static_cast<std::size_t>(__builtin_popcountll(c.care)));
}

}  // namespace

Rational measure(const PatternSet& set) {
  const auto n = set.window().size();
  const BigInt denom = BigInt(1) << n;
  if (set.explicit_assignments()) return Rational(BigInt(set.terms().size()), denom);
  // Count each term minus the union of the earlier ones.
  BigInt count = 0;
  const auto& terms = set.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) count += count_outside(terms[i], terms, 0, i, n);
  return Rational(count, denom);
}

bool disjoint(const PatternSet& p, const PatternSet& q) {
  if (p.terms().empty() || q.terms().empty()) return true;
  std::vector<Word> merged;
  std::set_union(p.window().begin(), p.window().end(), q.window().begin(), q.window().end(), std::back_inserter(merged));
  if (merged.size() > kWindowCap)
    throw DomainError("disjoint: merged window of " + std::to_string(merged.size()) + " words exceeds the cap of " +
                      std::to_string(kWindowCap));
  const auto pos_p = positions_in(p.window(), merged), pos_q = positions_in(q.window(), merged);
  const auto overlap = remap(p.full_mask(), pos_p) & remap(q.full_mask(), pos_q);

  // Two cylinders meet iff they agree wherever both are fixed, which lies in the overlap.
  auto project = [&](const PatternSet& s, const std::vector<std::size_t>& pos) {
    std::vector<Cylinder> out;
    out.reserve(s.terms().size());
    for (const auto& t : s.terms()) {
      auto care = remap(t.care, pos) & overlap;
      out.push_back({care, remap(t.value, pos) & care});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  const auto cp = project(p, pos_p), cq = project(q, pos_q);
  const bool full_p = std::all_of(cp.begin(), cp.end(), [&](const Cylinder& c) { return c.care == overlap; });
  const bool full_q = std::all_of(cq.begin(), cq.end(), [&](const Cylinder& c) { return c.care == overlap; });
  if (full_p && full_q) {
    std::unordered_set<std::uint64_t> seen;
    for (const auto& c : cp) seen.insert(c.value);
    return std::none_of(cq.begin(), cq.end(), [&](const Cylinder& c) { return seen.count(c.value) > 0; });
  }
  for (const auto& a : cp)
    for (const auto& b : cq)
      if (((a.value ^ b.value) & a.care & b.care) == 0) return false;
  return true;
}

RokhlinCertificate verify_rokhlin_family(const PatternSet& base) {
  RokhlinCertificate cert;
  cert.base = base;
  for (const auto& g : cross()) cert.translates.push_back(translate(base, g));
  for (std::size_t i = 0; i < cert.translates.size(); ++i)
    for (std::size_t j = i + 1; j < cert.translates.size(); ++j)
      if (!disjoint(cert.translates[i], cert.translates[j])) cert.overlaps.emplace_back(i, j);
  cert.verdict = cert.overlaps.empty();
  cert.measure = measure(base);
  return cert;
}

PatternSet local_peak(std::size_t radius) { return PatternSet::from_assignments(ball(radius), {1}); }

std::size_t default_threads() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ERGOLAB_THREADS")) {
    char* end = nullptr;
    auto v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return std::min<std::size_t>(v, hw);
  }
  return hw;
}

// ---------------------------------------------------------------------------
// Search

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return splitmix(state_++ * 0x2545f4914f6cdd1dULL + 1); }
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// For the pair of cross elements (g, h) and u = h^-1 g, a pattern p for g T
// and q for h T clash exactly when p restricted to `from` equals q restricted
// to `to` (word w in `from` lines up with u w in `to`).
struct Offset {
  std::vector<std::size_t> from, to;
};

std::uint64_t gather(std::uint64_t pattern, const std::vector<std::size_t>& bits) {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) out |= ((pattern >> bits[i]) & 1) << i;
  return out;
}

class ConflictTables {
 public:
  explicit ConflictTables(const std::vector<Word>& window) : patterns_(std::uint64_t{1} << window.size()) {
    const auto c = cross();
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        auto u = c[j].inverse() * c[i];
        Offset off;
        for (std::size_t k = 0; k < window.size(); ++k) {
          auto v = u * window[k];
          auto it = std::lower_bound(window.begin(), window.end(), v);
          if (it != window.end() && *it == v) {
            off.from.push_back(k);
            off.to.push_back(static_cast<std::size_t>(it - window.begin()));
          }
        }
        offsets_.push_back(off);
      }
    from_.resize(offsets_.size());
    to_.resize(offsets_.size());
    for (std::size_t k = 0; k < offsets_.size(); ++k) {
      from_[k].resize(patterns_);
      to_[k].resize(patterns_);
      for (std::uint64_t p = 0; p < patterns_; ++p) {
        from_[k][p] = static_cast<std::uint32_t>(gather(p, offsets_[k].from));
        to_[k][p] = static_cast<std::uint32_t>(gather(p, offsets_[k].to));
      }
    }
  }

  std::uint64_t patterns() const { return patterns_; }
  std::size_t offsets() const { return offsets_.size(); }
  std::size_t width(std::size_t k) const { return offsets_[k].from.size(); }
  std::uint32_t from(std::size_t k, std::uint64_t p) const { return from_[k][p]; }
  std::uint32_t to(std::size_t k, std::uint64_t p) const { return to_[k][p]; }

 private:
  std::uint64_t patterns_;
  std::vector<Offset> offsets_;
  std::vector<std::vector<std::uint32_t>> from_, to_;
};

class Packing {
 public:
  explicit Packing(const ConflictTables& tables) : t_(tables), member_(tables.patterns(), 0) {
    for (std::size_t k = 0; k < t_.offsets(); ++k) {
      from_bucket_.emplace_back(std::size_t{1} << t_.width(k));
      to_bucket_.emplace_back(std::size_t{1} << t_.width(k));
    }
  }

  bool contains(std::uint64_t p) const { return member_[p] != 0; }
  std::size_t size() const { return size_; }

  bool self_conflict(std::uint64_t p) const {
    for (std::size_t k = 0; k < t_.offsets(); ++k)
      if (t_.from(k, p) == t_.to(k, p)) return true;
    return false;
  }

  bool can_add(std::uint64_t p) const {
    if (member_[p]) return false;
    for (std::size_t k = 0; k < t_.offsets(); ++k) {
      auto f = t_.from(k, p), g = t_.to(k, p);
      if (f == g || !to_bucket_[k][f].empty() || !from_bucket_[k][g].empty()) return false;
    }
    return true;
  }

  // Members clashing with p, stopping once more than `limit` are found.
  std::vector<std::uint64_t> conflicts(std::uint64_t p, std::size_t limit) const {
    std::vector<std::uint64_t> out;
    auto take = [&](const std::vector<std::uint64_t>& bucket) {
      for (auto q : bucket)
        if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
    };
    for (std::size_t k = 0; k < t_.offsets() && out.size() <= limit; ++k) {
      take(to_bucket_[k][t_.from(k, p)]);
      take(from_bucket_[k][t_.to(k, p)]);
    }
    return out;
  }

  void add(std::uint64_t p) { update(p, +1); }
  void remove(std::uint64_t p) { update(p, -1); }

  std::vector<std::uint64_t> members() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 0; p < member_.size(); ++p)
      if (member_[p]) out.push_back(p);
    return out;
  }

 private:
  static void erase_from(std::vector<std::uint64_t>& bucket, std::uint64_t p) {
    auto it = std::find(bucket.begin(), bucket.end(), p);
    *it = bucket.back();
    bucket.pop_back();
  }

  void update(std::uint64_t p, int delta) {
    member_[p] = delta > 0;
    size_ += delta > 0 ? 1 : -1;
    for (std::size_t k = 0; k < t_.offsets(); ++k) {
      auto& fb = from_bucket_[k][t_.from(k, p)];
      auto& tb = to_bucket_[k][t_.to(k, p)];
      if (delta > 0) {
        fb.push_back(p);
        tb.push_back(p);
      } else {
        erase_from(fb, p);
        erase_from(tb, p);
      }
    }
  }

  const ConflictTables& t_;
  std::vector<char> member_;
  std::vector<std::vector<std::vector<std::uint64_t>>> from_bucket_, to_bucket_;
  std::size_t size_ = 0;
};

std::vector<std::uint64_t> run_restart(const ConflictTables& tables, const std::vector<std::uint64_t>& baseline,
                                       std::uint64_t budget, std::uint64_t stream_seed) {
  SplitMix rng(stream_seed);
  Packing packing(tables);
  for (auto p : baseline)
    if (packing.can_add(p)) packing.add(p);

  const auto n = tables.patterns();
  std::vector<std::uint64_t> order(n);
  for (std::uint64_t i = 0; i < n; ++i) order[i] = i;
  for (std::uint64_t i = n; i-- > 1;) std::swap(order[i], order[rng.below(i + 1)]);

  std::uint64_t attempts = 0;
  for (std::uint64_t i = 0; i < n && attempts < budget; ++i, ++attempts)
    if (packing.can_add(order[i])) packing.add(order[i]);

  // Local moves on random non-members: insert when free, swap out a single
  // blocking member otherwise (a plateau move that lets the packing drift).
  auto best = packing.members();
  while (attempts < budget) {
    ++attempts;
    auto p = rng.below(n);
    if (packing.contains(p) || packing.self_conflict(p)) continue;
    auto blocking = packing.conflicts(p, 1);
    if (blocking.size() > 1) continue;
    if (blocking.size() == 1) packing.remove(blocking.front());
    packing.add(p);
    if (packing.size() > best.size()) best = packing.members();
  }
  std::sort(best.begin(), best.end());
  return best;
}

}  // namespace

SearchResult search_best(const SearchOptions& options) {
  if (options.radius > kSearchRadiusCap)
    throw std::invalid_argument("search_best: radius " + std::to_string(options.radius) + " exceeds the cap of " +
                                std::to_string(kSearchRadiusCap));
  const auto window = ball(options.radius);
  const auto baseline = options.radius >= 2 ? local_peak(options.radius) : PatternSet(window, {});

  SearchResult result;
  result.seed = options.seed;
  result.radius = options.radius;
  result.budget = options.budget;
  result.restarts = options.restarts;
  result.certificate = verify_rokhlin_family(baseline);

  if (options.budget > 0 && options.restarts > 0) {
    ConflictTables tables(window);
    std::vector<std::uint64_t> base_assignments;
    for (const auto& t : baseline.terms()) base_assignments.push_back(t.value);

    std::vector<std::optional<RokhlinCertificate>> found(options.restarts);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t r; (r = next.fetch_add(1)) < options.restarts;) {
        auto members = run_restart(tables, base_assignments, options.budget, splitmix(options.seed ^ splitmix(r + 1)));
        auto cert = verify_rokhlin_family(PatternSet::from_assignments(window, members));
        if (cert.verdict) found[r] = std::move(cert);
      }
    };
    const auto threads = std::min(options.restarts, options.threads ? options.threads : default_threads());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (auto& cert : found) {
      if (!cert) continue;
      auto& best = result.certificate;
      if (cert->measure > best.measure ||
          (cert->measure == best.measure && cert->base.terms() < best.base.terms()))
        best = std::move(*cert);
    }
  }
  result.gap_to_target = 1.0 / 17.0 - to_double(result.certificate.measure);
  return result;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::ordered_json certificate_object(const RokhlinCertificate& c) {
  nlohmann::ordered_json j;
  std::vector<std::string> words;
  for (const auto& w : c.base.window()) words.push_back(w.str());
  j["window"] = words;
  if (c.base.explicit_assignments()) {
    std::vector<std::uint64_t> assignments;
    for (const auto& t : c.base.terms()) assignments.push_back(t.value);
    j["assignments"] = assignments;
  } else {
    auto cylinders = nlohmann::ordered_json::array();
    for (const auto& t : c.base.terms()) cylinders.push_back({{"care", t.care}, {"value", t.value}});
    j["cylinders"] = cylinders;
  }
  j["measure"] = {{"num", to_string(numerator_of(c.measure))}, {"den", to_string(denominator_of(c.measure))}};
  j["verdict"] = c.verdict;
  auto overlaps = nlohmann::ordered_json::array();
  for (auto [a, b] : c.overlaps) overlaps.push_back({cross()[a].str(), cross()[b].str()});
  j["overlapping_translates"] = overlaps;
  return j;
}

}  // namespace

std::string certificate_json(const RokhlinCertificate& certificate) { return certificate_object(certificate).dump(); }

std::string search_json(const SearchResult& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["radius"] = r.radius;
  j["budget"] = r.budget;
  j["restarts"] = r.restarts;
  j["certificate"] = certificate_object(r.certificate);
  j["measure_value"] = to_double(r.certificate.measure);
  j["five_measure_at_most_one"] = 5 * r.certificate.measure <= 1;
  j["target"] = {{"num", "1"}, {"den", "17"}};
  j["gap_to_target"] = r.gap_to_target;
  return j.dump();
}

}  // namespace ergolab::f2
