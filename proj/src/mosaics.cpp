#include "ergolab/mosaics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "ergolab/error.hpp"

namespace ergolab::mosaics {

namespace {

void check_rules(const MosaicRules& rules) {
  if (rules.k != 2 && rules.k != 3) throw std::invalid_argument("mosaics: k must be 2 or 3, got " + std::to_string(rules.k));
}

// Whether a tile may occupy [start, start + len) along an axis of the given size.
bool extent_ok(std::size_t start, std::size_t len, std::size_t size, const MosaicRules& rules) {
  if (len == 0 || len > rules.k || start + len > size) return false;
  if (len == rules.k) return true;
  return rules.boundary == Boundary::Clipped && (start == 0 || start + len == size);
}

bool touches(int dx, int dy, Adjacency adjacency) {
  if (dx == 0 && dy == 0) return false;
  return adjacency == Adjacency::Eight || dx == 0 || dy == 0;
}

}  // namespace

std::size_t Mosaic::blue_count() const { return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), kBlue)); }

bool validate_mosaic(const Mosaic& m) {
  if (m.cells.size() != m.width * m.height) return false;
  std::map<std::int32_t, std::vector<std::size_t>> tiles;
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    if (m.cells[i] == kBlue) continue;
    if (m.cells[i] < 0) return false;
    tiles[m.cells[i]].push_back(i);
  }
  for (const auto& [id, members] : tiles) {
    std::size_t x0 = m.width, y0 = m.height, x1 = 0, y1 = 0;
    for (auto i : members) {
      x0 = std::min(x0, i % m.width), x1 = std::max(x1, i % m.width);
      y0 = std::min(y0, i / m.width), y1 = std::max(y1, i / m.width);
    }
    const auto a = x1 - x0 + 1, b = y1 - y0 + 1;
    if (members.size() != a * b) return false;
    if (!extent_ok(x0, a, m.width, m.rules) || !extent_ok(y0, b, m.height, m.rules)) return false;
  }
  for (std::size_t y = 0; y < m.height; ++y)
    for (std::size_t x = 0; x < m.width; ++x) {
      if (!m.blue(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!touches(dx, dy, m.rules.adjacency)) continue;
          auto nx = static_cast<std::int64_t>(x) + dx, ny = static_cast<std::int64_t>(y) + dy;
          if (nx < 0 || ny < 0 || nx >= static_cast<std::int64_t>(m.width) || ny >= static_cast<std::int64_t>(m.height))
            continue;
          if (m.blue(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny))) return false;
        }
    }
  return true;
}

namespace {

// A row is packed two bits per column: 0 red (or nothing) not reaching the next
// row, 1 blue, r + 1 red still covering r more rows below.
using Row = std::uint64_t;
constexpr Row kBlueCode = 1;

Row code_at(Row row, std::size_t x) { return (row >> (2 * x)) & 3; }
std::size_t cover_left(Row code) { return code >= 2 ? code - 1 : 0; }
Row red_code(std::size_t r) { return r == 0 ? 0 : r + 1; }

bool completes(Row row, std::size_t width) {
  for (std::size_t x = 0; x < width; ++x)
    if (code_at(row, x) >= 2) return false;
  return true;
}

struct Piece {
  std::size_t x, a, b;
};

using Emit = std::function<void(Row, const std::vector<Piece>&)>;

class RowTransfer {
 public:
  RowTransfer(std::size_t width, std::size_t height, const MosaicRules& rules)
      : width_(width), height_(height), rules_(rules) {}

  // Every way to fill row y below `prev`; tiles started in this row are listed.
  void successors(Row prev, std::size_t y, const Emit& emit) const {
    std::vector<Piece> pieces;
    fill(prev, y, 0, 0, pieces, emit);
  }

 private:
  void fill(Row prev, std::size_t y, std::size_t x, Row next, std::vector<Piece>& pieces, const Emit& emit) const {
    if (x == width_) {
      emit(next, pieces);
      return;
    }
    auto above = code_at(prev, x);
    if (above >= 2) {
      fill(prev, y, x + 1, next | (red_code(cover_left(above) - 1) << (2 * x)), pieces, emit);
      return;
    }
    if (blue_allowed(prev, next, x)) fill(prev, y, x + 1, next | (kBlueCode << (2 * x)), pieces, emit);
    for (std::size_t a = 1; a <= rules_.k && x + a <= width_; ++a) {
      if (code_at(prev, x + a - 1) >= 2) break;
      if (!extent_ok(x, a, width_, rules_)) continue;
      for (std::size_t b = 1; b <= rules_.k; ++b) {
        if (!extent_ok(y, b, height_, rules_)) continue;
        Row placed = next;
        for (std::size_t d = 0; d < a; ++d) placed |= red_code(b - 1) << (2 * (x + d));
        pieces.push_back({x, a, b});
        fill(prev, y, x + a, placed, pieces, emit);
        pieces.pop_back();
      }
    }
  }

  bool blue_allowed(Row prev, Row next, std::size_t x) const {
    if (x > 0 && code_at(next, x - 1) == kBlueCode) return false;
    if (code_at(prev, x) == kBlueCode) return false;
    if (rules_.adjacency == Adjacency::Eight) {
      if (x > 0 && code_at(prev, x - 1) == kBlueCode) return false;
      if (x + 1 < width_ && code_at(prev, x + 1) == kBlueCode) return false;
    }
    return true;
  }

  std::size_t width_;
  std::size_t height_;
  MosaicRules rules_;
};

double log2_of(const BigInt& v) {
  if (v <= 0) return 0.0;
  auto bits = boost::multiprecision::msb(v);
  if (bits < 60) return std::log2(static_cast<double>(v));
  BigInt top = v >> (bits - 52);
  return std::log2(static_cast<double>(top)) + static_cast<double>(bits - 52);
}

Mosaic transpose(const Mosaic& m) {
  Mosaic out{m.height, m.width, m.rules, std::vector<std::int32_t>(m.cells.size())};
  for (std::size_t y = 0; y < m.height; ++y)
    for (std::size_t x = 0; x < m.width; ++x) out.cells[x * out.width + y] = m.at(x, y);
  return out;
}

std::optional<Mosaic> sample_by_rows(std::size_t width, std::size_t height, const MosaicRules& rules,
                                     std::uint64_t seed) {
  RowTransfer transfer(width, height, rules);
  std::vector<std::unordered_set<Row>> reach(height);
  std::unordered_set<Row> frontier{0};
  for (std::size_t y = 0; y < height; ++y) {
    for (auto prev : frontier) transfer.successors(prev, y, [&](Row next, const auto&) { reach[y].insert(next); });
    frontier = reach[y];
  }
  // Keep only rows from which the board can still be finished.
  std::vector<std::unordered_set<Row>> live(height);
  for (auto row : reach[height - 1])
    if (completes(row, width)) live[height - 1].insert(row);
  for (std::size_t y = height - 1; y-- > 0;)
    for (auto row : reach[y]) {
      bool ok = false;
      transfer.successors(row, y + 1, [&](Row next, const auto&) { ok = ok || live[y + 1].count(next) > 0; });
      if (ok) live[y].insert(row);
    }
  if (live[0].empty()) return std::nullopt;

  std::mt19937_64 rng(seed);
  Mosaic m{width, height, rules, std::vector<std::int32_t>(width * height, kBlue)};
  std::int32_t next_id = 0;
  Row prev = 0;
  for (std::size_t y = 0; y < height; ++y) {
    std::vector<std::pair<Row, std::vector<Piece>>> options;
    transfer.successors(prev, y, [&](Row next, const std::vector<Piece>& pieces) {
      if (live[y].count(next)) options.emplace_back(next, pieces);
    });
    const auto& [row, pieces] = options[rng() % options.size()];
    for (const auto& p : pieces) {
      for (std::size_t dy = 0; dy < p.b; ++dy)
        for (std::size_t dx = 0; dx < p.a; ++dx) m.cells[(y + dy) * width + p.x + dx] = next_id;
      ++next_id;
    }
    prev = row;
  }
  return m;
}

class Backtracker {
 public:
  Backtracker(std::size_t width, std::size_t height, const MosaicRules& rules, std::uint64_t seed)
      : w_(width), h_(height), rules_(rules), rng_(seed), cells_(width * height, kUnset) {}

  std::optional<Mosaic> run(std::uint64_t budget) {
    struct Frame {
      std::size_t pos;
      std::vector<Piece> options;  // a = 0 stands for a blue cell
      std::size_t tried = 0;
      bool applied = false;
    };
    std::vector<Frame> stack;
    std::size_t pos = 0;
    std::uint64_t steps = 0;
    for (;;) {
      while (pos < cells_.size() && cells_[pos] != kUnset) ++pos;
      if (pos == cells_.size()) return Mosaic{w_, h_, rules_, cells_};
      Frame frame{pos, {}};
      const auto x = pos % w_, y = pos / w_;
      for (std::size_t a = 1; a <= rules_.k; ++a)
        for (std::size_t b = 1; b <= rules_.k; ++b)
          if (extent_ok(x, a, w_, rules_) && extent_ok(y, b, h_, rules_)) frame.options.push_back({x, a, b});
      std::shuffle(frame.options.begin(), frame.options.end(), rng_);
      // Blue cells constrain their whole neighbourhood, so they are tried first only a quarter of the time.
      auto blue_at = (rng_() & 3) == 0 ? frame.options.begin() : frame.options.end();
      frame.options.insert(blue_at, Piece{0, 0, 0});
      stack.push_back(std::move(frame));

      for (;;) {
        if (stack.empty()) return std::nullopt;
        auto& top = stack.back();
        if (top.applied) {
          undo(top.pos, top.options[top.tried - 1]);
          top.applied = false;
        }
        if (top.tried == top.options.size()) {
          stack.pop_back();
          continue;
        }
        if (++steps > budget) throw DomainError("generate_mosaic: search budget exhausted");
        const auto option = top.options[top.tried++];
        if (!apply(top.pos, option)) continue;
        if (forward_ok(top.pos)) {
          top.applied = true;
          pos = top.pos;
          break;
        }
        undo(top.pos, option);
      }
    }
  }

 private:
  static constexpr std::int32_t kUnset = -2;

  bool in_board(std::int64_t x, std::int64_t y) const {
    return x >= 0 && y >= 0 && x < static_cast<std::int64_t>(w_) && y < static_cast<std::int64_t>(h_);
  }
  std::int32_t& cell(std::int64_t x, std::int64_t y) {
    return cells_[static_cast<std::size_t>(y) * w_ + static_cast<std::size_t>(x)];
  }

  bool blue_ok(std::int64_t x, std::int64_t y) {
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (touches(dx, dy, rules_.adjacency) && in_board(x + dx, y + dy) && cell(x + dx, y + dy) == kBlue) return false;
    return true;
  }

  bool rect_free(std::int64_t x, std::int64_t y, std::size_t a, std::size_t b) {
    for (std::size_t dy = 0; dy < b; ++dy)
      for (std::size_t dx = 0; dx < a; ++dx)
        if (cell(x + static_cast<std::int64_t>(dx), y + static_cast<std::int64_t>(dy)) != kUnset) return false;
    return true;
  }

  bool apply(std::size_t pos, const Piece& p) {
    auto x = static_cast<std::int64_t>(pos % w_), y = static_cast<std::int64_t>(pos / w_);
    if (p.a == 0) {
      if (!blue_ok(x, y)) return false;
      cell(x, y) = kBlue;
      return true;
    }
    if (!rect_free(x, y, p.a, p.b)) return false;
    for (std::size_t dy = 0; dy < p.b; ++dy)
      for (std::size_t dx = 0; dx < p.a; ++dx) cell(x + static_cast<std::int64_t>(dx), y + static_cast<std::int64_t>(dy)) = next_id_;
    ++next_id_;
    return true;
  }

  void undo(std::size_t pos, const Piece& p) {
    auto x = static_cast<std::int64_t>(pos % w_), y = static_cast<std::int64_t>(pos / w_);
    if (p.a == 0) {
      cell(x, y) = kUnset;
      return;
    }
    --next_id_;
    for (std::size_t dy = 0; dy < p.b; ++dy)
      for (std::size_t dx = 0; dx < p.a; ++dx) cell(x + static_cast<std::int64_t>(dx), y + static_cast<std::int64_t>(dy)) = kUnset;
  }

  bool coverable(std::int64_t x, std::int64_t y) {
    const auto k = static_cast<std::int64_t>(rules_.k);
    for (std::int64_t ty = std::max<std::int64_t>(0, y - k + 1); ty <= y; ++ty)
      for (std::int64_t tx = std::max<std::int64_t>(0, x - k + 1); tx <= x; ++tx)
        for (std::size_t a = static_cast<std::size_t>(x - tx + 1); a <= rules_.k; ++a) {
          if (!extent_ok(static_cast<std::size_t>(tx), a, w_, rules_)) continue;
          for (std::size_t b = static_cast<std::size_t>(y - ty + 1); b <= rules_.k; ++b)
            if (extent_ok(static_cast<std::size_t>(ty), b, h_, rules_) && rect_free(tx, ty, a, b)) return true;
        }
    return false;
  }

  // Every unset cell near the last decision must still be fillable.
  bool forward_ok(std::size_t pos) {
    auto x0 = static_cast<std::int64_t>(pos % w_), y0 = static_cast<std::int64_t>(pos / w_);
    auto k = static_cast<std::int64_t>(rules_.k);
    for (std::int64_t y = y0; y <= y0 + k && y < static_cast<std::int64_t>(h_); ++y)
      for (std::int64_t x = x0 - k; x <= x0 + 2 * k; ++x) {
        if (!in_board(x, y) || cell(x, y) != kUnset) continue;
        if (!blue_ok(x, y) && !coverable(x, y)) return false;
      }
    return true;
  }

  std::size_t w_, h_;
  MosaicRules rules_;
  std::mt19937_64 rng_;
  std::vector<std::int32_t> cells_;
  std::int32_t next_id_ = 0;
};

}  // namespace

BigInt count_mosaics(std::size_t width, std::size_t height, const MosaicRules& rules) {
  check_rules(rules);
  if (width == 0 || height == 0) throw std::invalid_argument("count_mosaics: empty board");
  if (width > height) std::swap(width, height);
  if (width > kWidthCap)
    throw DomainError("count_mosaics: shorter side " + std::to_string(width) + " exceeds the width cap " +
                      std::to_string(kWidthCap));
  RowTransfer transfer(width, height, rules);
  std::unordered_map<Row, BigInt> counts{{0, BigInt(1)}};
  for (std::size_t y = 0; y < height; ++y) {
    std::unordered_map<Row, BigInt> next;
    for (const auto& [row, c] : counts) transfer.successors(row, y, [&](Row r, const auto&) { next[r] += c; });
    counts = std::move(next);
  }
  BigInt total = 0;
  for (const auto& [row, c] : counts)
    if (completes(row, width)) total += c;
  return total;
}

std::vector<EntropyEntry> entropy_profile(const std::vector<std::size_t>& widths, std::size_t height,
                                          const MosaicRules& rules) {
  std::vector<EntropyEntry> out;
  for (auto w : widths) {
    EntropyEntry e{w, height, count_mosaics(w, height, rules), std::nullopt};
    if (e.count > 0) e.entropy = log2_of(e.count) / static_cast<double>(w * height);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<EntropyEntry> square_entropy_profile(const std::vector<std::size_t>& sides, const MosaicRules& rules) {
  std::vector<EntropyEntry> out;
  for (auto s : sides) {
    auto row = entropy_profile({s}, s, rules);
    out.push_back(std::move(row.front()));
  }
  return out;
}

std::optional<Mosaic> generate_mosaic(std::size_t width, std::size_t height, const MosaicRules& rules,
                                      std::uint64_t seed, std::uint64_t budget) {
  check_rules(rules);
  if (width == 0 || height == 0) throw std::invalid_argument("generate_mosaic: empty board");
  if (width <= kWidthCap) return sample_by_rows(width, height, rules, seed);
  if (height <= kWidthCap) {
    auto t = sample_by_rows(height, width, rules, seed);
    if (!t) return std::nullopt;
    return transpose(*t);
  }
  // Restarts with growing step limits; an exhausted attempt says nothing about feasibility.
  std::uint64_t spent = 0;
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto limit = std::min<std::uint64_t>(budget - spent, std::uint64_t{20000} << std::min<std::uint64_t>(attempt, 20));
    try {
      return Backtracker(width, height, rules, seed + 0x9e3779b97f4a7c15ULL * attempt).run(limit);
    } catch (const DomainError&) {
      spent += limit;
      if (spent >= budget) throw;
    }
  }
}

std::vector<BlueSpin> spin_map(const Mosaic& m) {
  if (m.rules.k != 2) throw std::invalid_argument("spin_map: spins are defined for k = 2 only");
  std::vector<BlueSpin> out;
  for (std::size_t y = 0; y < m.height; ++y)
    for (std::size_t x = 0; x < m.width; ++x)
      if (m.blue(x, y)) out.push_back({x, y, (x + y) % 2 == 0 ? 1 : -1});
  return out;
}

double spin_imbalance(const Mosaic& m) {
  auto spins = spin_map(m);
  if (spins.empty()) return 0.0;
  long long total = 0;
  for (const auto& s : spins) total += s.spin;
  return static_cast<double>(std::llabs(total)) / static_cast<double>(spins.size());
}

void write_ppm(std::ostream& out, const Mosaic& m) {
  out << "P6\n" << m.width << ' ' << m.height << "\n255\n";
  const char red[3] = {static_cast<char>(255), 0, 0};
  const char blue[3] = {0, 0, static_cast<char>(255)};
  for (auto c : m.cells) out.write(c == kBlue ? blue : red, 3);
}

void render_ppm(const Mosaic& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("render_ppm: cannot open " + path);
  write_ppm(out, m);
  if (!out) throw std::runtime_error("render_ppm: write failed for " + path);
}

void write_entropy_csv(std::ostream& out, const std::vector<EntropyEntry>& entries) {
  out << "width,height,count,entropy\n";
  for (const auto& e : entries) {
    out << e.width << ',' << e.height << ',' << e.count << ',';
    if (e.entropy) out << *e.entropy;
    out << '\n';
  }
}

}  // namespace ergolab::mosaics
