#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

/// Harmonic GF(2) fields on a cylinder: x wraps modulo the width, y runs over
/// rows 0..m-1 with a free boundary. Value 1 is drawn white.
namespace ergolab::ledrappier {

class HarmonicField {
 public:
  HarmonicField(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  /// x is taken modulo the width; y must lie in [0, height).
  std::uint8_t at(std::int64_t x, std::size_t y) const { return cells_[y * width_ + wrap(x)]; }
  void set(std::int64_t x, std::size_t y, std::uint8_t v) { cells_[y * width_ + wrap(x)] = v & 1; }
  void flip(std::int64_t x, std::size_t y) { cells_[y * width_ + wrap(x)] ^= 1; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::size_t white_count() const;

  friend bool operator==(const HarmonicField&, const HarmonicField&) = default;

 private:
  std::size_t wrap(std::int64_t x) const {
    auto w = static_cast<std::int64_t>(width_);
    auto r = x % w;
    return static_cast<std::size_t>(r < 0 ? r + w : r);
  }

  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> cells_;
};

/// Fills rows 2.. from rows 0 and 1 by h(x,y+1) = h(x,y) + h(x-1,y) + h(x+1,y) + h(x,y-1).
void propagate(HarmonicField& field);

/// Rows 0 and 1 uniform from the seed, the rest propagated. Needs n >= 3, m >= 2.
HarmonicField sample_field(std::size_t width, std::size_t height, std::uint64_t seed);

/// The relation at every row 1..m-2.
bool verify_harmonicity(const HarmonicField& field);

/// h(x,y) = h(x±2^k,y) + h(x,y±2^k) wherever both vertical partners exist.
/// Throws std::invalid_argument unless 2^k < min(n, m) / 2.
bool power_identity_check(const HarmonicField& field, unsigned k);

/// Cellwise sum over GF(2); sizes must match.
HarmonicField xor_fields(const HarmonicField& a, const HarmonicField& b);

enum class Heading { Up, Down, Left, Right };

struct Cell {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Turn symbols: -1 ahead-left, 0 ahead, +1 ahead-right. The heading never
/// changes; only the three cells one step ahead are candidates.
struct ThreadTrace {
  Cell start;
  Heading heading = Heading::Up;
  std::vector<int> symbols;
  std::vector<Cell> path;
  std::size_t length() const { return symbols.size(); }
};

/// Walks white cells, preferring ahead, then ahead-right, then ahead-left.
/// Stops when no candidate is white, when the step would leave the rows, or
/// when it would revisit a cell. Throws std::invalid_argument for a black start.
ThreadTrace trace_thread(const HarmonicField& field, Cell start, Heading heading);

struct ThreadStatistics {
  std::size_t samples = 0;
  std::size_t max_len = 0;
  /// Cells on the longest trace over all white cells.
  double coverage_fraction = 0.0;
  std::uint64_t seed = 0;
};

/// Traces upward from `samples` seeded random white cells.
ThreadStatistics thread_statistics(const HarmonicField& field, std::size_t samples, std::uint64_t seed);

std::string statistics_json(const ThreadStatistics& stats);
void write_trace_csv(std::ostream& out, const ThreadTrace& trace);

/// Binary PGM, white = 255; the first image row is the highest y.
void write_pgm(std::ostream& out, const HarmonicField& field);
void render_pgm(const HarmonicField& field, const std::string& path);

}  // namespace ergolab::ledrappier
