#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/numeric.hpp"

/// Tilings of a w x h board by k x k red squares and 1 x 1 blue squares in
/// which no two blue squares touch.
namespace ergolab::mosaics {

enum class Adjacency { Eight, Four };

/// Free: every red tile is a whole k x k square inside the board.
/// Clipped: red tiles are k x k squares cut by the board, so a tile touching an
/// edge may show fewer than k rows or columns (the board is a window on a
/// tiling of the plane).
enum class Boundary { Free, Clipped };

struct MosaicRules {
  std::size_t k = 3;
  Adjacency adjacency = Adjacency::Eight;
  Boundary boundary = Boundary::Free;
};

constexpr std::int32_t kBlue = -1;

struct Mosaic {
  std::size_t width = 0;
  std::size_t height = 0;
  MosaicRules rules;
  /// Row-major; kBlue or the id of the red tile covering the cell.
  std::vector<std::int32_t> cells;

  std::int32_t at(std::size_t x, std::size_t y) const { return cells[y * width + x]; }
  bool blue(std::size_t x, std::size_t y) const { return at(x, y) == kBlue; }
  std::size_t blue_count() const;
};

/// Red cells of each id form one admissible tile and no two blue cells touch.
bool validate_mosaic(const Mosaic& mosaic);

/// Largest strip width handled by the row transfer matrix.
constexpr std::size_t kWidthCap = 20;

/// Exact number of tilings; the transfer runs along the longer side, so the
/// shorter side must not exceed kWidthCap (DomainError otherwise).
BigInt count_mosaics(std::size_t width, std::size_t height, const MosaicRules& rules);
inline BigInt count_mosaics(std::size_t width, std::size_t height, std::size_t k) {
  return count_mosaics(width, height, MosaicRules{k});
}

struct EntropyEntry {
  std::size_t width = 0;
  std::size_t height = 0;
  BigInt count;
  /// log2(count) / (w h); absent when there is no tiling.
  std::optional<double> entropy;
};

std::vector<EntropyEntry> entropy_profile(const std::vector<std::size_t>& widths, std::size_t height,
                                          const MosaicRules& rules);
/// Square boards side x side for each listed side.
std::vector<EntropyEntry> square_entropy_profile(const std::vector<std::size_t>& sides, const MosaicRules& rules);

/// A random tiling, or nullopt when the board admits none. Boards whose shorter
/// side fits the transfer matrix are sampled row by row among completable rows;
/// larger boards use randomized backtracking limited by `budget` steps, and
/// exhausting the budget throws DomainError.
std::optional<Mosaic> generate_mosaic(std::size_t width, std::size_t height, const MosaicRules& rules,
                                      std::uint64_t seed, std::uint64_t budget = 50'000'000);

struct BlueSpin {
  std::size_t x = 0;
  std::size_t y = 0;
  int spin = 0;
};

/// +1 on blue cells with x + y even, -1 otherwise. Requires k = 2.
std::vector<BlueSpin> spin_map(const Mosaic& mosaic);
/// |#(+1) - #(-1)| / #blue, or 0 without blue cells.
double spin_imbalance(const Mosaic& mosaic);

/// Binary PPM: red (255,0,0), blue (0,0,255); the first image row is y = 0.
void write_ppm(std::ostream& out, const Mosaic& mosaic);
void render_ppm(const Mosaic& mosaic, const std::string& path);

void write_entropy_csv(std::ostream& out, const std::vector<EntropyEntry>& entries);

}  // namespace ergolab::mosaics
