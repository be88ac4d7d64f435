#pragma once

#include <cstdint>
#include <vector>

#include "ergolab/dynamics.hpp"
#include "ergolab/mosaics.hpp"

// Independent brute-force references shared by the unit and acceptance tests.
namespace oracle {

using ergolab::Atom;
namespace mosaics = ergolab::mosaics;

// Walks T^{-1} step by step instead of using the cycle index.
inline std::size_t brute_triple(const std::vector<Atom>& map, const std::vector<char>& a, const std::vector<char>& a1,
                                const std::vector<char>& a2, std::int64_t i, std::int64_t j) {
  const auto n = map.size();
  std::vector<Atom> inv(n);
  for (std::size_t x = 0; x < n; ++x) inv[map[x]] = static_cast<Atom>(x);
  auto back = [&](Atom x, std::int64_t k) {
    if (k >= 0)
      for (std::int64_t s = 0; s < k; ++s) x = inv[x];
    else
      for (std::int64_t s = 0; s < -k; ++s) x = map[x];
    return x;
  };
  std::size_t count = 0;
  for (std::size_t x = 0; x < n; ++x)
    if (a[x] && a1[back(static_cast<Atom>(x), i)] && a2[back(static_cast<Atom>(x), j)]) ++count;
  return count;
}

// Exhaustive enumeration: the first empty cell in scanline order is either
// blue or the top-left corner of a tile. Complete boards are checked for blue
// contacts; partial ones only against cells already placed.
struct Enumerator {
  std::size_t w, h, k;
  bool clipped;
  bool eight;
  std::vector<int> grid;  // -2 empty, -1 blue, otherwise tile id
  long long count = 0;

  bool side_ok(std::size_t start, std::size_t len, std::size_t size) const {
    if (start + len > size) return false;
    if (len == k) return true;
    return clipped && len < k && (start == 0 || start + len == size);
  }

  bool blues_apart() const {
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        if (grid[y * w + x] != -1) continue;
        if (x + 1 < w && grid[y * w + x + 1] == -1) return false;
        if (y + 1 < h && grid[(y + 1) * w + x] == -1) return false;
        if (eight && y + 1 < h && x + 1 < w && grid[(y + 1) * w + x + 1] == -1) return false;
        if (eight && y + 1 < h && x > 0 && grid[(y + 1) * w + x - 1] == -1) return false;
      }
    return true;
  }

  void run(int next_id) {
    std::size_t pos = 0;
    while (pos < grid.size() && grid[pos] != -2) ++pos;
    if (pos == grid.size()) {
      count += blues_apart();
      return;
    }
    const auto x = pos % w, y = pos / w;
    bool lonely = !(x > 0 && grid[pos - 1] == -1) && !(y > 0 && grid[pos - w] == -1) &&
                  !(eight && y > 0 && x > 0 && grid[pos - w - 1] == -1) &&
                  !(eight && y > 0 && x + 1 < w && grid[pos - w + 1] == -1);
    if (lonely) {
      grid[pos] = -1;
      run(next_id);
      grid[pos] = -2;
    }
    for (std::size_t a = 1; a <= k; ++a)
      for (std::size_t b = 1; b <= k; ++b) {
        if (!side_ok(x, a, w) || !side_ok(y, b, h)) continue;
        bool free = true;
        for (std::size_t dy = 0; dy < b; ++dy)
          for (std::size_t dx = 0; dx < a; ++dx) free &= grid[(y + dy) * w + x + dx] == -2;
        if (!free) continue;
        for (std::size_t dy = 0; dy < b; ++dy)
          for (std::size_t dx = 0; dx < a; ++dx) grid[(y + dy) * w + x + dx] = next_id;
        run(next_id + 1);
        for (std::size_t dy = 0; dy < b; ++dy)
          for (std::size_t dx = 0; dx < a; ++dx) grid[(y + dy) * w + x + dx] = -2;
      }
  }
};

inline long long brute_count(std::size_t w, std::size_t h, const mosaics::MosaicRules& r) {
  Enumerator e{w, h, r.k, r.boundary == mosaics::Boundary::Clipped, r.adjacency == mosaics::Adjacency::Eight,
               std::vector<int>(w * h, -2)};
  e.run(0);
  return e.count;
}

}  // namespace oracle
