#include <sstream>

#include "doctest.h"
#include "ergolab/error.hpp"
#include "ergolab/mosaics.hpp"
#include "oracles.hpp"

using namespace ergolab;
using namespace ergolab::mosaics;

using oracle::brute_count;

TEST_CASE("anchor counts") {
  CHECK(count_mosaics(3, 3, 3) == 1);
  CHECK(count_mosaics(4, 4, 3) == 0);
  CHECK(count_mosaics(2, 2, 2) == 1);
  CHECK(count_mosaics(1, 1, 2) == 1);
  CHECK(count_mosaics(1, 1, 3) == 1);
  CHECK_THROWS_AS(count_mosaics(3, 3, 4), std::invalid_argument);
  CHECK_THROWS_AS(count_mosaics(21, 30, 2), DomainError);
}

TEST_CASE("transfer matrix equals exhaustive enumeration") {
  for (auto boundary : {Boundary::Free, Boundary::Clipped})
    for (auto adjacency : {Adjacency::Eight, Adjacency::Four})
      for (std::size_t k : {2, 3}) {
        MosaicRules rules{k, adjacency, boundary};
        for (std::size_t w = 1; w <= 6; ++w)
          for (std::size_t h = 1; h <= 6; ++h) CHECK(count_mosaics(w, h, rules) == brute_count(w, h, rules));
      }
}

TEST_CASE("counts are symmetric under transposition") {
  MosaicRules rules{2, Adjacency::Eight, Boundary::Clipped};
  for (std::size_t w = 1; w <= 9; ++w)
    for (std::size_t h = 1; h <= 9; ++h) CHECK(count_mosaics(w, h, rules) == count_mosaics(h, w, rules));
}

TEST_CASE("single column counts") {
  // A clipped column: blue cells never adjacent, red runs of length k, or
  // shorter runs at either end.
  for (std::size_t k : {2, 3}) {
    MosaicRules clipped{k, Adjacency::Eight, Boundary::Clipped};
    for (std::size_t h = 1; h <= 14; ++h) {
      std::vector<std::vector<long long>> f(h + 1, std::vector<long long>(2, 0));  // f[i][last is blue]
      f[0][0] = 1;
      for (std::size_t i = 0; i < h; ++i)
        for (int last = 0; last < 2; ++last) {
          if (!f[i][last]) continue;
          if (!last) f[i + 1][1] += f[i][last];
          for (std::size_t len = 1; len <= k && i + len <= h; ++len)
            if (len == k || i == 0 || i + len == h) f[i + len][0] += f[i][last];
        }
      CHECK(count_mosaics(1, h, clipped) == f[h][0] + f[h][1]);
      CHECK(count_mosaics(1, h, k) == (h == 1 ? 1 : 0));
    }
  }
}

TEST_CASE("entropy profiles") {
  auto free3 = square_entropy_profile({3, 6, 12}, MosaicRules{3});
  for (const auto& e : free3) {
    REQUIRE(e.entropy);
    CHECK(*e.entropy == 0.0);
  }
  auto clipped3 = square_entropy_profile({2, 4, 8}, MosaicRules{3, Adjacency::Eight, Boundary::Clipped});
  for (std::size_t i = 1; i < clipped3.size(); ++i) CHECK(*clipped3[i].entropy <= *clipped3[i - 1].entropy);
  auto none = entropy_profile({4}, 4, MosaicRules{3});
  CHECK(none[0].count == 0);
  CHECK_FALSE(none[0].entropy);

  std::ostringstream csv;
  write_entropy_csv(csv, free3);
  CHECK(csv.str() == "width,height,count,entropy\n3,3,1,0\n6,6,1,0\n12,12,1,0\n");
}

TEST_CASE("generated mosaics are valid") {
  CHECK(generate_mosaic(3, 3, MosaicRules{3}, 1)->blue_count() == 0);
  CHECK_FALSE(generate_mosaic(4, 4, MosaicRules{3}, 1));
  for (std::size_t k : {2, 3}) {
    auto one = generate_mosaic(1, 1, MosaicRules{k}, 5);
    REQUIRE(one);
    CHECK(one->blue(0, 0));
  }
  for (auto boundary : {Boundary::Free, Boundary::Clipped})
    for (std::size_t k : {2, 3})
      for (std::uint64_t seed = 0; seed < 5; ++seed)
        for (auto [w, h] : {std::pair<std::size_t, std::size_t>{6, 6}, {12, 7}, {30, 9}, {9, 30}, {24, 24}}) {
          MosaicRules rules{k, Adjacency::Eight, boundary};
          auto m = generate_mosaic(w, h, rules, seed);
          if (std::min(w, h) <= kWidthCap) CHECK(m.has_value() == (count_mosaics(w, h, rules) > 0));
          if (!m) continue;
          CHECK(m->width == w);
          CHECK(m->height == h);
          CHECK(validate_mosaic(*m));
        }
  auto a = generate_mosaic(40, 40, MosaicRules{2, Adjacency::Eight, Boundary::Clipped}, 3);
  auto b = generate_mosaic(40, 40, MosaicRules{2, Adjacency::Eight, Boundary::Clipped}, 3);
  REQUIRE(a);
  CHECK(validate_mosaic(*a));
  CHECK(a->cells == b->cells);
}

TEST_CASE("validator rejects broken mosaics") {
  Mosaic m{3, 3, MosaicRules{3}, std::vector<std::int32_t>(9, 0)};
  CHECK(validate_mosaic(m));
  m.cells[8] = kBlue;
  CHECK_FALSE(validate_mosaic(m));
  Mosaic blues{3, 1, MosaicRules{2}, {kBlue, kBlue, kBlue}};
  CHECK_FALSE(validate_mosaic(blues));
  Mosaic corner{2, 2, MosaicRules{2}, {kBlue, 0, 1, kBlue}};
  CHECK_FALSE(validate_mosaic(corner));
  corner.rules.adjacency = Adjacency::Four;
  corner.rules.boundary = Boundary::Clipped;
  CHECK(validate_mosaic(corner));
}

TEST_CASE("spins") {
  Mosaic m{3, 2, MosaicRules{2}, {kBlue, 0, 0, 1, 0, kBlue}};
  auto spins = spin_map(m);
  REQUIRE(spins.size() == 2);
  CHECK(spins[0].spin == 1);
  CHECK(spins[1].spin == -1);
  Mosaic single{3, 2, MosaicRules{2}, {0, 0, 1, 0, 0, kBlue}};
  CHECK(spin_map(single)[0].spin == -1);
  CHECK(spin_imbalance(m) == 0.0);
  CHECK_THROWS_AS(spin_map(Mosaic{3, 3, MosaicRules{3}, std::vector<std::int32_t>(9, 0)}), std::invalid_argument);

  auto big = generate_mosaic(64, 64, MosaicRules{2, Adjacency::Eight, Boundary::Clipped}, 7);
  REQUIRE(big);
  CHECK(validate_mosaic(*big));
  auto d = spin_imbalance(*big);
  CHECK(d >= 0.0);
  CHECK(d <= 1.0);
  CHECK(d == spin_imbalance(*generate_mosaic(64, 64, MosaicRules{2, Adjacency::Eight, Boundary::Clipped}, 7)));
}

TEST_CASE("ppm output") {
  std::ostringstream blue;
  write_ppm(blue, Mosaic{1, 1, MosaicRules{2}, {kBlue}});
  CHECK(blue.str() == std::string("P6\n1 1\n255\n") + std::string("\0\0\xff", 3));
  std::ostringstream red;
  write_ppm(red, Mosaic{3, 3, MosaicRules{3}, std::vector<std::int32_t>(9, 0)});
  std::string body = red.str().substr(std::string("P6\n3 3\n255\n").size());
  CHECK(body.size() == 27);
  for (std::size_t i = 0; i < body.size(); i += 3) CHECK(body.substr(i, 3) == std::string("\xff\0\0", 3));
}
