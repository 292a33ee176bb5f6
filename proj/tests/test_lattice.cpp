#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "chernlab/lattice.hpp"

using chernlab::LatticeIndexing;
using chernlab::Site;

TEST_CASE("lattice_total_dim") {
  CHECK(LatticeIndexing(1, 2).total_dim() == 8);
  CHECK(LatticeIndexing(4, 2).total_dim() == 128);
  CHECK(LatticeIndexing(3, 1).total_dim() == 36);
}

TEST_CASE("lattice_index_bijection_round_trip") {
  for (const LatticeIndexing idx : {LatticeIndexing(3, 2), LatticeIndexing(2, 1)}) {
    std::set<Eigen::Index> seen;
    for (int m1 = -idx.half_width; m1 < idx.half_width; ++m1) {
      for (int m2 = -idx.half_width; m2 < idx.half_width; ++m2) {
        for (int j = 0; j < idx.orbitals_per_site; ++j) {
          const Eigen::Index index = idx.index_of(Site{m1, m2}, j);
          REQUIRE(index >= 0);
          REQUIRE(index < idx.total_dim());
          seen.insert(index);
          const auto [site, orbital] = idx.site_of(index);
          CHECK(site == Site{m1, m2});
          CHECK(orbital == j);
        }
      }
    }
    CHECK(Eigen::Index(seen.size()) == idx.total_dim());
  }
}

TEST_CASE("lattice_box_is_half_open") {
  const LatticeIndexing idx(3, 2);
  CHECK(idx.contains(Site{-3, -3}));
  CHECK(idx.contains(Site{2, 2}));
  CHECK(!idx.contains(Site{3, 0}));
  CHECK(!idx.contains(Site{0, -4}));
}

TEST_CASE("lattice_errors") {
  const LatticeIndexing idx(2, 2);
  CHECK_THROWS_AS(idx.index_of(Site{2, 0}, 0), std::out_of_range);
  CHECK_THROWS_AS(idx.index_of(Site{0, 0}, 2), std::out_of_range);
  CHECK_THROWS_AS(idx.site_of(-1), std::out_of_range);
  CHECK_THROWS_AS(idx.site_of(idx.total_dim()), std::out_of_range);
  CHECK_THROWS_AS(LatticeIndexing(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(LatticeIndexing(2, 0), std::invalid_argument);
}
