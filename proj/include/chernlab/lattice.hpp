#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace chernlab {

/// Lattice site m = (m1, m2) on the centered square box {-N, ..., N-1}^2.
struct Site {
  int m1 = 0;
  int m2 = 0;

  friend bool operator==(const Site&, const Site&) = default;
};

/// Bijection between (site m, orbital j) and the linear matrix index.
/// Sites live on {-N, ..., N-1}^2 (half-open box matching chi_L = [-L, L)^2),
/// orbitals are the fastest-running index.
struct LatticeIndexing {
  int half_width = 1;      // N
  int orbitals_per_site = 2;  // q

  LatticeIndexing(int half_width_, int orbitals_)
      : half_width(half_width_), orbitals_per_site(orbitals_) {
    if (half_width < 1) throw std::invalid_argument("LatticeIndexing: N must be positive");
    if (orbitals_per_site < 1) {
      throw std::invalid_argument("LatticeIndexing: q must be positive");
    }
  }

  int side() const { return 2 * half_width; }
  Eigen::Index n_sites() const { return Eigen::Index(side()) * side(); }
  Eigen::Index total_dim() const { return n_sites() * orbitals_per_site; }

  bool contains(Site m) const {
    return m.m1 >= -half_width && m.m1 < half_width && m.m2 >= -half_width &&
           m.m2 < half_width;
  }

  Eigen::Index index_of(Site m, int orbital) const {
    if (!contains(m)) {
      throw std::out_of_range("LatticeIndexing: site (" + std::to_string(m.m1) +
                              "," + std::to_string(m.m2) + ") outside box");
    }
    if (orbital < 0 || orbital >= orbitals_per_site) {
      throw std::out_of_range("LatticeIndexing: orbital out of range");
    }
    const Eigen::Index row = m.m1 + half_width;
    const Eigen::Index col = m.m2 + half_width;
    return (row * side() + col) * orbitals_per_site + orbital;
  }

  std::pair<Site, int> site_of(Eigen::Index index) const {
    if (index < 0 || index >= total_dim()) {
      throw std::out_of_range("LatticeIndexing: linear index out of range");
    }
    const int orbital = int(index % orbitals_per_site);
    const Eigen::Index site = index / orbitals_per_site;
    Site m{int(site / side()) - half_width, int(site % side()) - half_width};
    return {m, orbital};
  }
};

}  // namespace chernlab
