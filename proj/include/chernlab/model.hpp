#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "chernlab/lattice.hpp"
#include "chernlab/types.hpp"

namespace chernlab {

enum class ModelKind { two_band_chern, atomic_limit };
enum class Boundary { open, periodic };

/// Parameters of the concrete lattice insulators realized here: the two-band
/// Chern model (topological for 0 < |u| < 2, trivial for |u| > 2) and the
/// hopping-free atomic limit with orbital energies -g/2, +g/2.
struct ModelSpec {
  ModelKind kind = ModelKind::two_band_chern;
  double mass_u = 3.0;
  double disorder_strength = 0.0;  // W >= 0
  std::uint64_t seed = 0;
  Boundary boundary = Boundary::open;
  double atomic_gap = 2.0;  // g > 0, atomic limit only

  void validate() const {
    if (disorder_strength < 0.0) {
      throw std::invalid_argument("ModelSpec: disorder strength W must be >= 0");
    }
    if (kind == ModelKind::atomic_limit && atomic_gap <= 0.0) {
      throw std::invalid_argument("ModelSpec: atomic gap g must be > 0");
    }
  }
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits of a mt19937_64 draw.
inline double uniform_unit(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

/// One i.i.d. on-site shift per site, uniform on [-W/2, W/2), drawn in linear
/// site order from a generator seeded directly with spec.seed.
inline RealVector onsite_disorder(const LatticeIndexing& idx, double strength,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RealVector w(idx.n_sites());
  for (Eigen::Index s = 0; s < idx.n_sites(); ++s) {
    w[s] = strength * (uniform_unit(rng) - 0.5);
  }
  return w;
}

}  // namespace detail

/// Two-band Chern insulator on the centered box. On-site u*sigma_z + w(m),
/// hopping (sigma_z - i sigma_x)/2 along e1 and (sigma_z - i sigma_y)/2 along
/// e2 plus Hermitian conjugates; Bloch form sin k1 sigma_x + sin k2 sigma_y +
/// (u + cos k1 + cos k2) sigma_z.
inline HermitianOperator build_two_band(const LatticeIndexing& idx,
                                        const ModelSpec& spec) {
  spec.validate();
  if (spec.kind != ModelKind::two_band_chern) {
    throw std::invalid_argument("build_two_band: spec.kind must be two_band_chern");
  }
  if (idx.orbitals_per_site != 2) {
    throw std::invalid_argument("build_two_band: requires q = 2 orbitals per site");
  }

  const int n = idx.half_width;
  const Complex i_unit(0.0, 1.0);
  Matrix h = Matrix::Zero(idx.total_dim(), idx.total_dim());

  const RealVector w =
      detail::onsite_disorder(idx, spec.disorder_strength, spec.seed);

  // Hopping blocks on the bond m -> m + e_a, placed at <m+e_a| H |m>.
  Eigen::Matrix2cd hop_x, hop_y;
  hop_x << 0.5, -0.5 * i_unit, -0.5 * i_unit, -0.5;           // (sz - i sx)/2
  hop_y << 0.5, -0.5, 0.5, -0.5;                              // (sz - i sy)/2

  for (int m1 = -n; m1 < n; ++m1) {
    for (int m2 = -n; m2 < n; ++m2) {
      const Site m{m1, m2};
      const Eigen::Index a = idx.index_of(m, 0);
      const double onsite = w[a / 2];
      h(a, a) = spec.mass_u + onsite;
      h(a + 1, a + 1) = -spec.mass_u + onsite;

      auto add_hop = [&](Site to, const Eigen::Matrix2cd& block) {
        const Eigen::Index b = idx.index_of(to, 0);
        h.block<2, 2>(b, a) += block;
        h.block<2, 2>(a, b) += block.adjoint();
      };

      Site right{m1 + 1, m2};
      if (idx.contains(right)) {
        add_hop(right, hop_x);
      } else if (spec.boundary == Boundary::periodic) {
        add_hop(Site{-n, m2}, hop_x);
      }
      Site up{m1, m2 + 1};
      if (idx.contains(up)) {
        add_hop(up, hop_y);
      } else if (spec.boundary == Boundary::periodic) {
        add_hop(Site{m1, -n}, hop_y);
      }
    }
  }
  return HermitianOperator(std::move(h));
}

/// Atomic-limit insulator: H(m) = diag(-g/2 + w(m), +g/2 + w(m)), no hopping.
/// The disorder must respect |w| <= g/4 so the gap at E_F = 0 survives.
inline HermitianOperator build_atomic(const LatticeIndexing& idx,
                                      const ModelSpec& spec) {
  spec.validate();
  if (spec.kind != ModelKind::atomic_limit) {
    throw std::invalid_argument("build_atomic: spec.kind must be atomic_limit");
  }
  if (idx.orbitals_per_site != 2) {
    throw std::invalid_argument("build_atomic: requires q = 2 orbitals per site");
  }
  if (spec.disorder_strength > spec.atomic_gap / 2.0) {
    throw std::invalid_argument(
        "build_atomic: W > g/2 would violate the |w| <= g/4 disorder bound");
  }

  Matrix h = Matrix::Zero(idx.total_dim(), idx.total_dim());
  const RealVector w =
      detail::onsite_disorder(idx, spec.disorder_strength, spec.seed);
  for (Eigen::Index s = 0; s < idx.n_sites(); ++s) {
    h(2 * s, 2 * s) = -spec.atomic_gap / 2.0 + w[s];
    h(2 * s + 1, 2 * s + 1) = spec.atomic_gap / 2.0 + w[s];
  }
  return HermitianOperator(std::move(h));
}

/// Dispatch on spec.kind.
inline HermitianOperator build_model(const LatticeIndexing& idx,
                                     const ModelSpec& spec) {
  return spec.kind == ModelKind::two_band_chern ? build_two_band(idx, spec)
                                                : build_atomic(idx, spec);
}

}  // namespace chernlab
