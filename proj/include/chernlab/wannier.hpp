#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chernlab/lattice.hpp"
#include "chernlab/spectral.hpp"
#include "chernlab/types.hpp"

namespace chernlab {

/// Relabeled index (m, j): unit square S_m containing the center, degeneracy
/// slot j in {1, ..., M}.
struct LatticeLabel {
  int m1 = 0;
  int m2 = 0;
  int j = 1;

  int max_norm() const { return std::max(std::abs(m1), std::abs(m2)); }
  friend bool operator==(const LatticeLabel&, const LatticeLabel&) = default;
};

/// Generalized Wannier basis: orthonormal columns spanning range(P), one
/// center point per function, and (after relabeling) lattice labels.
struct WannierBasis {
  Matrix functions;                       // dim x count, orthonormal columns
  std::vector<Eigen::Vector2d> centers;   // one per column
  std::optional<std::vector<LatticeLabel>> labels;
  int degeneracy = 1;                     // M

  Eigen::Index count() const { return functions.cols(); }
  Eigen::Index dim() const { return functions.rows(); }
  bool relabeled() const { return labels.has_value(); }
};

/// 2s-moment of |psi|^2 about mu with the Japanese bracket:
/// sum_x (|x - mu|^2 + 1)^s |psi(x)|^2. Always >= 1 for normalized psi.
inline double moment(const ComplexVector& psi, const Eigen::Vector2d& mu, double s,
                     const LatticeIndexing& idx) {
  if (psi.size() != idx.total_dim()) {
    throw std::invalid_argument("moment: dimension mismatch");
  }
  if (s <= 0.0) throw std::invalid_argument("moment: s must be positive");
  if (std::abs(psi.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("moment: input must be normalized");
  }
  double value = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double w = std::norm(psi[i]);
    if (w == 0.0) continue;
    const auto [site, orbital] = idx.site_of(i);
    const double dx = site.m1 - mu[0], dy = site.m2 - mu[1];
    value += std::pow(dx * dx + dy * dy + 1.0, s) * w;
  }
  return value;
}

/// Generalized Wannier basis by the projected-position method: diagonalize
/// V^dag X V on range(P), split the spectrum into clusters separated by more
/// than cluster_tol, then diagonalize the projected Y within each cluster.
/// Center points are the position expectations.
inline WannierBasis build_gwb_pxp(const Projector& p, const DiagonalOperator& x,
                                  const DiagonalOperator& y, double cluster_tol) {
  if (cluster_tol <= 0.0) {
    throw std::invalid_argument("build_gwb_pxp: cluster_tol must be positive");
  }
  if (x.dim() != p.dim() || y.dim() != p.dim()) {
    throw std::invalid_argument("build_gwb_pxp: operator dimension mismatch");
  }
  const Eigen::Index rank = p.rank();
  WannierBasis basis;
  basis.functions.resize(p.dim(), rank);
  basis.centers.reserve(rank);
  if (rank == 0) return basis;

  const Matrix& v = p.range_basis();
  const Matrix xv = x.diag.cast<Complex>().asDiagonal() * v;
  Matrix projected_x = v.adjoint() * xv;
  projected_x = (projected_x + projected_x.adjoint()) / 2.0;
  const EighResult ex = eigh(projected_x);
  const Matrix u = v * ex.eigenvectors;

  // Position eigenvalues span [-N, N); the degenerate-clustering guard caps
  // cluster sizes at 8N members.
  const Eigen::Index max_cluster =
      8 * Eigen::Index(std::llround(x.diag.cwiseAbs().maxCoeff()));

  Eigen::Index written = 0;
  Eigen::Index begin = 0;
  while (begin < rank) {
    Eigen::Index end = begin + 1;
    while (end < rank &&
           ex.eigenvalues[end] - ex.eigenvalues[end - 1] <= cluster_tol) {
      ++end;
    }
    const Eigen::Index size = end - begin;
    if (size > max_cluster) {
      throw std::runtime_error(
          "build_gwb_pxp: cluster of " + std::to_string(size) +
          " members signals cluster_tol too large");
    }
    const auto block = u.middleCols(begin, size);
    Matrix columns;
    if (size == 1) {
      columns = block;
    } else {
      const Matrix yb = y.diag.cast<Complex>().asDiagonal() * block;
      Matrix projected_y = block.adjoint() * yb;
      projected_y = (projected_y + projected_y.adjoint()) / 2.0;
      const EighResult ey = eigh(projected_y);
      columns = block * ey.eigenvectors;
    }
    for (Eigen::Index c = 0; c < size; ++c) {
      const ComplexVector psi = columns.col(c);
      const RealVector density = psi.cwiseAbs2();
      basis.functions.col(written++) = psi;
      basis.centers.emplace_back(x.diag.dot(density), y.diag.dot(density));
    }
    begin = end;
  }
  return basis;
}

/// Exact bounded-density constant M = sup_x #{alpha : mu_alpha in B_1(x)}
/// (open unit ball). The supremum over x is attained on the finite candidate
/// set of centers, midpoints of center pairs closer than 2, and circumcenters
/// of center triples with circumradius < 1 (minimum-enclosing-circle centers).
inline int bounded_density(const std::vector<Eigen::Vector2d>& centers) {
  if (centers.empty()) {
    throw std::invalid_argument("bounded_density: empty center list");
  }

  struct CellHash {
    std::size_t operator()(const std::pair<long, long>& c) const {
      return std::hash<long>()(c.first * 1000003L ^ c.second);
    }
  };
  std::unordered_map<std::pair<long, long>, std::vector<std::size_t>, CellHash> grid;
  auto cell_of = [](const Eigen::Vector2d& p) {
    return std::pair<long, long>{long(std::floor(p[0])), long(std::floor(p[1]))};
  };
  for (std::size_t i = 0; i < centers.size(); ++i) {
    grid[cell_of(centers[i])].push_back(i);
  }
  auto near = [&](const Eigen::Vector2d& p, double radius) {
    std::vector<std::size_t> out;
    const auto [cx, cy] = cell_of(p);
    const long reach = long(std::ceil(radius)) + 1;
    for (long a = cx - reach; a <= cx + reach; ++a) {
      for (long b = cy - reach; b <= cy + reach; ++b) {
        if (auto it = grid.find({a, b}); it != grid.end()) {
          for (std::size_t i : it->second) {
            if ((centers[i] - p).norm() < radius) out.push_back(i);
          }
        }
      }
    }
    return out;
  };
  auto count_in_unit_ball = [&](const Eigen::Vector2d& p) {
    return int(near(p, 1.0).size());
  };

  int best = 0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    best = std::max(best, count_in_unit_ball(centers[i]));
    const auto neighbors = near(centers[i], 2.0);
    for (std::size_t a = 0; a < neighbors.size(); ++a) {
      const std::size_t j = neighbors[a];
      if (j <= i) continue;
      best = std::max(best,
                      count_in_unit_ball((centers[i] + centers[j]) / 2.0));
      for (std::size_t b = a + 1; b < neighbors.size(); ++b) {
        const std::size_t k = neighbors[b];
        if (k <= i || (centers[j] - centers[k]).norm() >= 2.0) continue;
        const Eigen::Vector2d& pa = centers[i];
        const Eigen::Vector2d& pb = centers[j];
        const Eigen::Vector2d& pc = centers[k];
        const double det = 2.0 * (pa[0] * (pb[1] - pc[1]) + pb[0] * (pc[1] - pa[1]) +
                                  pc[0] * (pa[1] - pb[1]));
        if (std::abs(det) < 1e-12) continue;
        const double na = pa.squaredNorm(), nb = pb.squaredNorm(), nc = pc.squaredNorm();
        const Eigen::Vector2d cc(
            (na * (pb[1] - pc[1]) + nb * (pc[1] - pa[1]) + nc * (pa[1] - pb[1])) / det,
            (na * (pc[0] - pb[0]) + nb * (pa[0] - pc[0]) + nc * (pb[0] - pa[0])) / det);
        if ((cc - pa).norm() < 1.0) best = std::max(best, count_in_unit_ball(cc));
      }
    }
  }
  return best;
}

/// Assign each function to the half-open unit square S_m containing its
/// center, take m as the new center point, and record the degeneracy M.
/// Squares with fewer members are conceptually padded with zero functions;
/// those carry no data and are simply absent here.
inline WannierBasis relabel_to_lattice(const WannierBasis& basis) {
  for (const auto& mu : basis.centers) {
    if (!std::isfinite(mu[0]) || !std::isfinite(mu[1])) {
      throw std::invalid_argument("relabel_to_lattice: non-finite center");
    }
  }
  WannierBasis out = basis;
  std::vector<LatticeLabel> labels(basis.count());
  std::map<std::pair<int, int>, int> occupancy;
  for (Eigen::Index c = 0; c < basis.count(); ++c) {
    const int m1 = int(std::floor(basis.centers[c][0] + 0.5));
    const int m2 = int(std::floor(basis.centers[c][1] + 0.5));
    const int slot = ++occupancy[{m1, m2}];
    labels[c] = LatticeLabel{m1, m2, slot};
    out.centers[c] = Eigen::Vector2d(m1, m2);
  }
  int degeneracy = 1;
  for (const auto& [square, n] : occupancy) degeneracy = std::max(degeneracy, n);
  out.labels = std::move(labels);
  out.degeneracy = degeneracy;
  return out;
}

/// P_L: projector onto the basis functions with label |m|_inf <= L.
inline Projector truncated_projector(const WannierBasis& basis, int window) {
  if (!basis.relabeled()) {
    throw std::invalid_argument("truncated_projector: basis not relabeled");
  }
  if (window < 0) throw std::invalid_argument("truncated_projector: window < 0");
  std::vector<Eigen::Index> selected;
  for (Eigen::Index c = 0; c < basis.count(); ++c) {
    if ((*basis.labels)[c].max_norm() <= window) selected.push_back(c);
  }
  Matrix columns(basis.dim(), Eigen::Index(selected.size()));
  for (std::size_t k = 0; k < selected.size(); ++k) {
    columns.col(Eigen::Index(k)) = basis.functions.col(selected[k]);
  }
  return Projector::from_range_basis(std::move(columns));
}

/// Per-function 2s-moments for one value of s, with summary statistics.
struct MomentReport {
  double s = 0.0;
  std::vector<double> values;  // per function, basis order
  double max_value = 0.0;
  double mean_value = 0.0;
};

inline std::vector<MomentReport> localization_profile(
    const WannierBasis& basis, const std::vector<double>& s_values,
    const LatticeIndexing& idx) {
  std::vector<MomentReport> reports;
  reports.reserve(s_values.size());
  for (double s : s_values) {
    MomentReport report;
    report.s = s;
    report.values.reserve(basis.count());
    for (Eigen::Index c = 0; c < basis.count(); ++c) {
      report.values.push_back(moment(basis.functions.col(c), basis.centers[c], s, idx));
    }
    for (double v : report.values) {
      report.max_value = std::max(report.max_value, v);
      report.mean_value += v;
    }
    if (!report.values.empty()) report.mean_value /= double(report.values.size());
    reports.push_back(std::move(report));
  }
  return reports;
}

// --- binary container -------------------------------------------------------
//
// Layout (native endianness): magic "CLWB", u32 version, u64 dim, u64 count,
// i32 M, i32 N, i32 q, u8 has_labels; centers as count x 2 doubles; labels as
// count x 3 int32 when present; column-major complex function data.

inline void save_wannier_basis(const WannierBasis& basis, const LatticeIndexing& idx,
                               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_wannier_basis: cannot open " + path);
  auto put = [&out](const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), std::streamsize(bytes));
  };
  out.write("CLWB", 4);
  const std::uint32_t version = 1;
  const std::uint64_t dim = std::uint64_t(basis.dim());
  const std::uint64_t count = std::uint64_t(basis.count());
  const std::int32_t m = basis.degeneracy, n = idx.half_width, q = idx.orbitals_per_site;
  const std::uint8_t has_labels = basis.relabeled() ? 1 : 0;
  put(&version, 4);
  put(&dim, 8);
  put(&count, 8);
  put(&m, 4);
  put(&n, 4);
  put(&q, 4);
  put(&has_labels, 1);
  for (const auto& mu : basis.centers) put(mu.data(), 2 * sizeof(double));
  if (has_labels) {
    for (const auto& label : *basis.labels) {
      const std::int32_t row[3] = {label.m1, label.m2, label.j};
      put(row, sizeof(row));
    }
  }
  put(basis.functions.data(), sizeof(Complex) * dim * count);
  if (!out) throw std::runtime_error("save_wannier_basis: write failed for " + path);
}

inline std::pair<WannierBasis, LatticeIndexing> load_wannier_basis(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_wannier_basis: cannot open " + path);
  auto get = [&in, &path](void* data, std::size_t bytes) {
    in.read(static_cast<char*>(data), std::streamsize(bytes));
    if (!in) throw std::runtime_error("load_wannier_basis: truncated file " + path);
  };
  char magic[4];
  get(magic, 4);
  if (std::string(magic, 4) != "CLWB") {
    throw std::runtime_error("load_wannier_basis: bad magic in " + path);
  }
  std::uint32_t version = 0;
  get(&version, 4);
  if (version != 1) throw std::runtime_error("load_wannier_basis: unknown version");
  std::uint64_t dim = 0, count = 0;
  std::int32_t m = 0, n = 0, q = 0;
  std::uint8_t has_labels = 0;
  get(&dim, 8);
  get(&count, 8);
  get(&m, 4);
  get(&n, 4);
  get(&q, 4);
  get(&has_labels, 1);
  LatticeIndexing idx(n, q);
  if (std::uint64_t(idx.total_dim()) != dim) {
    throw std::runtime_error("load_wannier_basis: inconsistent dimensions");
  }
  WannierBasis basis;
  basis.degeneracy = m;
  basis.centers.resize(count);
  for (auto& mu : basis.centers) get(mu.data(), 2 * sizeof(double));
  if (has_labels) {
    std::vector<LatticeLabel> labels(count);
    for (auto& label : labels) {
      std::int32_t row[3];
      get(row, sizeof(row));
      label = LatticeLabel{row[0], row[1], row[2]};
    }
    basis.labels = std::move(labels);
  }
  basis.functions.resize(Eigen::Index(dim), Eigen::Index(count));
  get(basis.functions.data(), sizeof(Complex) * dim * count);
  return {std::move(basis), idx};
}

}  // namespace chernlab
