#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chernlab/fit.hpp"
#include "chernlab/lattice.hpp"
#include "chernlab/types.hpp"

#if defined(CHERNLAB_USE_LAPACKE)
#ifndef LAPACK_COMPLEX_CPP
#define LAPACK_COMPLEX_CPP
#endif
#include <lapacke.h>
#endif

namespace chernlab {

class EigenSolverError : public std::runtime_error {
 public:
  explicit EigenSolverError(const std::string& what) : std::runtime_error(what) {}
};

class EigenvalueAtFermiLevel : public std::runtime_error {
 public:
  explicit EigenvalueAtFermiLevel(double gap)
      : std::runtime_error("fermi_projector: eigenvalue within " +
                           std::to_string(gap) + " of the Fermi level") {}
};

struct EighResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns, matching order
};

/// Full eigendecomposition of a Hermitian matrix. Ascending eigenvalues,
/// orthonormal eigenvectors. Solver failures are reported, never silent.
inline EighResult eigh(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigh: matrix must be square");
  const double scale = std::max(1.0, max_abs(a));
  if (hermiticity_residual(a) > kHermitianTol * scale) {
    throw std::invalid_argument("eigh: input is not Hermitian");
  }
  const Eigen::Index n = a.rows();
  EighResult result;
  result.eigenvalues.resize(n);
  if (n == 0) {
    result.eigenvectors.resize(0, 0);
    return result;
  }
#if defined(CHERNLAB_USE_LAPACKE)
  result.eigenvectors = a;
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', lapack_int(n),
      reinterpret_cast<lapack_complex_double*>(result.eigenvectors.data()),
      lapack_int(n), result.eigenvalues.data());
  if (info != 0) {
    throw EigenSolverError("zheevd failed to converge, info = " + std::to_string(info));
  }
#else
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverError("SelfAdjointEigenSolver did not converge");
  }
  result.eigenvalues = solver.eigenvalues();
  result.eigenvectors = solver.eigenvectors();
#endif
  return result;
}

inline EighResult eigh(const HermitianOperator& h) { return eigh(h.mat()); }

/// Fermi projector P = sum_{lambda_k < E_F} v_k v_k^dag from a precomputed
/// eigendecomposition. E_F must stay at least 1e-8 away from the spectrum.
inline Projector fermi_projector(const EighResult& es, double fermi_level) {
  double min_distance = std::numeric_limits<double>::infinity();
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
    min_distance = std::min(min_distance, std::abs(es.eigenvalues[k] - fermi_level));
    if (es.eigenvalues[k] < fermi_level) ++rank;
  }
  if (min_distance <= 1e-8) throw EigenvalueAtFermiLevel(min_distance);
  return Projector::from_range_basis(es.eigenvectors.leftCols(rank));
}

inline Projector fermi_projector(const HermitianOperator& h, double fermi_level) {
  return fermi_projector(eigh(h), fermi_level);
}

struct PositionOperators {
  DiagonalOperator x;
  DiagonalOperator y;
};

/// Diagonal position operators X, Y with site coordinates repeated across
/// orbitals. [X, Y] = 0 exactly.
inline PositionOperators position_operators(const LatticeIndexing& idx) {
  RealVector x(idx.total_dim()), y(idx.total_dim());
  for (Eigen::Index i = 0; i < idx.total_dim(); ++i) {
    const auto [site, orbital] = idx.site_of(i);
    x[i] = site.m1;
    y[i] = site.m2;
  }
  return {DiagonalOperator{std::move(x)}, DiagonalOperator{std::move(y)}};
}

/// chi_L: diagonal indicator of the half-open window [-L, L)^2.
inline DiagonalOperator box_mask(const LatticeIndexing& idx, int window) {
  if (window < 1 || window > idx.half_width) {
    throw std::invalid_argument("box_mask: window must satisfy 1 <= L <= N");
  }
  RealVector d(idx.total_dim());
  for (Eigen::Index i = 0; i < idx.total_dim(); ++i) {
    const auto [site, orbital] = idx.site_of(i);
    const bool inside = site.m1 >= -window && site.m1 < window &&
                        site.m2 >= -window && site.m2 < window;
    d[i] = inside ? 1.0 : 0.0;
  }
  return DiagonalOperator{std::move(d)};
}

enum class Axis { X, Y };

/// Strip indicator: 1 iff |m_axis - center| <= half_width.
inline DiagonalOperator strip_mask(const LatticeIndexing& idx, Axis axis,
                                   int center, double half_width) {
  RealVector d(idx.total_dim());
  for (Eigen::Index i = 0; i < idx.total_dim(); ++i) {
    const auto [site, orbital] = idx.site_of(i);
    const int coordinate = axis == Axis::X ? site.m1 : site.m2;
    d[i] = std::abs(coordinate - center) <= half_width ? 1.0 : 0.0;
  }
  return DiagonalOperator{std::move(d)};
}

/// Indicator of the open ball B_r(center) in site coordinates.
inline DiagonalOperator ball_mask(const LatticeIndexing& idx,
                                  const Eigen::Vector2d& center, double radius) {
  RealVector d(idx.total_dim());
  for (Eigen::Index i = 0; i < idx.total_dim(); ++i) {
    const auto [site, orbital] = idx.site_of(i);
    const double dx = site.m1 - center[0], dy = site.m2 - center[1];
    d[i] = std::sqrt(dx * dx + dy * dy) < radius ? 1.0 : 0.0;
  }
  return DiagonalOperator{std::move(d)};
}

/// Singular values, descending, via the eigendecomposition of A^dag A.
inline RealVector singular_values(const Matrix& a) {
  Matrix gram = a.adjoint() * a;
  gram = (gram + gram.adjoint()) / 2.0;
  const EighResult es = eigh(gram);
  RealVector sv(es.eigenvalues.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    sv[k] = std::sqrt(std::max(0.0, es.eigenvalues[sv.size() - 1 - k]));
  }
  return sv;
}

enum class Schatten { one, two, inf };

/// Schatten p-norm for p in {1, 2, inf}. S2 is the Frobenius norm; S1 and
/// S-inf come from the singular values.
inline double schatten_norm(const Matrix& a, Schatten p) {
  if (a.size() == 0) return 0.0;
  switch (p) {
    case Schatten::two:
      return a.norm();
    case Schatten::one:
      return singular_values(a).sum();
    case Schatten::inf:
      return singular_values(a)[0];
  }
  throw std::invalid_argument("schatten_norm: unknown p");
}

/// Spectral norm of a Hermitian matrix as max |eigenvalue|.
inline double hermitian_spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const EighResult es = eigh(a);
  return std::max(std::abs(es.eigenvalues[0]),
                  std::abs(es.eigenvalues[es.eigenvalues.size() - 1]));
}

/// Trace norm of an anti-Hermitian matrix: S1(A) = sum |eig(iA)|.
inline double trace_norm_antihermitian(const Matrix& a) {
  const double scale = std::max(1.0, max_abs(a));
  if (max_abs(a + a.adjoint()) > 1e-10 * scale) {
    throw std::invalid_argument("trace_norm_antihermitian: input not anti-Hermitian");
  }
  const Matrix h = Complex(0.0, 1.0) * a;
  const EighResult es = eigh((h + h.adjoint()) / 2.0);
  return es.eigenvalues.cwiseAbs().sum();
}

struct ProjectorDefects {
  double idempotency = 0.0;  // ||P^2 - P||, spectral
  double hermiticity = 0.0;  // ||P - P^dag||_max
  double trace = 0.0;        // |tr P - rank|
};

inline ProjectorDefects projector_defects(const Projector& p) {
  ProjectorDefects d;
  d.hermiticity = hermiticity_residual(p.mat());
  d.trace = std::abs(p.mat().trace().real() - double(p.rank()));
  Matrix defect = p.mat() * p.mat() - p.mat();
  defect = (defect + defect.adjoint()) / 2.0;
  d.idempotency = hermitian_spectral_norm(defect);
  return d;
}

/// Exponential-decay fit of the projector kernel. Per site-pair distance r,
/// the worst-case block magnitude max |P(m, m')| over orbital pairs; then a
/// log-linear fit of the bins above 1e-12. Fewer than three usable bins flags
/// the kernel as super-exponential (e.g. strictly finite range).
struct DecayFit {
  double gamma = 0.0;      // fitted decay rate
  double prefactor = 0.0;  // fitted C in C exp(-gamma r)
  bool degenerate = false;  // too few nonzero bins for a fit
  std::vector<std::pair<double, double>> samples;  // (r, max |P|), sorted by r
};

inline DecayFit kernel_decay_fit(const Projector& p, const LatticeIndexing& idx) {
  if (p.dim() != idx.total_dim()) {
    throw std::invalid_argument("kernel_decay_fit: dimension mismatch");
  }
  const int q = idx.orbitals_per_site;
  const Eigen::Index n_sites = idx.n_sites();
  // Distances between box sites have integer squared length.
  std::map<long, double> max_by_d2;
  for (Eigen::Index sa = 0; sa < n_sites; ++sa) {
    const auto [ma, oa] = idx.site_of(sa * q);
    for (Eigen::Index sb = sa; sb < n_sites; ++sb) {
      const auto [mb, ob] = idx.site_of(sb * q);
      const long d1 = ma.m1 - mb.m1, d2 = ma.m2 - mb.m2;
      const long dist2 = d1 * d1 + d2 * d2;
      double block_max = 0.0;
      for (int ja = 0; ja < q; ++ja) {
        for (int jb = 0; jb < q; ++jb) {
          block_max = std::max(block_max, std::abs(p.mat()(sa * q + ja, sb * q + jb)));
        }
      }
      auto [it, inserted] = max_by_d2.try_emplace(dist2, block_max);
      if (!inserted) it->second = std::max(it->second, block_max);
    }
  }

  DecayFit fit;
  std::vector<double> rs, log_vals;
  for (const auto& [dist2, value] : max_by_d2) {
    const double r = std::sqrt(double(dist2));
    fit.samples.emplace_back(r, value);
    if (value > 1e-12) {
      rs.push_back(r);
      log_vals.push_back(std::log(value));
    }
  }
  if (rs.size() < 3) {
    fit.degenerate = true;
    fit.gamma = std::numeric_limits<double>::infinity();
    fit.prefactor = 0.0;
    return fit;
  }
  const auto line = detail::linear_fit(rs, log_vals);
  fit.gamma = -line.slope;
  fit.prefactor = std::exp(line.intercept);
  return fit;
}

/// Minimum |lambda - E_F| among eigenstates carrying more than half their
/// weight inside the interior half-box. Quantifies how gapped the bulk looks
/// even when open-boundary edge modes cross the Fermi level.
inline double bulk_gap(const EighResult& es, const LatticeIndexing& idx,
                       double fermi_level) {
  const DiagonalOperator interior = box_mask(idx, std::max(1, idx.half_width / 2));
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
    double weight = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvectors.rows(); ++i) {
      if (interior.diag[i] != 0.0) weight += std::norm(es.eigenvectors(i, k));
    }
    if (weight > 0.5) gap = std::min(gap, std::abs(es.eigenvalues[k] - fermi_level));
  }
  return gap;
}

}  // namespace chernlab
