#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chernlab/lattice.hpp"
#include "chernlab/spectral.hpp"
#include "chernlab/types.hpp"
#include "chernlab/wannier.hpp"

namespace chernlab {

enum class MarkerForm { chi_window, pl_window };

struct MarkerResult {
  int window = 0;                   // L
  double value = 0.0;               // real part of the windowed trace formula
  double imaginary_residual = 0.0;  // numerical health metric, not data
  MarkerForm form = MarkerForm::chi_window;
};

/// [D, A] for diagonal D: entries (d_i - d_j) A_ij.
inline Matrix commutator_with_diagonal(const DiagonalOperator& d, const Matrix& a) {
  return d.diag.cast<Complex>().asDiagonal() * a -
         a * d.diag.cast<Complex>().asDiagonal();
}

namespace detail {

inline int half_width_from_positions(const DiagonalOperator& x) {
  // Position diagonals run over {-N, ..., N-1}; max |x| recovers N.
  return int(std::llround(x.diag.cwiseAbs().maxCoeff()));
}

inline void require_interior_window(int window, int half_width) {
  if (window < 1 || 2 * window > half_width) {
    throw std::invalid_argument(
        "marker window must satisfy 1 <= L <= N/2 (interior-window rule)");
  }
}

/// sum over the given columns S of S^dag [[X,P],[Y,P]] S where the commutators
/// are supplied explicitly; the driver for both marker forms.
inline Complex windowed_commutator_trace(const Matrix& comm_x, const Matrix& comm_y,
                                         const Matrix& columns) {
  if (columns.cols() == 0) return Complex(0.0, 0.0);
  const Matrix yc = comm_y * columns;
  const Matrix xyc = comm_x * yc;
  const Matrix xc = comm_x * columns;
  const Matrix yxc = comm_y * xc;
  return ((columns.adjoint() * (xyc - yxc)).diagonal()).sum();
}

inline MarkerResult marker_from_trace(Complex trace, int window, MarkerForm form) {
  // (2 pi i / 4L^2) * trace; the result is real up to roundoff.
  const double scale = 2.0 * std::numbers::pi / (4.0 * double(window) * double(window));
  MarkerResult result;
  result.window = window;
  result.form = form;
  result.value = -scale * trace.imag();
  result.imaginary_residual = std::abs(scale * trace.real());
  return result;
}

}  // namespace detail

/// Chern marker in the chi_L window form:
/// (2 pi i / 4L^2) tr(chi_L P [[X,P],[Y,P]] P chi_L).
inline MarkerResult chern_marker_chi(const Projector& p, const DiagonalOperator& x,
                                     const DiagonalOperator& y, int window,
                                     const LatticeIndexing& idx) {
  detail::require_interior_window(window, idx.half_width);
  const Matrix comm_x = commutator_with_diagonal(x, p.mat());
  const Matrix comm_y = commutator_with_diagonal(y, p.mat());
  const DiagonalOperator chi = box_mask(idx, window);
  std::vector<Eigen::Index> inside;
  for (Eigen::Index i = 0; i < chi.dim(); ++i) {
    if (chi.diag[i] != 0.0) inside.push_back(i);
  }
  Matrix p_columns(p.dim(), Eigen::Index(inside.size()));
  for (std::size_t c = 0; c < inside.size(); ++c) {
    p_columns.col(Eigen::Index(c)) = p.mat().col(inside[c]);
  }
  const Complex trace = detail::windowed_commutator_trace(comm_x, comm_y, p_columns);
  return detail::marker_from_trace(trace, window, MarkerForm::chi_window);
}

/// Chern marker in the P_L window form:
/// (2 pi i / 4L^2) tr(P_L [[X,P],[Y,P]] P_L).
inline MarkerResult chern_marker_pl(const Projector& p, const WannierBasis& basis,
                                    const DiagonalOperator& x,
                                    const DiagonalOperator& y, int window) {
  if (!basis.relabeled()) {
    throw std::invalid_argument("chern_marker_pl: basis not relabeled");
  }
  detail::require_interior_window(window, detail::half_width_from_positions(x));
  const Matrix comm_x = commutator_with_diagonal(x, p.mat());
  const Matrix comm_y = commutator_with_diagonal(y, p.mat());
  std::vector<Eigen::Index> selected;
  for (Eigen::Index c = 0; c < basis.count(); ++c) {
    if ((*basis.labels)[c].max_norm() <= window) selected.push_back(c);
  }
  Matrix columns(basis.dim(), Eigen::Index(selected.size()));
  for (std::size_t c = 0; c < selected.size(); ++c) {
    columns.col(Eigen::Index(c)) = basis.functions.col(selected[c]);
  }
  const Complex trace = detail::windowed_commutator_trace(comm_x, comm_y, columns);
  return detail::marker_from_trace(trace, window, MarkerForm::pl_window);
}

/// || P[[X,P],[Y,P]]P - [PXP, PYP] ||: exact algebraic identity in finite
/// dimension (P^2 = P, [X, Y] = 0), so the value is pure roundoff.
inline double commutator_identity_residual(const Projector& p,
                                           const DiagonalOperator& x,
                                           const DiagonalOperator& y) {
  const Matrix comm_x = commutator_with_diagonal(x, p.mat());
  const Matrix comm_y = commutator_with_diagonal(y, p.mat());
  const Matrix both = comm_x * comm_y - comm_y * comm_x;
  const Matrix lhs = p.mat() * both * p.mat();

  const Matrix pxp = p.mat() * (x.diag.cast<Complex>().asDiagonal() * p.mat());
  const Matrix pyp = p.mat() * (y.diag.cast<Complex>().asDiagonal() * p.mat());
  const Matrix rhs = pxp * pyp - pyp * pxp;
  return schatten_norm(lhs - rhs, Schatten::inf);
}

struct TraceReductionCheck {
  Complex lhs;                          // tr(P_L [[X,P],[Y,P]] P_L)
  Complex rhs;                          // tr(P_L X (P-P_L) Y P_L - P_L Y (P-P_L) X P_L)
  double commutator_trace_abs = 0.0;    // |tr [P_L X P_L, P_L Y P_L]|
};

/// Both sides of the trace reduction identity, computed independently.
inline TraceReductionCheck trace_reduction_check(const Projector& p,
                                                 const WannierBasis& basis,
                                                 const DiagonalOperator& x,
                                                 const DiagonalOperator& y,
                                                 int window) {
  if (!basis.relabeled()) {
    throw std::invalid_argument("trace_reduction_check: basis not relabeled");
  }
  std::vector<Eigen::Index> selected;
  for (Eigen::Index c = 0; c < basis.count(); ++c) {
    if ((*basis.labels)[c].max_norm() <= window) selected.push_back(c);
  }
  Matrix columns(basis.dim(), Eigen::Index(selected.size()));
  for (std::size_t c = 0; c < selected.size(); ++c) {
    columns.col(Eigen::Index(c)) = basis.functions.col(selected[c]);
  }

  TraceReductionCheck check;
  const Matrix comm_x = commutator_with_diagonal(x, p.mat());
  const Matrix comm_y = commutator_with_diagonal(y, p.mat());
  check.lhs = detail::windowed_commutator_trace(comm_x, comm_y, columns);

  if (columns.cols() == 0) {
    check.rhs = Complex(0.0, 0.0);
    return check;
  }
  const Matrix x_cols = x.diag.cast<Complex>().asDiagonal() * columns;
  const Matrix y_cols = y.diag.cast<Complex>().asDiagonal() * columns;
  auto apply_complement = [&](const Matrix& cols) {
    return Matrix(p.mat() * cols - columns * (columns.adjoint() * cols));
  };
  const Matrix qy = apply_complement(y_cols);  // (P - P_L) Y psi
  const Matrix qx = apply_complement(x_cols);  // (P - P_L) X psi
  const Complex term_xy = (x_cols.adjoint() * qy).diagonal().sum();
  const Complex term_yx = (y_cols.adjoint() * qx).diagonal().sum();
  check.rhs = term_xy - term_yx;

  const Matrix x_small = columns.adjoint() * x_cols;
  const Matrix y_small = columns.adjoint() * y_cols;
  check.commutator_trace_abs =
      std::abs(((x_small * y_small).trace() - (y_small * x_small).trace()));
  return check;
}

/// Lattice field-strength (Fukui-Hatsugai-Suzuki) Chern number of the lower
/// band of h(k) = sin k1 sx + sin k2 sy + (u + cos k1 + cos k2) sz on a
/// grid x grid Brillouin-zone mesh. Exact integer for admissible grids.
inline int fhs_chern_number(double mass_u, int grid) {
  if (grid < 8) throw std::invalid_argument("fhs_chern_number: grid must be >= 8");
  if (std::abs(std::abs(mass_u) - 2.0) < 1e-9 || std::abs(mass_u) < 1e-9) {
    throw std::invalid_argument("fhs_chern_number: gap closes at |u| in {0, 2}");
  }

  const double step = 2.0 * std::numbers::pi / grid;
  auto lower_band = [&](int i, int j) {
    const double k1 = i * step, k2 = j * step;
    const double d1 = std::sin(k1), d2 = std::sin(k2);
    const double d3 = mass_u + std::cos(k1) + std::cos(k2);
    Eigen::Matrix2cd h;
    h << Complex(d3, 0.0), Complex(d1, -d2), Complex(d1, d2), Complex(-d3, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(h);
    if (solver.info() != Eigen::Success) {
      throw EigenSolverError("fhs_chern_number: 2x2 eigensolve failed");
    }
    return Eigen::Vector2cd(solver.eigenvectors().col(0));
  };

  std::vector<Eigen::Vector2cd> states(std::size_t(grid) * grid);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) states[std::size_t(i) * grid + j] = lower_band(i, j);
  }
  auto at = [&](int i, int j) -> const Eigen::Vector2cd& {
    return states[std::size_t((i % grid + grid) % grid) * grid +
                  std::size_t((j % grid + grid) % grid)];
  };
  auto link = [&](int i, int j, int di, int dj) {
    const Complex overlap = at(i, j).dot(at(i + di, j + dj));
    if (std::abs(overlap) < 1e-12) {
      throw std::runtime_error("fhs_chern_number: vanishing link variable");
    }
    return overlap;
  };

  double total = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const Complex plaquette = link(i, j, 1, 0) * link(i + 1, j, 0, 1) /
                                (link(i, j + 1, 1, 0) * link(i, j, 0, 1));
      total += std::arg(plaquette);
    }
  }
  const double chern = total / (2.0 * std::numbers::pi);
  const long rounded = std::lround(chern);
  if (std::abs(chern - double(rounded)) > 1e-6) {
    throw std::runtime_error("fhs_chern_number: field strength sum not an integer");
  }
  return int(rounded);
}

}  // namespace chernlab
