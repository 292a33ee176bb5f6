#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace chernlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Entrywise Hermiticity defect ||A - A^dag||_max.
inline double hermiticity_residual(const Matrix& a) {
  return max_abs(a - a.adjoint());
}

inline constexpr double kHermitianTol = 1e-12;

/// Dense complex square matrix that is Hermitian up to roundoff.
/// Construction rejects ||A - A^dag||_max > 1e-12 * max(1, ||A||_max).
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols()) {
      throw std::invalid_argument("HermitianOperator: matrix must be square");
    }
    const double scale = std::max(1.0, max_abs(mat_));
    const double res = hermiticity_residual(mat_);
    if (res > kHermitianTol * scale) {
      throw std::invalid_argument(
          "HermitianOperator: Hermiticity residual " + std::to_string(res) +
          " exceeds tolerance");
    }
  }

  const Matrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  Matrix mat_;
};

/// Real diagonal operator: position operators and 0/1 window, strip and ball
/// masks. Hermitian by construction; kept as a vector, densified on demand.
struct DiagonalOperator {
  RealVector diag;

  Eigen::Index dim() const { return diag.size(); }

  Matrix dense() const {
    Matrix m = Matrix::Zero(diag.size(), diag.size());
    for (Eigen::Index i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  double spectral_norm() const {
    return diag.size() == 0 ? 0.0 : diag.cwiseAbs().maxCoeff();
  }
};

/// Orthogonal projector with its generating orthonormal column family.
/// Cheap invariants (Hermiticity, integer trace) are checked at construction;
/// the spectral idempotency defect is exposed through projector_defects().
class Projector {
 public:
  /// P = V V^dag from orthonormal columns V (dim x rank).
  static Projector from_range_basis(Matrix columns) {
    Matrix p = columns * columns.adjoint();
    return Projector(std::move(p), std::move(columns));
  }

  Projector(Matrix p, Matrix range_basis)
      : mat_(std::move(p)), basis_(std::move(range_basis)), rank_(basis_.cols()) {
    if (mat_.rows() != mat_.cols()) {
      throw std::invalid_argument("Projector: matrix must be square");
    }
    if (basis_.rows() != mat_.rows()) {
      throw std::invalid_argument("Projector: range basis dimension mismatch");
    }
    const double scale = std::max(1.0, max_abs(mat_));
    if (hermiticity_residual(mat_) > kHermitianTol * scale) {
      throw std::invalid_argument("Projector: not Hermitian");
    }
    const double trace_residual = std::abs(mat_.trace().real() - double(rank_));
    if (trace_residual > 1e-8) {
      throw std::invalid_argument("Projector: trace differs from rank by " +
                                  std::to_string(trace_residual));
    }
  }

  const Matrix& mat() const { return mat_; }
  const Matrix& range_basis() const { return basis_; }
  Eigen::Index dim() const { return mat_.rows(); }
  Eigen::Index rank() const { return rank_; }

 private:
  Matrix mat_;
  Matrix basis_;
  Eigen::Index rank_;
};

}  // namespace chernlab
