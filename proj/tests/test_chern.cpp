#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "chernlab/chern.hpp"
#include "chernlab/estimates.hpp"
#include "test_helpers.hpp"

using namespace chernlab;

TEST_CASE("fhs_oracle_integers_and_grid_stability") {
  CHECK(fhs_chern_number(3.0, 12) == 0);
  CHECK(fhs_chern_number(3.0, 24) == 0);
  CHECK(fhs_chern_number(3.0, 48) == 0);

  const int plus = fhs_chern_number(1.0, 24);
  const int minus = fhs_chern_number(-1.0, 24);
  CHECK(std::abs(plus) == 1);
  CHECK(plus == -minus);
  CHECK(fhs_chern_number(1.0, 12) == plus);
  CHECK(fhs_chern_number(1.0, 48) == plus);
}

TEST_CASE("fhs_oracle_rejects_gapless_and_coarse_grids") {
  CHECK_THROWS_AS(fhs_chern_number(2.0, 24), std::invalid_argument);
  CHECK_THROWS_AS(fhs_chern_number(0.0, 24), std::invalid_argument);
  CHECK_THROWS_AS(fhs_chern_number(1.0, 4), std::invalid_argument);
}

TEST_CASE("commutator_identity_atomic_and_random_projector") {
  const auto& built = testlab::atomic(3, 2.0, 0.0, 0);
  const double atomic_scale = built.x.spectral_norm() * built.y.spectral_norm();
  CHECK(commutator_identity_residual(built.projector, built.x, built.y) <=
        1e-10 * atomic_scale);

  // Random rank-5 projector in dimension 20 with integer diagonal X, Y.
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss;
  Matrix a(20, 20);
  for (Eigen::Index j = 0; j < 20; ++j) {
    for (Eigen::Index i = 0; i < 20; ++i) a(i, j) = Complex(gauss(rng), gauss(rng));
  }
  const Projector p =
      Projector::from_range_basis(eigh(Matrix((a + a.adjoint()) / 2.0)).eigenvectors.leftCols(5));
  DiagonalOperator x{RealVector(20)}, y{RealVector(20)};
  for (Eigen::Index i = 0; i < 20; ++i) {
    x.diag[i] = double(i % 7) - 3.0;
    y.diag[i] = double(i % 5) - 2.0;
  }
  CHECK(commutator_identity_residual(p, x, y) <=
        1e-10 * x.spectral_norm() * y.spectral_norm());
}

TEST_CASE("commutator_identity_two_band") {
  const auto& built = testlab::two_band(8, 1.0, 0.0, 0);
  const double scale = built.x.spectral_norm() * built.y.spectral_norm();
  CHECK(commutator_identity_residual(built.projector, built.x, built.y) <= 1e-9 * scale);
}

TEST_CASE("marker_atomic_vanishes_in_both_forms") {
  const auto& built = testlab::atomic(4, 2.0, 0.5, 3);
  const WannierBasis basis = testlab::gwb(built, 0.25);
  for (int window : {1, 2}) {
    const MarkerResult chi = chern_marker_chi(built.projector, built.x, built.y, window,
                                              built.idx);
    const MarkerResult pl = chern_marker_pl(built.projector, basis, built.x, built.y,
                                            window);
    CHECK(std::abs(chi.value) <= 1e-8);
    CHECK(std::abs(pl.value) <= 1e-8);
    CHECK(chi.imaginary_residual <= 1e-8 * std::max(1.0, std::abs(chi.value)));
    CHECK(pl.imaginary_residual <= 1e-8 * std::max(1.0, std::abs(pl.value)));
  }
}

TEST_CASE("marker_matches_k_space_oracle_in_topological_phase") {
  const auto& built = testlab::two_band(12, 1.0, 0.0, 0);
  const MarkerResult marker = chern_marker_chi(built.projector, built.x, built.y, 3,
                                               built.idx);
  const int oracle = fhs_chern_number(1.0, 24);
  CHECK(std::abs(marker.value - double(oracle)) < 0.1);
  CHECK(marker.imaginary_residual <= 1e-8 * std::max(1.0, std::abs(marker.value)));
}

TEST_CASE("marker_sign_flips_with_mass_sign") {
  const auto& plus = testlab::two_band(10, 1.0, 0.0, 0);
  const auto& minus = testlab::two_band(10, -1.0, 0.0, 0);
  const MarkerResult marker_plus = chern_marker_chi(plus.projector, plus.x, plus.y, 2,
                                                    plus.idx);
  const MarkerResult marker_minus = chern_marker_chi(minus.projector, minus.x, minus.y,
                                                     2, minus.idx);
  CHECK(std::abs(marker_plus.value + marker_minus.value) < 0.02);
  CHECK(std::abs(std::abs(marker_plus.value) - 1.0) < 0.1);
}

TEST_CASE("marker_trivial_phase_small_in_pl_form") {
  const auto& built = testlab::two_band(12, 3.0, 0.5, 1);
  const WannierBasis basis = testlab::gwb(built, 0.25);
  const MarkerResult pl = chern_marker_pl(built.projector, basis, built.x, built.y, 3);
  CHECK(std::abs(pl.value) < 0.05);
}

TEST_CASE("marker_forms_agree_within_trace_norm_chain") {
  const auto& built = testlab::two_band(12, 3.0, 0.5, 1);
  const WannierBasis basis = testlab::gwb(built, 0.25);
  const int window = 3;
  const MarkerResult chi = chern_marker_chi(built.projector, built.x, built.y, window,
                                            built.idx);
  const MarkerResult pl = chern_marker_pl(built.projector, basis, built.x, built.y,
                                          window);
  const ScalingSeries diff =
      prop_pl_chern_diff(built.projector, basis, built.x, built.y, {window});
  const double chain =
      2.0 * std::numbers::pi / (4.0 * window * window) * diff.points[0].second *
      (double(window) * window);
  CHECK(std::abs(chi.value - pl.value) <= chain + 1e-12);
}

TEST_CASE("whole_sample_commutator_trace_vanishes") {
  const auto& built = testlab::two_band(6, 1.0, 0.0, 0);
  const Matrix comm_x = commutator_with_diagonal(built.x, built.projector.mat());
  const Matrix comm_y = commutator_with_diagonal(built.y, built.projector.mat());
  const Matrix core = built.projector.mat() * (comm_x * comm_y - comm_y * comm_x) *
                      built.projector.mat();
  const double scale = built.x.spectral_norm() * built.y.spectral_norm() *
                       double(built.projector.rank());
  CHECK(std::abs(core.trace()) <= 1e-8 * scale);
}

TEST_CASE("trace_reduction_identity") {
  const auto& built = testlab::two_band(8, 3.0, 0.0, 0);
  const WannierBasis basis = testlab::gwb(built, 0.25);
  const TraceReductionCheck check =
      trace_reduction_check(built.projector, basis, built.x, built.y, 2);
  CHECK(std::abs(check.lhs - check.rhs) <= 1e-8 * std::max(1.0, std::abs(check.lhs)));
  const Projector truncated = truncated_projector(basis, 2);
  const double scale = built.x.spectral_norm() * built.y.spectral_norm() *
                       double(truncated.rank());
  CHECK(check.commutator_trace_abs <= 1e-8 * scale);
}

TEST_CASE("trace_reduction_zero_rank_window") {
  WannierBasis basis;
  const LatticeIndexing idx(2, 2);
  basis.functions = Matrix::Identity(idx.total_dim(), 1);
  basis.centers = {Eigen::Vector2d(1.0, 1.0)};
  WannierBasis relabeled = relabel_to_lattice(basis);
  // Shift the only label outside every window of interest.
  (*relabeled.labels)[0] = LatticeLabel{1, 1, 1};
  Matrix p_mat = basis.functions * basis.functions.adjoint();
  const Projector p(p_mat, basis.functions);
  const auto [x, y] = position_operators(idx);
  WannierBasis off = relabeled;
  (*off.labels)[0] = LatticeLabel{2, 2, 1};
  const TraceReductionCheck check = trace_reduction_check(p, off, x, y, 1);
  CHECK(check.lhs == Complex(0.0, 0.0));
  CHECK(check.rhs == Complex(0.0, 0.0));
  CHECK(check.commutator_trace_abs == 0.0);
}

TEST_CASE("marker_window_rule_rejected_outside_interior") {
  const auto& built = testlab::two_band(6, 3.0, 0.0, 0);
  CHECK_THROWS_AS(chern_marker_chi(built.projector, built.x, built.y, 4, built.idx),
                  std::invalid_argument);
  CHECK_THROWS_AS(chern_marker_chi(built.projector, built.x, built.y, 0, built.idx),
                  std::invalid_argument);
}
