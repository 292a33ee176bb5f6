// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "chernlab/chern.hpp"
#include "chernlab/estimates.hpp"
#include "chernlab/model.hpp"
#include "chernlab/spectral.hpp"
#include "chernlab/wannier.hpp"

using namespace chernlab;

namespace {

struct Tracker {
  std::map<int, std::pair<bool, std::string>> results;

  void merge(int id, bool pass, const std::string& detail) {
    auto [it, inserted] = results.try_emplace(id, pass, detail);
    if (!inserted) {
      it->second.first = it->second.first && pass;
      if (!detail.empty()) {
        if (!it->second.second.empty()) it->second.second += "; ";
        it->second.second += detail;
      }
    }
  }

  void fail(int id, const std::string& why) { merge(id, false, why); }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buffer[160];
  std::snprintf(buffer, sizeof buffer, pattern, a, b, c);
  return buffer;
}

struct Built {
  LatticeIndexing idx;
  Projector projector;
  DiagonalOperator x;
  DiagonalOperator y;
};

Built build(int n, ModelKind kind, double u, double w, std::uint64_t seed, double g = 2.0) {
  LatticeIndexing idx(n, 2);
  ModelSpec spec;
  spec.kind = kind;
  spec.mass_u = u;
  spec.disorder_strength = w;
  spec.seed = seed;
  spec.atomic_gap = g;
  Projector p = fermi_projector(eigh(build_model(idx, spec)), 0.0);
  PositionOperators pos = position_operators(idx);
  return Built{idx, std::move(p), std::move(pos.x), std::move(pos.y)};
}

Built trivial(int n) { return build(n, ModelKind::two_band_chern, 3.0, 0.5, 1); }
Built topological(int n) { return build(n, ModelKind::two_band_chern, 1.0, 0.0, 0); }

WannierBasis gwb(const Built& built, double tol) {
  return relabel_to_lattice(build_gwb_pxp(built.projector, built.x, built.y, tol));
}

void check_projector(Tracker& tracker, const Projector& p, const char* name,
                     bool spectral) {
  const double herm = hermiticity_residual(p.mat());
  const double trace = std::abs(p.mat().trace().real() - double(p.rank()));
  double idem = 0.0;
  if (p.dim() > 0) {
    const Matrix defect = p.mat() * p.mat() - p.mat();
    // Frobenius dominates the spectral norm; use it for the large samples.
    idem = spectral ? hermitian_spectral_norm((defect + defect.adjoint()) / 2.0)
                    : defect.norm();
  }
  const bool pass = idem <= 1e-10 && herm <= 1e-12 && trace <= 1e-8;
  tracker.merge(1, pass,
                pass ? "" : std::string(name) + fmt(": idem %.1e herm %.1e tr %.1e",
                                                    idem, herm, trace));
}

void check_identity(Tracker& tracker, const Built& built, const char* name,
                    double tolerance_factor) {
  const double residual =
      commutator_identity_residual(built.projector, built.x, built.y);
  const double scale = built.x.spectral_norm() * built.y.spectral_norm();
  const bool pass = residual <= tolerance_factor * scale;
  tracker.merge(2, pass, pass ? "" : std::string(name) + fmt(": residual %.1e", residual));
}

void check_trace_reduction(Tracker& tracker, const Built& built,
                           const WannierBasis& basis, int window) {
  const TraceReductionCheck check =
      trace_reduction_check(built.projector, basis, built.x, built.y, window);
  const Projector truncated = truncated_projector(basis, window);
  const double scale = built.x.spectral_norm() * built.y.spectral_norm() *
                       std::max<double>(1.0, double(truncated.rank()));
  const bool pass =
      std::abs(check.lhs - check.rhs) <= 1e-8 * std::max(1.0, std::abs(check.lhs)) &&
      check.commutator_trace_abs <= 1e-8 * scale;
  tracker.merge(3, pass,
                pass ? "" : fmt("lhs-rhs %.1e traceless %.1e",
                                std::abs(check.lhs - check.rhs),
                                check.commutator_trace_abs));
}

void check_holder(Tracker& tracker, const Built& built, const WannierBasis& basis,
                  const std::vector<int>& windows, const char* name) {
  const PxPlSeries series =
      prop_p_x_pl(built.projector, basis, built.x, built.y, windows);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const int window = series.x_series.points[i].first;
    const TraceReductionCheck reduction =
        trace_reduction_check(built.projector, basis, built.x, built.y, window);
    const double norm_l2 = double(window) * window;
    const double rhs = 2.0 * std::sqrt(series.x_series.points[i].second * norm_l2) *
                       std::sqrt(series.y_series.points[i].second * norm_l2);
    const bool pass = std::abs(reduction.lhs) <= rhs + 1e-10;
    tracker.merge(4, pass,
                  pass ? "" : std::string(name) + fmt(" L=%g: |tr| %.1e > rhs %.1e",
                                                      double(window),
                                                      std::abs(reduction.lhs), rhs));
  }
}

double max_moment(const Built& built, const WannierBasis& basis, double s) {
  return localization_profile(basis, {s}, built.idx)[0].max_value;
}

bool non_increasing(const ScalingSeries& series) {
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (series.points[i].second > series.points[i - 1].second + 1e-15) return false;
  }
  return true;
}

bool strictly_decreasing(const ScalingSeries& series) {
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (series.points[i].second >= series.points[i - 1].second) return false;
  }
  return true;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  Tracker tracker;
  const double delta = 0.5;
  const double s_loc = 1.0 + delta;

  double trivial12_moment = 0.0, trivial16_moment = 0.0;
  double topo_moment_8 = 0.0, topo_moment_16 = 0.0;
  ScalingSeries near12, near16, far12, far16;
  double decay12 = 0.0, decay16 = 0.0;

  // ---- atomic model, random projector, small synthetic cases ----
  try {
    std::fprintf(stderr, "[acceptance] atomic and synthetic cases...\n");
    const Built atomic = build(8, ModelKind::atomic_limit, 0.0, 0.5, 3);
    check_projector(tracker, atomic.projector, "atomic8", true);
    check_identity(tracker, atomic, "atomic8", 1e-9);
    const WannierBasis atomic_basis = gwb(atomic, 0.25);
    check_trace_reduction(tracker, atomic, atomic_basis, 2);

    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss;
    Matrix a(20, 20);
    for (Eigen::Index j = 0; j < 20; ++j) {
      for (Eigen::Index i = 0; i < 20; ++i) a(i, j) = Complex(gauss(rng), gauss(rng));
    }
    const Projector random_p = Projector::from_range_basis(
        eigh(Matrix((a + a.adjoint()) / 2.0)).eigenvectors.leftCols(5));
    DiagonalOperator xr{RealVector(20)}, yr{RealVector(20)};
    for (Eigen::Index i = 0; i < 20; ++i) {
      xr.diag[i] = double(i % 7) - 3.0;
      yr.diag[i] = double(i % 5) - 2.0;
    }
    const double random_residual = commutator_identity_residual(random_p, xr, yr);
    tracker.merge(2,
                  random_residual <=
                      1e-10 * xr.spectral_norm() * yr.spectral_norm(),
                  "");
    check_projector(tracker, random_p, "random20", true);

    WannierBasis lone;
    lone.functions = Matrix::Identity(atomic.idx.total_dim(), 1);
    lone.centers = {Eigen::Vector2d(6.0, 6.0)};
    const WannierBasis lone_relabeled = relabel_to_lattice(lone);
    const Projector zero_rank = truncated_projector(lone_relabeled, 2);
    check_projector(tracker, zero_rank, "zero_rank", true);
  } catch (const std::exception& e) {
    for (int id : {1, 2, 3}) tracker.fail(id, std::string("atomic phase: ") + e.what());
  }

  // ---- trivial N=12 ----
  try {
    std::fprintf(stderr, "[acceptance] trivial N=12...\n");
    const Built built = trivial(12);
    const WannierBasis basis = gwb(built, 0.25);
    check_projector(tracker, built.projector, "trivial12", true);
    for (int window : {2, 3}) {
      check_projector(tracker, truncated_projector(basis, window), "trivial12_PL", true);
    }
    check_identity(tracker, built, "trivial12", 1e-9);
    check_trace_reduction(tracker, built, basis, 3);
    check_holder(tracker, built, basis, {2, 3, 4, 5, 6}, "trivial12");
    trivial12_moment = max_moment(built, basis, s_loc);

    near12 = prop_near_bd(basis, 4, {2, 4, 6, 8}, built.idx, delta);
    far12 = prop_far_bd(basis, 4, {2, 4, 6, 8}, built.idx, delta);
    decay12 = lemma_decay_trick(basis, 6, built.idx, delta).max_ratio;
  } catch (const std::exception& e) {
    for (int id : {1, 2, 3, 4, 6, 11}) {
      tracker.fail(id, std::string("trivial12 phase: ") + e.what());
    }
  }

  // ---- topological N=12 (checks that hold for any orthonormal family) ----
  try {
    std::fprintf(stderr, "[acceptance] topological N=12...\n");
    const Built built = topological(12);
    const WannierBasis basis = gwb(built, 1e-6 * 4 * 12);
    check_projector(tracker, built.projector, "topo12", true);
    check_identity(tracker, built, "topo12", 1e-9);
    check_holder(tracker, built, basis, {2, 3, 4, 5, 6}, "topo12");
  } catch (const std::exception& e) {
    for (int id : {1, 2, 4}) tracker.fail(id, std::string("topo12 phase: ") + e.what());
  }

  // ---- trivial N=16: markers, moments, scaling series ----
  try {
    std::fprintf(stderr, "[acceptance] trivial N=16...\n");
    const Built built = trivial(16);
    const WannierBasis basis = gwb(built, 0.25);
    check_projector(tracker, built.projector, "trivial16", false);
    check_projector(tracker, truncated_projector(basis, 4), "trivial16_PL4", false);
    check_trace_reduction(tracker, built, basis, 4);

    trivial16_moment = max_moment(built, basis, s_loc);
    const double growth = (trivial16_moment - trivial12_moment) /
                          std::max(1e-300, trivial12_moment);
    const MarkerResult marker_pl =
        chern_marker_pl(built.projector, basis, built.x, built.y, 4);
    const bool pass6 = growth < 0.10 && std::abs(marker_pl.value) < 0.05;
    tracker.merge(6, pass6,
                  fmt("moment growth %.2f%%, |marker_pl| %.1e", growth * 100.0,
                      std::abs(marker_pl.value)));

    const ScalingSeries approx = prop_approx_series(built.projector, basis,
                                                    {2, 3, 4, 5, 6, 7, 8}, built.idx);
    tracker.merge(8, approx.status == SeriesStatus::ok &&
                         approx.exponent <= 2.0 / 3.0 + 0.1,
                  fmt("fitted exponent %.3f (bound %.3f)", approx.exponent,
                      2.0 / 3.0 + 0.1));

    const ScalingSeries pl_chern = prop_pl_chern_diff(built.projector, basis, built.x,
                                                      built.y, {3, 4, 5, 6, 7, 8});
    tracker.merge(9, strictly_decreasing(pl_chern),
                  fmt("S1 diff %.2e -> %.2e over L=3..8",
                      pl_chern.points.front().second, pl_chern.points.back().second));

    const PxPlSeries p_x_pl = prop_p_x_pl(built.projector, basis, built.x, built.y,
                                          {3, 4, 5, 6, 7, 8});
    tracker.merge(10,
                  strictly_decreasing(p_x_pl.x_series) &&
                      strictly_decreasing(p_x_pl.y_series),
                  fmt("X %.2e -> %.2e", p_x_pl.x_series.points.front().second,
                      p_x_pl.x_series.points.back().second));

    near16 = prop_near_bd(basis, 4, {2, 4, 6, 8}, built.idx, delta);
    far16 = prop_far_bd(basis, 4, {2, 4, 6, 8}, built.idx, delta);
    decay16 = lemma_decay_trick(basis, 6, built.idx, delta).max_ratio;

    auto stable = [](double w12, double w16) {
      if (!std::isfinite(w12) || !std::isfinite(w16) || w12 <= 0.0 || w16 <= 0.0) {
        return false;
      }
      const double ratio = w16 / w12;
      return ratio >= 0.5 && ratio <= 2.0;
    };
    const bool witnesses_ok = stable(near12.witness, near16.witness) &&
                              stable(far12.witness, far16.witness) &&
                              stable(decay12, decay16);
    const bool monotone_ok = non_increasing(near12) && non_increasing(near16) &&
                             non_increasing(far12) && non_increasing(far16);
    tracker.merge(11, witnesses_ok && monotone_ok,
                  fmt("near C* %.2e->%.2e", near12.witness, near16.witness) +
                      fmt(", far C* %.2e->%.2e", far12.witness, far16.witness) +
                      fmt(", decay ratio %.2e->%.2e", decay12, decay16));
  } catch (const std::exception& e) {
    for (int id : {1, 3, 6, 8, 9, 10, 11}) {
      tracker.fail(id, std::string("trivial16 phase: ") + e.what());
    }
  }

  // ---- topological sizes N = 8, 12, 16: moment growth ----
  try {
    std::fprintf(stderr, "[acceptance] topological moment growth...\n");
    double topo_moment_12 = 0.0;
    for (int n : {8, 12, 16}) {
      const Built built = topological(n);
      const WannierBasis basis = gwb(built, 1e-6 * 4 * n);
      const double value = max_moment(built, basis, s_loc);
      if (n == 8) topo_moment_8 = value;
      if (n == 12) topo_moment_12 = value;
      if (n == 16) topo_moment_16 = value;
    }
    const double growth = (topo_moment_16 - topo_moment_8) / topo_moment_8;
    tracker.merge(7, growth > 0.25 && topo_moment_12 > topo_moment_8,
                  fmt("max moment %.1f -> %.1f (+%.0f%%)", topo_moment_8,
                      topo_moment_16, growth * 100.0));
  } catch (const std::exception& e) {
    tracker.fail(7, std::string("topological phase: ") + e.what());
  }

  // ---- marker quantization: clean models against the k-space oracle ----
  try {
    std::fprintf(stderr, "[acceptance] marker quantization (N=20)...\n");
    const auto phase_start = std::chrono::steady_clock::now();
    const int oracle = fhs_chern_number(1.0, 24);
    bool stable = std::abs(oracle) == 1;
    for (int grid : {12, 48}) {
      stable = stable && fhs_chern_number(1.0, grid) == oracle &&
               fhs_chern_number(3.0, grid) == fhs_chern_number(3.0, 24);
    }
    const Built clean16 = build(16, ModelKind::two_band_chern, 3.0, 0.0, 0);
    const MarkerResult trivial_marker =
        chern_marker_chi(clean16.projector, clean16.x, clean16.y, 4, clean16.idx);

    const Built topo20 = topological(20);
    check_projector(tracker, topo20.projector, "topo20", false);
    const MarkerResult marker =
        chern_marker_chi(topo20.projector, topo20.x, topo20.y, 5, topo20.idx);
    const double phase_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - phase_start).count();
    const bool pass = stable && std::abs(marker.value - double(oracle)) < 0.1 &&
                      std::abs(trivial_marker.value) < 0.05 && phase_seconds < 300.0;
    tracker.merge(5, pass,
                  fmt("marker %.4f vs oracle %g; trivial marker %.1e", marker.value,
                      double(oracle), std::abs(trivial_marker.value)) +
                      fmt(" (%.0f s)", phase_seconds));
  } catch (const std::exception& e) {
    tracker.fail(5, std::string("marker phase: ") + e.what());
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  tracker.merge(12, elapsed < 1800.0, fmt("%.1f s elapsed (budget 1800 s)", elapsed));

  const char* names[] = {
      "projector algebra (idempotency, Hermiticity, integer trace)",
      "commutator identity P[[X,P],[Y,P]]P = [PXP,PYP]",
      "trace reduction to the cross terms",
      "Hoelder chain bound on the windowed trace",
      "marker quantization against the k-space oracle",
      "localized basis implies vanishing marker (trivial model)",
      "no localized basis in the topological phase (moment growth)",
      "window approximation scaling ||chi_L P - P_L||",
      "normalized trace-norm difference decreasing",
      "cross-term Hilbert-Schmidt observables decreasing",
      "near/far bounds and strip lemma witnesses stable",
      "end-to-end runtime budget",
  };
  bool all_pass = true;
  for (int id = 1; id <= 12; ++id) {
    const auto it = tracker.results.find(id);
    const bool pass = it != tracker.results.end() && it->second.first;
    const std::string detail = it == tracker.results.end() ? "not run" : it->second.second;
    all_pass = all_pass && pass;
    std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id,
                names[id - 1], detail.empty() ? "" : " -- ", detail.c_str());
  }
  std::printf("%s (%d/12 criteria, %.1f s)\n", all_pass ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              int(std::count_if(tracker.results.begin(), tracker.results.end(),
                                [](const auto& r) { return r.second.first; })),
              elapsed);
  return all_pass ? 0 : 1;
}
