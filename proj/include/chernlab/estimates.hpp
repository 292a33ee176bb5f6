#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chernlab/chern.hpp"
#include "chernlab/fit.hpp"
#include "chernlab/lattice.hpp"
#include "chernlab/spectral.hpp"
#include "chernlab/types.hpp"
#include "chernlab/wannier.hpp"

namespace chernlab {

enum class SeriesStatus { ok, numerically_zero };

/// (parameter, observable) pairs with a fitted power-law exponent. Points at
/// or below 1e-14 are numerically zero and excluded from the log-log fit.
struct ScalingSeries {
  std::string name;
  std::string param_name;
  std::vector<std::pair<int, double>> points;  // sorted by parameter
  double exponent = 0.0;
  double r2 = 0.0;
  double witness = 0.0;  // witness constant C* for series with a stated envelope
  SeriesStatus status = SeriesStatus::ok;
};

namespace detail {

inline void fit_series(ScalingSeries& series) {
  std::vector<std::pair<double, double>> usable;
  for (const auto& [param, value] : series.points) {
    if (value > 1e-14) usable.emplace_back(double(param), value);
  }
  if (usable.size() < 3) {
    series.status = SeriesStatus::numerically_zero;
    series.exponent = 0.0;
    series.r2 = 0.0;
    return;
  }
  const PowerLawFit fit = fit_power_law(usable);
  series.status = SeriesStatus::ok;
  series.exponent = fit.exponent;
  series.r2 = fit.r2;
}

/// <t> = sqrt(t^2 + 1), the Japanese bracket of a scalar.
inline double bracket(double t) { return std::sqrt(t * t + 1.0); }

/// Weight of psi inside (inside = true) or outside the box window [-L, L)^2,
/// with site coordinates read off the index map.
inline double window_weight(const ComplexVector& psi, const LatticeIndexing& idx,
                            int window, bool inside) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double w = std::norm(psi[i]);
    if (w == 0.0) continue;
    const auto [site, orbital] = idx.site_of(i);
    const bool in = site.m1 >= -window && site.m1 < window && site.m2 >= -window &&
                    site.m2 < window;
    if (in == inside) total += w;
  }
  return total;
}

inline const std::vector<LatticeLabel>& labels_of(const WannierBasis& basis,
                                                  const char* caller) {
  if (!basis.relabeled()) {
    throw std::invalid_argument(std::string(caller) + ": basis not relabeled");
  }
  return *basis.labels;
}

}  // namespace detail

/// ||(1 - chi_{a+b}) P_a||_S2^2 vs b; the Hilbert-Schmidt norm expands over
/// the orthonormal columns of P_a. Target envelope C a^2 b^{-2(1+delta)}.
inline ScalingSeries prop_near_bd(const WannierBasis& basis, int a,
                                  const std::vector<int>& b_values,
                                  const LatticeIndexing& idx, double delta) {
  const auto& labels = detail::labels_of(basis, "prop_near_bd");
  if (a < 1) throw std::invalid_argument("prop_near_bd: a must be >= 1");
  for (int b : b_values) {
    if (b < 1 || a + b > idx.half_width) {
      throw std::invalid_argument("prop_near_bd: need 1 <= b and a + b <= N");
    }
  }
  ScalingSeries series;
  series.name = "near_bd";
  series.param_name = "b";
  for (int b : b_values) {
    double observable = 0.0;
    for (Eigen::Index c = 0; c < basis.count(); ++c) {
      if (labels[c].max_norm() > a) continue;
      observable += detail::window_weight(basis.functions.col(c), idx, a + b, false);
    }
    series.points.emplace_back(b, observable);
    series.witness = std::max(
        series.witness,
        observable * std::pow(double(b), 2.0 * (1.0 + delta)) / (double(a) * a));
  }
  std::sort(series.points.begin(), series.points.end());
  detail::fit_series(series);
  return series;
}

/// ||chi_a (P - P_{a+b})||_S2^2 vs b, expanded over the basis functions left
/// out of P_{a+b}. Target envelope C (b^-delta + a b^{-(1+delta)}).
inline ScalingSeries prop_far_bd(const WannierBasis& basis, int a,
                                 const std::vector<int>& b_values,
                                 const LatticeIndexing& idx, double delta) {
  const auto& labels = detail::labels_of(basis, "prop_far_bd");
  if (a < 1) throw std::invalid_argument("prop_far_bd: a must be >= 1");
  for (int b : b_values) {
    if (b < 1 || a + b > idx.half_width) {
      throw std::invalid_argument("prop_far_bd: need 1 <= b and a + b <= N");
    }
  }
  ScalingSeries series;
  series.name = "far_bd";
  series.param_name = "b";
  for (int b : b_values) {
    double observable = 0.0;
    for (Eigen::Index c = 0; c < basis.count(); ++c) {
      if (labels[c].max_norm() <= a + b) continue;
      observable += detail::window_weight(basis.functions.col(c), idx, a, true);
    }
    series.points.emplace_back(b, observable);
    const double bound = std::pow(double(b), -delta) +
                         double(a) * std::pow(double(b), -(1.0 + delta));
    series.witness = std::max(series.witness, observable / bound);
  }
  std::sort(series.points.begin(), series.points.end());
  detail::fit_series(series);
  return series;
}

struct DecayTrickEntry {
  LatticeLabel label;
  int region = 0;          // 1: both coordinates outside, 2: only m1, 3: only m2
  double observable = 0.0;  // ||chi_a psi_m||^2
  double bound = 0.0;       // bracket bound for the region
  double ratio = 0.0;
};

struct DecayTrickReport {
  std::vector<DecayTrickEntry> entries;
  double max_ratio = 0.0;
  std::array<long, 3> region_counts = {0, 0, 0};
};

/// Per-center bound check for the strip-localization lemma: every labeled
/// function with |m|_inf > a against its region-resolved bracket bound.
inline DecayTrickReport lemma_decay_trick(const WannierBasis& basis, int a,
                                          const LatticeIndexing& idx, double delta) {
  const auto& labels = detail::labels_of(basis, "lemma_decay_trick");
  if (a < 1) throw std::invalid_argument("lemma_decay_trick: a must be >= 1");
  DecayTrickReport report;
  for (Eigen::Index c = 0; c < basis.count(); ++c) {
    const LatticeLabel& label = labels[c];
    if (label.max_norm() <= a) continue;
    const bool out1 = std::abs(label.m1) > a;
    const bool out2 = std::abs(label.m2) > a;
    DecayTrickEntry entry;
    entry.label = label;
    const double b1 = detail::bracket(std::abs(label.m1) - a);
    const double b2 = detail::bracket(std::abs(label.m2) - a);
    if (out1 && out2) {
      entry.region = 1;
      entry.bound = std::pow(b1 * b2, -(1.0 + delta));
    } else if (out1) {
      entry.region = 2;
      entry.bound = std::pow(b1, -2.0 * (1.0 + delta));
    } else {
      entry.region = 3;
      entry.bound = std::pow(b2, -2.0 * (1.0 + delta));
    }
    entry.observable = detail::window_weight(basis.functions.col(c), idx, a, true);
    entry.ratio = entry.observable / entry.bound;
    report.max_ratio = std::max(report.max_ratio, entry.ratio);
    ++report.region_counts[std::size_t(entry.region - 1)];
    report.entries.push_back(std::move(entry));
  }
  return report;
}

/// ||chi_L P - P_L||_S2 vs L. Target envelope C L^{2/3}.
inline ScalingSeries prop_approx_series(const Projector& p, const WannierBasis& basis,
                                        const std::vector<int>& window_values,
                                        const LatticeIndexing& idx) {
  detail::labels_of(basis, "prop_approx_series");
  ScalingSeries series;
  series.name = "approx";
  series.param_name = "L";
  for (int window : window_values) {
    if (window < 1 || 2 * window > idx.half_width) {
      throw std::invalid_argument("prop_approx_series: need 1 <= L <= N/2");
    }
    const Projector truncated = truncated_projector(basis, window);
    const DiagonalOperator chi = box_mask(idx, window);
    Matrix difference = -truncated.mat();
    for (Eigen::Index i = 0; i < chi.dim(); ++i) {
      if (chi.diag[i] != 0.0) difference.row(i) += p.mat().row(i);
    }
    series.points.emplace_back(window, difference.norm());
  }
  std::sort(series.points.begin(), series.points.end());
  detail::fit_series(series);
  return series;
}

struct ApproxSplit {
  int window = 0;
  int ell = 0;
  double lhs = 0.0;        // ||chi_L P - P_L||_S2
  double far_term = 0.0;   // ||chi_L (P - P_{L+ell})||_S2
  double band_out = 0.0;   // ||chi_L (P_{L+ell} - P_L)||_S2
  double band_in = 0.0;    // ||(1-chi_L)(P_L - P_{L-ell})||_S2
  double near_term = 0.0;  // ||(1-chi_L) P_{L-ell}||_S2
};

/// The four-term window split with the proof's choice ell = L^{1/(3+2 delta)},
/// rounded up and capped so that L - ell >= 1.
inline ApproxSplit approx_four_term_split(const Projector& p, const WannierBasis& basis,
                                          int window, double delta,
                                          const LatticeIndexing& idx) {
  const auto& labels = detail::labels_of(basis, "approx_four_term_split");
  if (window < 2 || 2 * window > idx.half_width) {
    throw std::invalid_argument("approx_four_term_split: need 2 <= L <= N/2");
  }
  ApproxSplit split;
  split.window = window;
  split.ell = std::min<int>(
      window - 1,
      int(std::ceil(std::pow(double(window), 1.0 / (3.0 + 2.0 * delta)))));

  const Projector truncated = truncated_projector(basis, window);
  const Projector extended = truncated_projector(basis, window + split.ell);
  const DiagonalOperator chi = box_mask(idx, window);

  auto masked_difference_norm = [&](const Matrix& full, const Matrix& cut) {
    Matrix difference = -cut;
    for (Eigen::Index i = 0; i < chi.dim(); ++i) {
      if (chi.diag[i] != 0.0) difference.row(i) += full.row(i);
    }
    return difference.norm();
  };
  split.lhs = masked_difference_norm(p.mat(), truncated.mat());

  // chi_L (P - P_{L+ell}) needs the dense difference; the nested-truncation
  // bands expand exactly over their defining columns.
  {
    Matrix difference = p.mat() - extended.mat();
    for (Eigen::Index i = 0; i < chi.dim(); ++i) {
      if (chi.diag[i] == 0.0) difference.row(i).setZero();
    }
    split.far_term = difference.norm();
  }
  double band_out_sq = 0.0, band_in_sq = 0.0, near_sq = 0.0;
  for (Eigen::Index c = 0; c < basis.count(); ++c) {
    const int norm = labels[c].max_norm();
    if (norm > window && norm <= window + split.ell) {
      band_out_sq += detail::window_weight(basis.functions.col(c), idx, window, true);
    } else if (norm <= window && norm > window - split.ell) {
      band_in_sq += detail::window_weight(basis.functions.col(c), idx, window, false);
    } else if (norm <= window - split.ell) {
      near_sq += detail::window_weight(basis.functions.col(c), idx, window, false);
    }
  }
  split.band_out = std::sqrt(band_out_sq);
  split.band_in = std::sqrt(band_in_sq);
  split.near_term = std::sqrt(near_sq);
  return split;
}

/// ||chi_L P C P chi_L - P_L C P_L||_S1 / L^2 vs L with C = [[X,P],[Y,P]].
inline ScalingSeries prop_pl_chern_diff(const Projector& p, const WannierBasis& basis,
                                        const DiagonalOperator& x,
                                        const DiagonalOperator& y,
                                        const std::vector<int>& window_values) {
  const auto& labels = detail::labels_of(basis, "prop_pl_chern_diff");
  const int half_width = detail::half_width_from_positions(x);
  for (int window : window_values) {
    if (window < 1 || 2 * window > half_width) {
      throw std::invalid_argument("prop_pl_chern_diff: need 1 <= L <= N/2");
    }
  }

  const Matrix comm_x = commutator_with_diagonal(x, p.mat());
  const Matrix comm_y = commutator_with_diagonal(y, p.mat());
  const Matrix core = p.mat() * (comm_x * comm_y - comm_y * comm_x) * p.mat();

  ScalingSeries series;
  series.name = "pl_chern";
  series.param_name = "L";
  for (int window : window_values) {
    Matrix windowed = core;
    for (Eigen::Index i = 0; i < windowed.rows(); ++i) {
      const bool inside = x.diag[i] >= -window && x.diag[i] < window &&
                          y.diag[i] >= -window && y.diag[i] < window;
      if (!inside) {
        windowed.row(i).setZero();
        windowed.col(i).setZero();
      }
    }
    std::vector<Eigen::Index> selected;
    for (Eigen::Index c = 0; c < basis.count(); ++c) {
      if (labels[c].max_norm() <= window) selected.push_back(c);
    }
    Matrix columns(basis.dim(), Eigen::Index(selected.size()));
    for (std::size_t c = 0; c < selected.size(); ++c) {
      columns.col(Eigen::Index(c)) = basis.functions.col(selected[c]);
    }
    const Matrix small = columns.adjoint() * (core * columns);
    const Matrix truncated_core = columns * small * columns.adjoint();
    const double value = trace_norm_antihermitian(windowed - truncated_core) /
                         (double(window) * window);
    series.points.emplace_back(window, value);
  }
  std::sort(series.points.begin(), series.points.end());
  detail::fit_series(series);
  return series;
}

/// Spectral-norm side conditions: ||[[X,P],[Y,P]]|| <= 2 ||[X,P]|| ||[Y,P]||.
struct CommutatorNormBound {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline CommutatorNormBound commutator_norm_bound(const Projector& p,
                                                 const DiagonalOperator& x,
                                                 const DiagonalOperator& y) {
  const Matrix comm_x = commutator_with_diagonal(x, p.mat());
  const Matrix comm_y = commutator_with_diagonal(y, p.mat());
  const Matrix core = comm_x * comm_y - comm_y * comm_x;
  CommutatorNormBound bound;
  bound.lhs = schatten_norm(core, Schatten::inf);
  bound.rhs = 2.0 * schatten_norm(comm_x, Schatten::inf) *
              schatten_norm(comm_y, Schatten::inf);
  return bound;
}

struct PxPlSeries {
  ScalingSeries x_series;
  ScalingSeries y_series;
};

/// ||(P - P_L) X P_L||_S2^2 / L^2 and the Y analogue vs L.
inline PxPlSeries prop_p_x_pl(const Projector& p, const WannierBasis& basis,
                              const DiagonalOperator& x, const DiagonalOperator& y,
                              const std::vector<int>& window_values) {
  const auto& labels = detail::labels_of(basis, "prop_p_x_pl");
  const int half_width = detail::half_width_from_positions(x);
  PxPlSeries result;
  result.x_series.name = "p_x_pl_x";
  result.y_series.name = "p_x_pl_y";
  result.x_series.param_name = result.y_series.param_name = "L";
  for (int window : window_values) {
    if (window < 1 || 2 * window > half_width) {
      throw std::invalid_argument("prop_p_x_pl: need 1 <= L <= N/2");
    }
    std::vector<Eigen::Index> selected;
    for (Eigen::Index c = 0; c < basis.count(); ++c) {
      if (labels[c].max_norm() <= window) selected.push_back(c);
    }
    Matrix columns(basis.dim(), Eigen::Index(selected.size()));
    for (std::size_t c = 0; c < selected.size(); ++c) {
      columns.col(Eigen::Index(c)) = basis.functions.col(selected[c]);
    }
    const double norm_l2 = double(window) * window;
    auto observable = [&](const DiagonalOperator& position) {
      if (columns.cols() == 0) return 0.0;
      const Matrix moved = position.diag.cast<Complex>().asDiagonal() * columns;
      const Matrix outside =
          p.mat() * moved - columns * (columns.adjoint() * moved);
      return outside.squaredNorm();
    };
    result.x_series.points.emplace_back(window, observable(x) / norm_l2);
    result.y_series.points.emplace_back(window, observable(y) / norm_l2);
  }
  std::sort(result.x_series.points.begin(), result.x_series.points.end());
  std::sort(result.y_series.points.begin(), result.y_series.points.end());
  detail::fit_series(result.x_series);
  detail::fit_series(result.y_series);
  return result;
}

struct PxPlBandSplit {
  int window = 0;
  int ell = 0;
  double total = 0.0;     // ||(P - P_L) X P_L||_S2^2
  double interior = 0.0;  // ||(P - P_L) X P_{L-2 ell}||_S2^2
  double band = 0.0;      // ||(P - P_L) X (P_L - P_{L-2 ell})||_S2^2
  double sup_term = 0.0;  // sup_m ||(X - m1) psi_m||^2
  long band_count = 0;    // #{L - 2 ell < |m|_inf <= L}
};

/// Boundary-band split with ell = L^{2/(2+delta)} rounded up and capped at
/// floor(L/2) - 1. The orthogonal split total = interior + band is exact and
/// the band obeys band <= sup_term * band_count.
inline PxPlBandSplit p_x_pl_band_split(const Projector& p, const WannierBasis& basis,
                                       const DiagonalOperator& x, int window,
                                       double delta) {
  const auto& labels = detail::labels_of(basis, "p_x_pl_band_split");
  if (window < 4) throw std::invalid_argument("p_x_pl_band_split: need L >= 4");
  PxPlBandSplit split;
  split.window = window;
  split.ell = std::max(
      1, std::min(window / 2 - 1,
                  int(std::ceil(std::pow(double(window), 2.0 / (2.0 + delta))))));
  const int inner = window - 2 * split.ell;

  std::vector<Eigen::Index> selected;
  for (Eigen::Index c = 0; c < basis.count(); ++c) {
    if (labels[c].max_norm() <= window) selected.push_back(c);
  }
  Matrix columns(basis.dim(), Eigen::Index(selected.size()));
  for (std::size_t c = 0; c < selected.size(); ++c) {
    columns.col(Eigen::Index(c)) = basis.functions.col(selected[c]);
  }
  if (columns.cols() == 0) return split;
  const Matrix moved = x.diag.cast<Complex>().asDiagonal() * columns;
  const Matrix outside = p.mat() * moved - columns * (columns.adjoint() * moved);

  for (std::size_t c = 0; c < selected.size(); ++c) {
    const double contribution = outside.col(Eigen::Index(c)).squaredNorm();
    split.total += contribution;
    if (labels[selected[c]].max_norm() <= inner) {
      split.interior += contribution;
    } else {
      split.band += contribution;
      ++split.band_count;
    }
  }
  for (Eigen::Index c = 0; c < basis.count(); ++c) {
    const ComplexVector shifted =
        (x.diag.array() - double(labels[c].m1)).matrix().cast<Complex>().asDiagonal() *
        basis.functions.col(c);
    split.sup_term = std::max(split.sup_term, shifted.squaredNorm());
  }
  return split;
}

}  // namespace chernlab
