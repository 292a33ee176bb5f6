#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace chernlab {

struct PowerLawFit {
  double exponent = 0.0;
  double r2 = 0.0;
};

namespace detail {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept with the usual R^2.
/// A constant series fits exactly (R^2 = 1 by convention).
inline LinearFit linear_fit(const std::vector<double>& x,
                            const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) {
    throw std::invalid_argument("linear_fit: need >= 2 paired samples");
  }
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r2 = syy > 1e-300 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace detail

/// Least-squares exponent p of y ~ C x^p on log-log axes. Requires at least
/// three strictly positive points.
inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (x > 0.0 && y > 0.0) {
      lx.push_back(std::log(x));
      ly.push_back(std::log(y));
    }
  }
  if (lx.size() < 3) {
    throw std::invalid_argument("fit_power_law: fewer than 3 usable points");
  }
  const auto fit = detail::linear_fit(lx, ly);
  return PowerLawFit{fit.slope, fit.r2};
}

}  // namespace chernlab
