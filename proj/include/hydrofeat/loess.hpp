#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hydrofeat/error.hpp"

namespace hydrofeat {

namespace detail {

inline double tricube(double u) {
  const double a = 1.0 - u * u * u;
  return a * a * a;
}

}  // namespace detail

/// Local polynomial fit of y (observed at 0..n-1) evaluated at position xs,
/// which may lie outside the observed range. Uses the `span` nearest points;
/// when span exceeds n the bandwidth is widened by (span - n) / 2 as in STL.
/// Returns nullopt when every weight in the window vanishes.
inline std::optional<double> loess_point(std::span<const double> y, double xs, std::size_t span, int degree,
                                         std::span<const double> robustness_weights = {}) {
  const std::size_t n = y.size();
  if (n == 0) return std::nullopt;
  const std::size_t q = std::min(span, n);
  const double half = static_cast<double>(q - 1) / 2.0;
  const double max_left = static_cast<double>(n - q);
  const auto left = static_cast<std::size_t>(std::clamp(std::floor(xs - half + 0.5), 0.0, max_left));
  const std::size_t right = left + q - 1;

  double h = std::max(xs - static_cast<double>(left), static_cast<double>(right) - xs);
  if (span > n) h += static_cast<double>((span - n) / 2);
  const double h_hi = 0.999 * h, h_lo = 0.001 * h;

  thread_local std::vector<double> w;
  w.assign(q, 0.0);
  double total = 0.0;
  for (std::size_t j = left; j <= right; ++j) {
    const double d = std::abs(static_cast<double>(j) - xs);
    double wj = 0.0;
    if (d <= h_hi) wj = d <= h_lo ? 1.0 : detail::tricube(d / h);
    if (!robustness_weights.empty()) wj *= robustness_weights[j];
    w[j - left] = wj;
    total += wj;
  }
  if (!(total > 0.0)) return std::nullopt;
  for (auto& wj : w) wj /= total;

  auto weighted_mean = [&] {
    double s = 0.0;
    for (std::size_t j = left; j <= right; ++j) s += w[j - left] * y[j];
    return s;
  };
  if (degree == 0 || h <= 0.0) return weighted_mean();

  if (degree == 2) {
    // Normal equations in u = (j - xs) / h; value at xs is the intercept.
    double m[5] = {0, 0, 0, 0, 0}, r[3] = {0, 0, 0};
    for (std::size_t j = left; j <= right; ++j) {
      const double wj = w[j - left];
      if (wj == 0.0) continue;
      const double u = (static_cast<double>(j) - xs) / h;
      double p = wj;
      for (int k = 0; k < 5; ++k) {
        m[k] += p;
        if (k < 3) r[k] += p * y[j];
        p *= u;
      }
    }
    // Solve [[m0 m1 m2][m1 m2 m3][m2 m3 m4]] b = r by Cramer's rule.
    const double det = m[0] * (m[2] * m[4] - m[3] * m[3]) - m[1] * (m[1] * m[4] - m[3] * m[2]) +
                       m[2] * (m[1] * m[3] - m[2] * m[2]);
    const double scale = m[0] * m[2] * m[4];
    if (std::abs(det) > 1e-10 * std::max(scale, 1e-300)) {
      const double det0 = r[0] * (m[2] * m[4] - m[3] * m[3]) - m[1] * (r[1] * m[4] - m[3] * r[2]) +
                          m[2] * (r[1] * m[3] - m[2] * r[2]);
      return det0 / det;
    }
    // Too few distinct support points for a quadratic; fall through to linear.
  }

  double center = 0.0;
  for (std::size_t j = left; j <= right; ++j) center += w[j - left] * static_cast<double>(j);
  const double offset = xs - center;
  double c = 0.0;
  for (std::size_t j = left; j <= right; ++j) {
    const double dj = static_cast<double>(j) - center;
    c += w[j - left] * dj * dj;
  }
  const double range = static_cast<double>(n) - 1.0;
  if (std::sqrt(c) <= 0.001 * range) return weighted_mean();
  const double slope = offset / c;
  double s = 0.0;
  for (std::size_t j = left; j <= right; ++j) {
    s += w[j - left] * (slope * (static_cast<double>(j) - center) + 1.0) * y[j];
  }
  return s;
}

inline std::vector<double> loess_smooth(std::span<const double> y, std::size_t span, int degree,
                                        std::span<const double> robustness_weights = {}) {
  if (degree < 0 || degree > 2) fail(ErrorCode::SingularFit, "loess degree must be 0, 1 or 2");
  if (span < static_cast<std::size_t>(degree) + 1) {
    fail(ErrorCode::SingularFit, "loess span " + std::to_string(span) + " too small for degree " +
                                     std::to_string(degree));
  }
  if (!robustness_weights.empty() && robustness_weights.size() != y.size()) {
    fail(ErrorCode::LengthMismatch, "robustness weights must match the data length");
  }
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto v = loess_point(y, static_cast<double>(i), span, degree, robustness_weights);
    if (!v) fail(ErrorCode::SingularFit, "all loess weights vanished at position " + std::to_string(i));
    out[i] = *v;
  }
  return out;
}

}  // namespace hydrofeat
