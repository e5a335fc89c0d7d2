#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hydrofeat/error.hpp"
#include "hydrofeat/series.hpp"

namespace hydrofeat {

inline double median(std::span<const double> x) {
  if (x.empty()) fail(ErrorCode::TooShort, "median of an empty sequence");
  std::vector<double> v(x.begin(), x.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

inline double std1st_der(const StandardizedSeries& x) {
  if (x.values.size() < 3) fail(ErrorCode::TooShort, "std1st_der needs at least 3 values");
  return stddev(difference(x.values, 1));
}

inline std::size_t crossing_points(std::span<const double> x) {
  if (x.size() < 2) fail(ErrorCode::TooShort, "crossing_points needs at least 2 values");
  const double m = median(x);
  std::size_t count = 0;
  for (std::size_t t = 0; t + 1 < x.size(); ++t) {
    if ((x[t] <= m) != (x[t + 1] <= m)) ++count;
  }
  return count;
}

inline std::size_t crossing_points(const StandardizedSeries& x) { return crossing_points(x.values); }

/// Longest run of identical labels after cutting [min, max] into 10
/// equal-width bins (top bin closed at max).
inline std::size_t flat_spots(std::span<const double> x) {
  constexpr int kBins = 10;
  if (x.size() < 10) fail(ErrorCode::TooShort, "flat_spots needs at least 10 values");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) fail(ErrorCode::DegenerateRange, "flat_spots of a constant series");
  auto label = [&](double v) {
    const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * kBins));
    return std::clamp(b, 0, kBins - 1);
  };
  std::size_t best = 1, run = 1;
  int prev = label(x[0]);
  for (std::size_t t = 1; t < x.size(); ++t) {
    const int cur = label(x[t]);
    run = (cur == prev) ? run + 1 : 1;
    best = std::max(best, run);
    prev = cur;
  }
  return best;
}

inline std::size_t flat_spots(const StandardizedSeries& x) { return flat_spots(x.values); }

struct TiledWindowStats {
  std::vector<double> window_means;
  std::vector<double> window_variances;
  std::size_t width = 0;
};

inline TiledWindowStats tile(std::span<const double> x, std::size_t width) {
  if (width < 2 || x.size() < 2 * width) {
    fail(ErrorCode::TooShort, "tiling needs at least two windows of width " + std::to_string(width));
  }
  TiledWindowStats s;
  s.width = width;
  const std::size_t windows = x.size() / width;
  for (std::size_t w = 0; w < windows; ++w) {
    const auto win = x.subspan(w * width, width);
    s.window_means.push_back(mean(win));
    s.window_variances.push_back(variance(win));
  }
  return s;
}

struct TiledFeatures {
  double lumpiness = 0.0;
  double stability = 0.0;
};

// Trailing partial window is discarded.
inline TiledFeatures tiled_stats(const StandardizedSeries& x, std::size_t width = 0) {
  if (width == 0) width = x.period;
  const auto s = tile(x.values, width);
  return {variance(s.window_variances), variance(s.window_means)};
}

/// Neural-network flavoured linearity test (Terasvirta): regress x_t on an
/// intercept and two lags, then regress the residuals on the linear terms plus
/// all second- and third-order monomials of the lags. The chi-squared
/// statistic is rows * R^2 of that auxiliary fit; returns 10 * statistic / n.
inline double nonlinearity(const StandardizedSeries& x) {
  constexpr std::size_t kLags = 2;
  const std::size_t n = x.values.size();
  if (n < 20) fail(ErrorCode::TooShort, "nonlinearity needs at least 20 values");
  const auto rows = static_cast<Eigen::Index>(n - kLags);
  const auto& v = x.values;

  Eigen::MatrixXd base(rows, 3);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::size_t t = static_cast<std::size_t>(i) + kLags;
    base(i, 0) = 1.0;
    base(i, 1) = v[t - 1];
    base(i, 2) = v[t - 2];
    y(i) = v[t];
  }
  auto solve = [](const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.cols()) fail(ErrorCode::SingularDesign, "rank-deficient regression design");
    return Eigen::VectorXd(target - design * qr.solve(target));
  };
  const Eigen::VectorXd u = solve(base, y);

  Eigen::MatrixXd aux(rows, 10);
  aux.leftCols(3) = base;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double a = base(i, 1), b = base(i, 2);
    aux(i, 3) = a * a;
    aux(i, 4) = a * b;
    aux(i, 5) = b * b;
    aux(i, 6) = a * a * a;
    aux(i, 7) = a * a * b;
    aux(i, 8) = a * b * b;
    aux(i, 9) = b * b * b;
  }
  const Eigen::VectorXd e = solve(aux, u);
  const double ssr0 = u.squaredNorm();
  if (!(ssr0 > 0.0)) return 0.0;
  const double r2 = std::max(0.0, 1.0 - e.squaredNorm() / ssr0);
  const double statistic = static_cast<double>(rows) * r2;
  return 10.0 * statistic / static_cast<double>(n);
}

}  // namespace hydrofeat
