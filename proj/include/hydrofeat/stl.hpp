#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hydrofeat/dependence.hpp"
#include "hydrofeat/distributional.hpp"
#include "hydrofeat/error.hpp"
#include "hydrofeat/loess.hpp"
#include "hydrofeat/series.hpp"

namespace hydrofeat {

struct StlOptions {
  // nullopt selects periodic seasonality: every cycle-subseries collapses to
  // its (robustness-weighted) mean.
  std::optional<std::size_t> seasonal_span;
  int seasonal_degree = 0;
  // 0 selects 2 * period + 1.
  std::size_t trend_span = 0;
  int trend_degree = 1;
  // 0 selects the smallest odd integer >= period.
  std::size_t lowpass_span = 0;
  int lowpass_degree = 1;
  std::size_t inner_iterations = 2;
  std::size_t outer_iterations = 0;
  // Harmonics kept when locating peak and trough on the mean seasonal shape;
  // 0 uses the raw per-position means.
  std::size_t peak_harmonics = 2;
};

struct Decomposition {
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> remainder;
  std::size_t period = kDefaultPeriod;
};

namespace detail {

inline std::size_t next_odd(std::size_t v) { return v % 2 == 1 ? v : v + 1; }

inline std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
  std::vector<double> out(x.size() - len + 1);
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += x[i];
  out[0] = s / static_cast<double>(len);
  for (std::size_t i = 1; i < out.size(); ++i) {
    s += x[i + len - 1] - x[i - 1];
    out[i] = s / static_cast<double>(len);
  }
  return out;
}

// Smooths every cycle-subseries and extends it by one cycle at both ends.
// Output has length n + 2 * period, aligned so index period + t matches t.
inline std::vector<double> smooth_cycle_subseries(std::span<const double> x, std::size_t period,
                                                  std::span<const double> rw, const StlOptions& opt) {
  const std::size_t n = x.size();
  std::vector<double> out(n + 2 * period);
  std::vector<double> sub, sub_w;
  for (std::size_t j = 0; j < period; ++j) {
    sub.clear();
    sub_w.clear();
    for (std::size_t t = j; t < n; t += period) {
      sub.push_back(x[t]);
      sub_w.push_back(rw.empty() ? 1.0 : rw[t]);
    }
    const std::size_t m = sub.size();
    auto put = [&](std::ptrdiff_t k, double v) {
      out[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + static_cast<std::ptrdiff_t>(period) * (k + 1))] = v;
    };
    if (!opt.seasonal_span) {
      double sw = 0.0, s = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        sw += sub_w[k];
        s += sub_w[k] * sub[k];
      }
      if (!(sw > 0.0)) fail(ErrorCode::SingularFit, "all robustness weights vanished in a cycle-subseries");
      const double level = s / sw;
      for (std::ptrdiff_t k = -1; k <= static_cast<std::ptrdiff_t>(m); ++k) put(k, level);
    } else {
      const std::span<const double> weights = rw.empty() ? std::span<const double>{} : std::span<const double>(sub_w);
      for (std::ptrdiff_t k = -1; k <= static_cast<std::ptrdiff_t>(m); ++k) {
        const auto v = loess_point(sub, static_cast<double>(k), *opt.seasonal_span, opt.seasonal_degree, weights);
        if (!v) fail(ErrorCode::SingularFit, "seasonal smoother weights vanished");
        put(k, *v);
      }
    }
  }
  return out;
}

inline std::vector<double> robustness_weights(std::span<const double> remainder) {
  std::vector<double> abs_r(remainder.size());
  for (std::size_t i = 0; i < remainder.size(); ++i) abs_r[i] = std::abs(remainder[i]);
  const double h = 6.0 * median(abs_r);
  std::vector<double> w(remainder.size());
  for (std::size_t i = 0; i < remainder.size(); ++i) {
    const double u = h > 0.0 ? abs_r[i] / h : 0.0;
    if (u <= 0.001) {
      w[i] = 1.0;
    } else if (u <= 0.999) {
      const double a = 1.0 - u * u;
      w[i] = a * a;
    } else {
      w[i] = 0.0;
    }
  }
  return w;
}

}  // namespace detail

/// Additive seasonal-trend decomposition by Loess. Runs the inner loop
/// (detrend, cycle-subseries smoothing, low-pass removal, deseasonalize,
/// trend Loess) a fixed number of times, optionally wrapped in robustness
/// iterations. remainder is defined as x - trend - seasonal.
inline Decomposition stl_decompose(std::span<const double> x, std::size_t period, const StlOptions& opt = {}) {
  const std::size_t n = x.size();
  if (period < 2) fail(ErrorCode::TooShort, "stl period must be at least 2");
  if (n < 2 * period) {
    fail(ErrorCode::TooShort, "stl needs at least 2 x period values, got " + std::to_string(n));
  }
  const std::size_t trend_span = detail::next_odd(opt.trend_span ? opt.trend_span : 2 * period + 1);
  const std::size_t lowpass_span = detail::next_odd(opt.lowpass_span ? opt.lowpass_span : period);

  Decomposition d{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), period};
  std::vector<double> rw;
  std::vector<double> work(n);

  for (std::size_t outer = 0; outer <= opt.outer_iterations; ++outer) {
    for (std::size_t inner = 0; inner < std::max<std::size_t>(opt.inner_iterations, 1); ++inner) {
      for (std::size_t t = 0; t < n; ++t) work[t] = x[t] - d.trend[t];
      const auto cycle = detail::smooth_cycle_subseries(work, period, rw, opt);
      const auto ma1 = detail::moving_average(cycle, period);
      const auto ma2 = detail::moving_average(ma1, period);
      const auto ma3 = detail::moving_average(ma2, 3);
      const auto low = loess_smooth(ma3, lowpass_span, opt.lowpass_degree);
      for (std::size_t t = 0; t < n; ++t) d.seasonal[t] = cycle[period + t] - low[t];
      for (std::size_t t = 0; t < n; ++t) work[t] = x[t] - d.seasonal[t];
      d.trend = loess_smooth(work, trend_span, opt.trend_degree, rw);
    }
    if (outer < opt.outer_iterations) {
      for (std::size_t t = 0; t < n; ++t) d.remainder[t] = x[t] - d.trend[t] - d.seasonal[t];
      rw = detail::robustness_weights(d.remainder);
    }
  }

  if (!opt.seasonal_span) {
    std::vector<double> sums(period, 0.0);
    std::vector<std::size_t> counts(period, 0);
    for (std::size_t t = 0; t < n; ++t) {
      sums[t % period] += d.seasonal[t];
      ++counts[t % period];
    }
    for (std::size_t t = 0; t < n; ++t) d.seasonal[t] = sums[t % period] / static_cast<double>(counts[t % period]);
  }
  for (std::size_t t = 0; t < n; ++t) d.remainder[t] = x[t] - d.trend[t] - d.seasonal[t];
  return d;
}

inline Decomposition stl_decompose(const StandardizedSeries& x, const StlOptions& opt = {}) {
  return stl_decompose(x.values, x.period, opt);
}

struct StlFeatureSet {
  double trend_strength = 0;
  double seasonal_strength = 0;
  double spike = 0;
  double linearity = 0;
  double curvature = 0;
  double e_acf1 = 0;
  double e_acf10 = 0;
  std::size_t peak = 1;
  std::size_t trough = 1;
};

/// Columns p1, p2 of the orthonormal polynomial basis over t = 1..n,
/// orthogonal to the constant, with p1 increasing and p2 positive at the ends.
inline std::pair<std::vector<double>, std::vector<double>> orthonormal_poly2(std::size_t n) {
  const double center = (static_cast<double>(n) + 1.0) / 2.0;
  const double scale = static_cast<double>(n);
  std::vector<double> c0(n, 1.0 / std::sqrt(static_cast<double>(n))), p1(n), p2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i + 1) - center) / scale;
    p1[i] = u;
    p2[i] = u * u;
  }
  auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  };
  auto remove = [&](std::vector<double>& v, const std::vector<double>& basis) {
    const double c = dot(v, basis);
    for (std::size_t i = 0; i < n; ++i) v[i] -= c * basis[i];
  };
  auto normalize = [&](std::vector<double>& v) {
    const double norm = std::sqrt(dot(v, v));
    for (auto& e : v) e /= norm;
  };
  // Two Gram-Schmidt sweeps.
  for (int sweep = 0; sweep < 2; ++sweep) remove(p1, c0);
  normalize(p1);
  for (int sweep = 0; sweep < 2; ++sweep) {
    remove(p2, c0);
    remove(p2, p1);
  }
  normalize(p2);
  if (p1.back() < p1.front()) {
    for (auto& e : p1) e = -e;
  }
  if (p2.front() < 0.0) {
    for (auto& e : p2) e = -e;
  }
  return {std::move(p1), std::move(p2)};
}

/// Sample variance of the n leave-one-out sample variances, from running sums.
inline double leave_one_out_variance_spread(std::span<const double> e) {
  const std::size_t n = e.size();
  if (n < 4) fail(ErrorCode::TooShort, "spike needs at least 4 values");
  const double m = mean(e);
  double ss = 0.0;
  for (double v : e) ss += (v - m) * (v - m);
  const double nd = static_cast<double>(n);
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = e[i] - m;
    loo[i] = (ss - nd / (nd - 1.0) * dev * dev) / (nd - 2.0);
  }
  return variance(loo);
}

/// Least-squares projection of a periodic shape onto its mean and the first
/// `harmonics` Fourier harmonics.
inline std::vector<double> harmonic_smooth(std::span<const double> shape, std::size_t harmonics) {
  const std::size_t p = shape.size();
  std::vector<double> out(p, mean(shape));
  const std::size_t k_max = std::min(harmonics, (p - 1) / 2);
  for (std::size_t k = 1; k <= k_max; ++k) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k * j) / static_cast<double>(p);
      a += shape[j] * std::cos(w);
      b += shape[j] * std::sin(w);
    }
    a *= 2.0 / static_cast<double>(p);
    b *= 2.0 / static_cast<double>(p);
    for (std::size_t j = 0; j < p; ++j) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k * j) / static_cast<double>(p);
      out[j] += a * std::cos(w) + b * std::sin(w);
    }
  }
  return out;
}

inline StlFeatureSet stl_feature_set(const Decomposition& d, std::size_t peak_harmonics = 2) {
  const std::size_t n = d.trend.size();
  std::vector<double> deseason(n), detrend(n);
  for (std::size_t t = 0; t < n; ++t) {
    deseason[t] = d.trend[t] + d.remainder[t];
    detrend[t] = d.seasonal[t] + d.remainder[t];
  }
  const double var_rem = variance(d.remainder);
  const double var_deseason = variance(deseason);
  const double var_detrend = variance(detrend);
  if (!(var_deseason > 0.0)) fail(ErrorCode::DegenerateVariance, "trend + remainder has zero variance");
  if (!(var_detrend > 0.0)) fail(ErrorCode::DegenerateVariance, "seasonal + remainder has zero variance");

  StlFeatureSet f;
  f.trend_strength = std::clamp(1.0 - var_rem / var_deseason, 0.0, 1.0);
  f.seasonal_strength = std::clamp(1.0 - var_rem / var_detrend, 0.0, 1.0);
  f.spike = leave_one_out_variance_spread(d.remainder);

  const auto [p1, p2] = orthonormal_poly2(n);
  for (std::size_t t = 0; t < n; ++t) {
    f.linearity += d.trend[t] * p1[t];
    f.curvature += d.trend[t] * p2[t];
  }

  const auto rho = acf(d.remainder, 10);
  f.e_acf1 = rho.at(1);
  f.e_acf10 = sum_of_squares(rho.r, 10);

  std::vector<double> shape(d.period, 0.0);
  std::vector<std::size_t> counts(d.period, 0);
  for (std::size_t t = 0; t < n; ++t) {
    shape[t % d.period] += d.seasonal[t];
    ++counts[t % d.period];
  }
  for (std::size_t j = 0; j < d.period; ++j) shape[j] /= static_cast<double>(std::max<std::size_t>(counts[j], 1));
  if (peak_harmonics > 0) {
    auto smooth = harmonic_smooth(shape, peak_harmonics);
    const auto [raw_lo, raw_hi] = std::minmax_element(shape.begin(), shape.end());
    const auto [lo, hi] = std::minmax_element(smooth.begin(), smooth.end());
    // A shape with no power in the kept harmonics falls back to the raw means.
    if (*hi - *lo > 1e-9 * (*raw_hi - *raw_lo)) shape = std::move(smooth);
  }
  // max_element/min_element return the first extremum: smallest position wins ties.
  f.peak = static_cast<std::size_t>(std::max_element(shape.begin(), shape.end()) - shape.begin()) + 1;
  f.trough = static_cast<std::size_t>(std::min_element(shape.begin(), shape.end()) - shape.begin()) + 1;
  return f;
}

inline StlFeatureSet stl_feature_set(const StandardizedSeries& x, const StlOptions& opt = {}) {
  return stl_feature_set(stl_decompose(x, opt), opt.peak_harmonics);
}

}  // namespace hydrofeat
