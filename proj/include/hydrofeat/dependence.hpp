#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "hydrofeat/error.hpp"
#include "hydrofeat/series.hpp"

namespace hydrofeat {

/// Sample autocorrelations r_1..r_max_lag (index 0 holds lag 1).
struct AcfVector {
  std::vector<double> r;
  std::size_t n = 0;

  double at(std::size_t lag) const { return r.at(lag - 1); }
  std::size_t max_lag() const { return r.size(); }
};

/// Partial autocorrelations phi_1..phi_max_lag (index 0 holds lag 1).
struct PacfVector {
  std::vector<double> phi;

  double at(std::size_t lag) const { return phi.at(lag - 1); }
  std::size_t max_lag() const { return phi.size(); }
};

// Biased (1/n) estimator: keeps the sequence positive semidefinite so |r_k| <= 1
// and the Durbin-Levinson recursion stays stable.
inline AcfVector acf(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (max_lag == 0 || max_lag >= n) {
    fail(ErrorCode::LagTooLarge, "max_lag " + std::to_string(max_lag) + " must be in [1, " + std::to_string(n) + ")");
  }
  const double m = mean(x);
  std::vector<double> c(n);
  for (std::size_t t = 0; t < n; ++t) c[t] = x[t] - m;
  double denom = 0.0;
  for (double v : c) denom += v * v;
  if (!(denom > 0.0)) fail(ErrorCode::ZeroVariance, "autocorrelation of a constant series");

  AcfVector out{std::vector<double>(max_lag), n};
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += c[t] * c[t + k];
    out.r[k - 1] = s / denom;
  }
  return out;
}

/// Durbin-Levinson recursion over an already computed autocorrelation sequence.
inline PacfVector pacf_from_acf(const AcfVector& rho, std::size_t max_lag) {
  if (max_lag == 0 || max_lag > rho.max_lag()) {
    fail(ErrorCode::LagTooLarge, "pacf lag " + std::to_string(max_lag) + " exceeds available acf lags");
  }
  PacfVector out{std::vector<double>(max_lag)};
  std::vector<double> prev(max_lag + 1, 0.0), cur(max_lag + 1, 0.0);
  const auto& r = rho.r;
  out.phi[0] = r[0];
  prev[1] = r[0];
  for (std::size_t k = 2; k <= max_lag; ++k) {
    double num = r[k - 1];
    double den = 1.0;
    for (std::size_t j = 1; j < k; ++j) {
      num -= prev[j] * r[k - j - 1];
      den -= prev[j] * r[j - 1];
    }
    if (std::abs(den) < 1e-12) {
      fail(ErrorCode::NumericalSingularity, "Durbin-Levinson denominator vanished at lag " + std::to_string(k));
    }
    const double phi_kk = num / den;
    for (std::size_t j = 1; j < k; ++j) cur[j] = prev[j] - phi_kk * prev[k - j];
    cur[k] = phi_kk;
    out.phi[k - 1] = phi_kk;
    std::swap(prev, cur);
  }
  return out;
}

inline PacfVector pacf(std::span<const double> x, std::size_t max_lag) {
  return pacf_from_acf(acf(x, max_lag), max_lag);
}

inline double sum_of_squares(std::span<const double> v, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(count, v.size()); ++i) s += v[i] * v[i];
  return s;
}

// Smallest lag with r_k <= 0 within the scanned horizon; the horizon itself
// when no crossing occurs.
inline std::size_t first_zero_crossing(const AcfVector& rho, std::size_t horizon) {
  horizon = std::min(horizon, rho.max_lag());
  for (std::size_t k = 1; k <= horizon; ++k) {
    if (rho.at(k) <= 0.0) return k;
  }
  return horizon;
}

struct AcfFeatures {
  double x_acf1 = 0, x_acf10 = 0;
  double diff1_acf1 = 0, diff1_acf10 = 0;
  double diff2_acf1 = 0, diff2_acf10 = 0;
  double seas_acf1 = 0;
  double firstzero_ac = 0;
};

struct PacfFeatures {
  double x_pacf5 = 0, diff1x_pacf5 = 0, diff2x_pacf5 = 0, seas_pacf = 0;
};

inline constexpr std::size_t kFirstZeroHorizon = 730;

inline AcfFeatures acf_feature_set(const StandardizedSeries& x, std::size_t firstzero_horizon = kFirstZeroHorizon) {
  const std::size_t n = x.values.size();
  if (n < 2 * x.period + 2) {
    fail(ErrorCode::TooShort, "acf features need at least 2 x period + 2 values, got " + std::to_string(n));
  }
  const std::size_t horizon = std::min(n - 1, firstzero_horizon);
  const auto rho = acf(x.values, std::min(n - 1, std::max({horizon, x.period, std::size_t{10}})));
  const auto d1 = difference(x.values, 1);
  const auto d2 = difference(x.values, 2);
  const auto rho1 = acf(d1, std::min<std::size_t>(10, d1.size() - 1));
  const auto rho2 = acf(d2, std::min<std::size_t>(10, d2.size() - 1));

  AcfFeatures f;
  f.x_acf1 = rho.at(1);
  f.x_acf10 = sum_of_squares(rho.r, 10);
  f.diff1_acf1 = rho1.at(1);
  f.diff1_acf10 = sum_of_squares(rho1.r, 10);
  f.diff2_acf1 = rho2.at(1);
  f.diff2_acf10 = sum_of_squares(rho2.r, 10);
  f.seas_acf1 = rho.at(x.period);
  f.firstzero_ac = static_cast<double>(first_zero_crossing(rho, horizon));
  return f;
}

inline PacfFeatures pacf_feature_set(const StandardizedSeries& x) {
  const std::size_t n = x.values.size();
  const std::size_t seasonal_lag = std::max<std::size_t>(x.period, 5);
  if (n <= seasonal_lag + 2) {
    fail(ErrorCode::TooShort, "pacf features need more than period + 2 values, got " + std::to_string(n));
  }
  const auto phi = pacf(x.values, seasonal_lag);
  const auto phi1 = pacf(difference(x.values, 1), 5);
  const auto phi2 = pacf(difference(x.values, 2), 5);

  PacfFeatures f;
  f.x_pacf5 = sum_of_squares(phi.phi, 5);
  f.diff1x_pacf5 = sum_of_squares(phi1.phi, 5);
  f.diff2x_pacf5 = sum_of_squares(phi2.phi, 5);
  f.seas_pacf = phi.at(x.period);
  return f;
}

namespace detail {

// fftw planning is not thread safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// |DFT_j|^2 / n for j = 0..n/2.
inline std::vector<double> half_periodogram(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(x.size() / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> pgram(out.size());
  for (std::size_t j = 0; j < out.size(); ++j) pgram[j] = std::norm(out[j]) / static_cast<double>(n);
  return pgram;
}

// Modified Daniell kernel for one span, as weights over offsets -m..m.
inline std::vector<double> modified_daniell(std::size_t span) {
  const std::size_t m = span / 2;
  if (m == 0) return {1.0};
  std::vector<double> w(2 * m + 1, 1.0 / (2.0 * m));
  w.front() = w.back() = 1.0 / (4.0 * m);
  return w;
}

}  // namespace detail

struct SpectralEntropy {
  double value = 0.0;
};

/// Normalized Shannon entropy of the (optionally Daniell-smoothed) periodogram
/// over the Fourier frequencies in (0, pi]. Each span in `spans` applies one
/// modified Daniell pass, circularly, to the full-length periodogram.
inline SpectralEntropy spectral_entropy(const StandardizedSeries& x, std::span<const std::size_t> spans) {
  const std::size_t n = x.values.size();
  if (n < 16) fail(ErrorCode::TooShort, "spectral entropy needs at least 16 values");
  if (!(variance(x.values) > 0.0)) fail(ErrorCode::ZeroVariance, "spectral entropy of a constant series");

  const auto half = detail::half_periodogram(x.values);
  std::vector<double> full(n);
  for (std::size_t j = 0; j < n; ++j) full[j] = half[std::min(j, n - j)];
  full[0] = 0.5 * (full[1] + full[n - 1]);

  for (std::size_t span : spans) {
    const auto w = detail::modified_daniell(span);
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(w.size() / 2);
    std::vector<double> smoothed(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::ptrdiff_t k = -m; k <= m; ++k) {
        const std::ptrdiff_t idx = ((static_cast<std::ptrdiff_t>(j) + k) % static_cast<std::ptrdiff_t>(n) +
                                    static_cast<std::ptrdiff_t>(n)) %
                                   static_cast<std::ptrdiff_t>(n);
        s += w[static_cast<std::size_t>(k + m)] * full[static_cast<std::size_t>(idx)];
      }
      smoothed[j] = s;
    }
    full = std::move(smoothed);
  }

  const std::size_t n_freq = n / 2;
  double total = 0.0;
  for (std::size_t j = 1; j <= n_freq; ++j) total += full[j];
  if (!(total > 0.0)) fail(ErrorCode::ZeroVariance, "periodogram carries no power");
  double h = 0.0;
  for (std::size_t j = 1; j <= n_freq; ++j) {
    const double p = full[j] / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return {std::clamp(h / std::log(static_cast<double>(n_freq)), 0.0, 1.0)};
}

inline SpectralEntropy spectral_entropy(const StandardizedSeries& x) {
  static constexpr std::size_t kDefaultSpans[] = {3, 3};
  return spectral_entropy(x, kDefaultSpans);
}

}  // namespace hydrofeat
