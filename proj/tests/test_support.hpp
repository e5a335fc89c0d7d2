#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "hydrofeat/series.hpp"

namespace hydrofeat::fixtures {

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = z(rng);
  return x;
}

inline std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(n);
  double prev = z(rng) / std::sqrt(1.0 - phi * phi);
  for (auto& v : x) {
    prev = phi * prev + z(rng);
    v = prev;
  }
  return x;
}

inline std::vector<double> sine(std::size_t n, double period, double noise_sd = 0.0, std::uint64_t seed = 1) {
  auto x = white_noise(n, seed, noise_sd > 0 ? noise_sd : 1.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double s = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
    x[t] = s + (noise_sd > 0 ? x[t] : 0.0);
  }
  return x;
}

inline std::vector<double> ramp(std::size_t n, double slope, double noise_sd = 0.0, std::uint64_t seed = 1) {
  auto x = white_noise(n, seed, noise_sd > 0 ? noise_sd : 1.0);
  for (std::size_t t = 0; t < n; ++t) x[t] = slope * static_cast<double>(t) + (noise_sd > 0 ? x[t] : 0.0);
  return x;
}

inline StandardizedSeries standardized(const std::vector<double>& x, std::size_t period = kDefaultPeriod) {
  return standardize(x, period);
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace hydrofeat::fixtures
