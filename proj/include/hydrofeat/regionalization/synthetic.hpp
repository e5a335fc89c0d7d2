#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hydrofeat/error.hpp"
#include "hydrofeat/parallel.hpp"
#include "hydrofeat/regionalization/dataset.hpp"

namespace hydrofeat::regionalization {

struct SyntheticConfig {
  std::size_t n_catchments = 60;
  std::uint64_t seed = 42;
  int start_year = 1980;
  int end_year = 2013;
};

struct SyntheticPaths {
  std::filesystem::path series_dir;
  std::filesystem::path attributes_file;
};

inline std::string synthetic_id(std::size_t c) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "SYN%03zu", c + 1);
  return buf;
}

namespace detail {

struct SyntheticCatchment {
  std::array<double, kStaticCount> attributes{};
  std::vector<double> tmin, tmax, precipitation, streamflow;
};

inline SyntheticCatchment simulate_catchment(std::uint64_t seed, const std::vector<std::chrono::year_month_day>& days) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto uni = [&](double a, double b) { return a + (b - a) * u01(rng); };

  // Latent catchment properties.
  const double elev = uni(100.0, 3000.0);
  const double slope = std::exp(uni(std::log(2.0), std::log(150.0)));
  const double area = std::exp(uni(std::log(10.0), std::log(3000.0)));
  const double forest = uni(0.0, 1.0);
  const double soil_depth = uni(0.4, 2.0);
  const double clay = uni(0.05, 0.45);
  const double sand = uni(0.1, 0.9 - clay);
  const double porosity = uni(0.02, 0.25);
  // Climate latents with no static counterpart.
  const double wet_prob = uni(0.15, 0.6);
  const double persistence = uni(0.0, 0.35);
  const double p_seasonality = uni(0.0, 0.9);
  const double p_phase = uni(0.0, 365.0);
  const double mean_depth = uni(3.0, 12.0);

  SyntheticCatchment out;
  auto& a = out.attributes;
  a[0] = std::log10(elev);
  a[1] = std::log10(slope);
  a[2] = std::log10(area);
  a[3] = forest;
  a[4] = 0.5 + 4.5 * forest + 0.3 * n01(rng);
  a[5] = uni(0.1, 0.6);
  a[6] = uni(0.3, 1.0);
  a[7] = 2.0 + 25.0 * soil_depth / 2.0 + 2.0 * u01(rng);
  a[8] = soil_depth;
  a[9] = 0.25 * soil_depth * (1.0 - 0.5 * sand) + 0.02 * u01(rng);
  a[10] = sand;
  a[11] = 1.0 - sand - clay;
  a[12] = clay;
  a[13] = 0.02 * u01(rng);
  a[14] = 0.01 * u01(rng);
  a[15] = 0.01 * u01(rng);
  a[16] = uni(0.0, 0.6);
  a[17] = porosity;
  a[18] = -16.0 + 4.0 * sand + 0.3 * n01(rng);

  const double t_mean = 22.0 - 0.0065 * elev + 1.5 * n01(rng);
  const double t_amp = uni(5.0, 14.0);
  const double dtr = uni(7.0, 14.0);
  const double smax = 60.0 + 120.0 * soil_depth;
  const double k_fast = 0.15 + 0.5 * (std::log(slope) - std::log(2.0)) / (std::log(150.0) - std::log(2.0));
  const double k_slow = 0.004 + 0.05 * sand * (1.0 - clay);
  const double k_perc = 0.02 + 0.08 * sand;
  const double melt_factor = 2.5;
  const double et_scale = 0.12 * (0.6 + 0.8 * forest);

  const std::size_t n = days.size();
  out.tmin.resize(n);
  out.tmax.resize(n);
  out.precipitation.resize(n);
  out.streamflow.resize(n);
  std::gamma_distribution<double> amount(0.75, mean_depth / 0.75);

  double t_noise = 0.0, snow = 0.0, soil = 0.5 * smax, fast = 0.0, slow = 20.0;
  bool wet = false;
  for (std::size_t t = 0; t < n; ++t) {
    const auto doy = static_cast<double>(
        (std::chrono::sys_days{days[t]} - std::chrono::sys_days{days[t].year() / std::chrono::January / 1}).count());
    const double omega = 2.0 * std::numbers::pi / 365.25;
    t_noise = 0.75 * t_noise + 1.8 * n01(rng);
    const double temp = t_mean - t_amp * std::cos(omega * (doy - 15.0)) + t_noise;
    const double half = 0.5 * (dtr + 1.5 * n01(rng));
    out.tmin[t] = temp - std::abs(half);
    out.tmax[t] = temp + std::abs(half);

    const double season = 1.0 + p_seasonality * std::cos(omega * (doy - p_phase));
    const double p_wet = std::clamp(wet_prob * season + (wet ? persistence : 0.0), 0.01, 0.97);
    wet = u01(rng) < p_wet;
    const double p = wet ? amount(rng) * (0.5 + 0.5 * season) : 0.0;
    out.precipitation[t] = p;

    double water = 0.0;
    if (temp < 0.0) {
      snow += p;
    } else {
      water = p;
    }
    const double melt = std::min(snow, melt_factor * std::max(temp, 0.0));
    snow -= melt;
    water += melt;

    soil += water;
    const double excess = std::max(0.0, soil - smax);
    soil -= excess;
    const double et = std::min(soil, et_scale * std::max(temp, 0.0) * soil / smax);
    soil -= et;
    const double perc = k_perc * soil * soil / (smax * smax) * 10.0;
    soil -= std::min(soil, perc);
    fast += excess + 0.1 * water * soil / smax;
    slow += perc;
    const double q_fast = k_fast * fast;
    const double q_slow = k_slow * slow;
    fast -= q_fast;
    slow -= q_slow;
    out.streamflow[t] = (q_fast + q_slow + 0.01) * std::exp(0.05 * n01(rng));
  }
  return out;
}

inline void write_series(const std::filesystem::path& path, const std::vector<std::chrono::year_month_day>& days,
                         const std::vector<double>& values) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::ParseError, "cannot write " + path.string());
  std::string buf = "date,value\n";
  buf.reserve(days.size() * 20);
  char line[64];
  for (std::size_t t = 0; t < days.size(); ++t) {
    const int len = std::snprintf(line, sizeof(line), "%04d-%02u-%02u,", static_cast<int>(days[t].year()),
                                  static_cast<unsigned>(days[t].month()), static_cast<unsigned>(days[t].day()));
    buf.append(line, static_cast<std::size_t>(len));
    const auto res = std::to_chars(line, line + sizeof(line), values[t], std::chars_format::fixed, 4);
    buf.append(line, res.ptr);
    buf.push_back('\n');
  }
  os << buf;
}

}  // namespace detail

/// Writes a seeded synthetic dataset (series files including Feb 29, and an
/// attributes file with log_ columns already transformed) under `dir`.
inline SyntheticPaths generate_synthetic(const std::filesystem::path& dir, const SyntheticConfig& cfg = {},
                                         std::size_t workers = 1) {
  if (cfg.end_year < cfg.start_year) fail(ErrorCode::Config, "end year precedes start year");
  SyntheticPaths paths{dir / "series", dir / "attributes.csv"};
  std::filesystem::create_directories(paths.series_dir);

  DatasetConfig calendar_cfg;
  calendar_cfg.start_year = cfg.start_year;
  calendar_cfg.end_year = cfg.end_year;
  calendar_cfg.drop_leap_days = false;
  const Calendar calendar(calendar_cfg);
  std::vector<std::chrono::year_month_day> days(calendar.size());
  for (std::size_t i = 0; i < days.size(); ++i) days[i] = calendar.date(i);

  std::vector<std::array<double, kStaticCount>> attributes(cfg.n_catchments);
  parallel_for(cfg.n_catchments, workers, [&](std::size_t c) {
    const auto sim = detail::simulate_catchment(mix_seed(cfg.seed, c), days);
    const auto id = synthetic_id(c);
    detail::write_series(series_path(paths.series_dir, id, "tmin"), days, sim.tmin);
    detail::write_series(series_path(paths.series_dir, id, "tmax"), days, sim.tmax);
    detail::write_series(series_path(paths.series_dir, id, "precipitation"), days, sim.precipitation);
    detail::write_series(series_path(paths.series_dir, id, "streamflow"), days, sim.streamflow);
    attributes[c] = sim.attributes;
  });

  std::ofstream os(paths.attributes_file);
  if (!os) fail(ErrorCode::ParseError, "cannot write " + paths.attributes_file.string());
  os << "catchment_id";
  for (auto name : kStaticNames) os << ',' << name;
  os << '\n';
  for (std::size_t c = 0; c < cfg.n_catchments; ++c) {
    os << synthetic_id(c);
    for (double v : attributes[c]) os << ',' << format_double(v);
    os << '\n';
  }
  return paths;
}

/// Overwrites streamflow feature `target` with z(precipitation[a]) +
/// z(precipitation[b]) + noise_sd * N(0, 1), z being the cross-catchment
/// standardization.
inline void plant_target(std::vector<CatchmentRecord>& records, std::size_t target, std::size_t a, std::size_t b,
                         double noise_sd, std::uint64_t seed) {
  const std::size_t n = records.size();
  if (n < 2) fail(ErrorCode::TooShort, "planting needs at least two records");
  auto zscores = [&](std::size_t f) {
    std::vector<double> z(n);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += (z[i] = records[i].precipitation[f]);
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : z) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) fail(ErrorCode::ZeroVariance, "planted predictor is constant across records");
    for (double& v : z) v = (v - m) / sd;
    return z;
  };
  const auto za = zscores(a);
  const auto zb = zscores(b);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) records[i].streamflow[target] = za[i] + zb[i] + noise_sd * n01(rng);
}

}  // namespace hydrofeat::regionalization
