#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydrofeat/error.hpp"

namespace hydrofeat {

enum class VariableKind { Temperature, Precipitation, Streamflow };

inline constexpr VariableKind kAllVariables[] = {VariableKind::Temperature, VariableKind::Precipitation,
                                                 VariableKind::Streamflow};

inline std::string_view to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::Temperature: return "temperature";
    case VariableKind::Precipitation: return "precipitation";
    case VariableKind::Streamflow: return "streamflow";
  }
  return "unknown";
}

inline VariableKind parse_variable_kind(std::string_view name) {
  for (auto kind : kAllVariables) {
    if (to_string(kind) == name) return kind;
  }
  fail(ErrorCode::ParseError, "unknown variable kind '" + std::string(name) + "'");
}

inline constexpr std::size_t kDefaultPeriod = 365;

/// A gap-free daily record with Feb 29 removed, so every year contributes
/// exactly `period` observations and lag `period` stays calendar aligned.
struct TimeSeries {
  std::vector<double> values;
  std::chrono::year_month_day start_date{std::chrono::year{1980}, std::chrono::January, std::chrono::day{1}};
  std::size_t period = kDefaultPeriod;
  VariableKind kind = VariableKind::Streamflow;
};

struct StandardizedSeries {
  std::vector<double> values;
  std::size_t period = kDefaultPeriod;
};

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sample variance, divisor n - 1. Two-pass for accuracy.
inline double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

inline const TimeSeries& validate(const TimeSeries& series) {
  if (series.period == 0) fail(ErrorCode::TooShort, "period must be positive");
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const double v = series.values[i];
    if (std::isnan(v)) fail(ErrorCode::MissingData, "missing value at index " + std::to_string(i));
    if (!std::isfinite(v)) fail(ErrorCode::NonFinite, "non-finite value at index " + std::to_string(i));
  }
  if (series.values.size() < 2 * series.period) {
    fail(ErrorCode::TooShort, "length " + std::to_string(series.values.size()) + " < 2 x period " +
                                  std::to_string(series.period));
  }
  return series;
}

inline StandardizedSeries standardize(std::span<const double> values, std::size_t period = kDefaultPeriod) {
  if (values.size() < 2) fail(ErrorCode::ZeroVariance, "fewer than two values");
  const double m = mean(values);
  const double sd = stddev(values);
  if (!(sd > 0.0)) fail(ErrorCode::ZeroVariance, "constant series cannot be standardized");
  StandardizedSeries out{std::vector<double>(values.size()), period};
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = (values[i] - m) / sd;
  return out;
}

inline StandardizedSeries standardize(const TimeSeries& series) { return standardize(series.values, series.period); }

inline std::vector<double> difference(std::span<const double> x, int order = 1) {
  if (order < 1 || order > 2) fail(ErrorCode::TooShort, "difference order must be 1 or 2");
  if (x.size() <= static_cast<std::size_t>(order)) {
    fail(ErrorCode::TooShort, "cannot difference " + std::to_string(x.size()) + " values " +
                                  std::to_string(order) + " times");
  }
  std::vector<double> out(x.size() - 1);
  for (std::size_t t = 0; t + 1 < x.size(); ++t) out[t] = x[t + 1] - x[t];
  if (order == 2) return difference(out, 1);
  return out;
}

}  // namespace hydrofeat
