#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "hydrofeat/dependence.hpp"
#include "hydrofeat/distributional.hpp"
#include "hydrofeat/error.hpp"
#include "hydrofeat/parallel.hpp"
#include "hydrofeat/series.hpp"
#include "hydrofeat/stl.hpp"

namespace hydrofeat {

inline constexpr std::size_t kFeatureCount = 28;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "x_acf1",      "x_acf10",      "diff1_acf1",   "diff1_acf10",     "diff2_acf1", "diff2_acf10", "seas_acf1",
    "firstzero_ac", "x_pacf5",     "diff1x_pacf5", "diff2x_pacf5",    "seas_pacf",  "std1st_der",  "crossing_points",
    "entropy",     "flat_spots",   "lumpiness",    "stability",       "nonlinearity", "trend",     "spike",
    "linearity",   "curvature",    "e_acf1",       "e_acf10",         "seasonal_strength", "peak", "trough"};

inline std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  return std::nullopt;
}

inline std::size_t require_feature_index(std::string_view name) {
  const auto idx = feature_index(name);
  if (!idx) fail(ErrorCode::UnknownAttribute, "unknown feature '" + std::string(name) + "'");
  return *idx;
}

/// The 28 features of one series in canonical column order. Count-valued
/// features are stored as reals so the whole table is one numeric matrix.
struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  double get(std::string_view name) const { return values[require_feature_index(name)]; }
  bool operator==(const FeatureVector&) const = default;
};

struct FeatureOptions {
  std::size_t firstzero_horizon = kFirstZeroHorizon;
  std::vector<std::size_t> entropy_spans = {3, 3};
  std::size_t tile_width = 0;  // 0 selects the period
  StlOptions stl;
};

namespace detail {

template <typename Fn>
auto annotate(std::string_view feature, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw with_context(e, "while computing " + std::string(feature) + ": ");
  }
}

}  // namespace detail

inline FeatureVector extract_features(const StandardizedSeries& x, const FeatureOptions& opt = {}) {
  FeatureVector f;
  auto set = [&f](std::string_view name, double v) { f[require_feature_index(name)] = v; };

  const auto a = detail::annotate("acf features", [&] { return acf_feature_set(x, opt.firstzero_horizon); });
  set("x_acf1", a.x_acf1);
  set("x_acf10", a.x_acf10);
  set("diff1_acf1", a.diff1_acf1);
  set("diff1_acf10", a.diff1_acf10);
  set("diff2_acf1", a.diff2_acf1);
  set("diff2_acf10", a.diff2_acf10);
  set("seas_acf1", a.seas_acf1);
  set("firstzero_ac", a.firstzero_ac);

  const auto p = detail::annotate("pacf features", [&] { return pacf_feature_set(x); });
  set("x_pacf5", p.x_pacf5);
  set("diff1x_pacf5", p.diff1x_pacf5);
  set("diff2x_pacf5", p.diff2x_pacf5);
  set("seas_pacf", p.seas_pacf);

  set("std1st_der", detail::annotate("std1st_der", [&] { return std1st_der(x); }));
  set("crossing_points",
      static_cast<double>(detail::annotate("crossing_points", [&] { return crossing_points(x); })));
  set("entropy", detail::annotate("entropy", [&] { return spectral_entropy(x, opt.entropy_spans).value; }));
  set("flat_spots", static_cast<double>(detail::annotate("flat_spots", [&] { return flat_spots(x); })));
  const auto tiles = detail::annotate("lumpiness/stability", [&] { return tiled_stats(x, opt.tile_width); });
  set("lumpiness", tiles.lumpiness);
  set("stability", tiles.stability);
  set("nonlinearity", detail::annotate("nonlinearity", [&] { return nonlinearity(x); }));

  const auto s = detail::annotate("stl features", [&] { return stl_feature_set(x, opt.stl); });
  set("trend", s.trend_strength);
  set("spike", s.spike);
  set("linearity", s.linearity);
  set("curvature", s.curvature);
  set("e_acf1", s.e_acf1);
  set("e_acf10", s.e_acf10);
  set("seasonal_strength", s.seasonal_strength);
  set("peak", static_cast<double>(s.peak));
  set("trough", static_cast<double>(s.trough));

  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!std::isfinite(f[i])) fail(ErrorCode::NonFinite, "feature " + std::string(kFeatureNames[i]) + " is not finite");
  }
  return f;
}

inline FeatureVector extract_features(const TimeSeries& series, const FeatureOptions& opt = {}) {
  validate(series);
  return extract_features(standardize(series), opt);
}

enum class FailurePolicy { Strict, Drop };

struct SeriesTask {
  std::string catchment_id;
  VariableKind variable = VariableKind::Streamflow;
  TimeSeries series;
};

struct FeatureRow {
  std::string catchment_id;
  VariableKind variable = VariableKind::Streamflow;
  FeatureVector features;
  bool operator==(const FeatureRow&) const = default;
};

struct Exclusion {
  std::string catchment_id;
  std::string variable;
  std::string reason;
  bool operator==(const Exclusion&) const = default;
};

struct FeatureTable {
  std::vector<FeatureRow> rows;
  std::vector<Exclusion> exclusions;
};

/// Extracts one feature row per task on a worker pool. Rows come back sorted
/// by (catchment id, variable) whatever the worker count. Under Strict the
/// first failure (in that order) is rethrown; under Drop failures become
/// exclusions.
inline FeatureTable extract_batch(const std::vector<SeriesTask>& tasks, const FeatureOptions& opt = {},
                                  FailurePolicy policy = FailurePolicy::Drop, std::size_t workers = 1) {
  std::vector<std::size_t> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(tasks[a].catchment_id, tasks[a].variable) < std::tie(tasks[b].catchment_id, tasks[b].variable);
  });

  std::vector<std::optional<FeatureVector>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), workers, [&](std::size_t i) {
    const auto& task = tasks[order[i]];
    try {
      results[i] = extract_features(task.series, opt);
    } catch (const Error& e) {
      if (policy == FailurePolicy::Strict) {
        throw with_context(e, task.catchment_id + "/" + std::string(to_string(task.variable)) + ": ");
      }
      errors[i] = e.what();
    }
  });

  FeatureTable table;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& task = tasks[order[i]];
    if (results[i]) {
      table.rows.push_back({task.catchment_id, task.variable, *results[i]});
    } else {
      table.exclusions.push_back({task.catchment_id, std::string(to_string(task.variable)), errors[i]});
    }
  }
  return table;
}

// ---- delimited text I/O ----

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::string_view context) {
  double v = 0.0;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "NA" || s == "NaN" || s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    fail(ErrorCode::ParseError, std::string(context) + ": not a number '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line, char delim = ',') {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline void write_feature_table(std::ostream& os, const std::vector<FeatureRow>& rows) {
  os << "catchment_id,variable";
  for (auto name : kFeatureNames) os << ',' << name;
  os << '\n';
  for (const auto& row : rows) {
    os << row.catchment_id << ',' << to_string(row.variable);
    for (double v : row.features.values) os << ',' << format_double(v);
    os << '\n';
  }
}

inline std::vector<FeatureRow> read_feature_table(std::istream& is, std::string_view source = "features.csv") {
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::ParseError, std::string(source) + ": empty file");
  const auto header = split_csv_line(line);
  if (header.size() != kFeatureCount + 2 || header[0] != "catchment_id" || header[1] != "variable") {
    fail(ErrorCode::ParseError, std::string(source) + ":1: unexpected feature table header");
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (header[i + 2] != kFeatureNames[i]) {
      fail(ErrorCode::ParseError, std::string(source) + ":1: expected column " + std::string(kFeatureNames[i]));
    }
  }
  std::vector<FeatureRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (cells.size() != kFeatureCount + 2) fail(ErrorCode::ParseError, where + ": wrong number of fields");
    FeatureRow row{std::string(cells[0]), parse_variable_kind(cells[1]), {}};
    for (std::size_t i = 0; i < kFeatureCount; ++i) row.features[i] = parse_double(cells[i + 2], where);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_exclusions(std::ostream& os, const std::vector<Exclusion>& exclusions) {
  os << "catchment_id,variable,reason\n";
  for (const auto& e : exclusions) {
    std::string reason = e.reason;
    for (auto& c : reason) {
      if (c == ',' || c == '\n') c = ';';
    }
    os << e.catchment_id << ',' << e.variable << ',' << reason << '\n';
  }
}

}  // namespace hydrofeat
