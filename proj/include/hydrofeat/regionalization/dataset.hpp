#pragma once

#include <algorithm>
#include <charconv>
#include <limits>
#include <utility>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hydrofeat/error.hpp"
#include "hydrofeat/features.hpp"
#include "hydrofeat/series.hpp"

namespace hydrofeat::regionalization {

inline constexpr std::size_t kStaticCount = 19;

inline constexpr std::array<std::string_view, kStaticCount> kStaticNames = {
    "log_elev_mean",        "log_slope_mean",     "log_area_gages2",    "frac_forest",       "lai_max",
    "gvf_diff",             "dom_land_cover_frac", "soil_depth_pelletier", "soil_depth_statsgo", "max_water_content",
    "sand_frac",            "silt_frac",          "clay_frac",          "water_frac",        "organic_frac",
    "other_frac",           "carbonate_rocks_frac", "geol_porosity",     "geol_permeability"};

struct CatchmentRecord {
  std::string catchment_id;
  std::array<double, kStaticCount> static_attributes{};
  FeatureVector temperature;
  FeatureVector precipitation;
  FeatureVector streamflow;

  const FeatureVector& features(VariableKind kind) const {
    switch (kind) {
      case VariableKind::Temperature: return temperature;
      case VariableKind::Precipitation: return precipitation;
      case VariableKind::Streamflow: break;
    }
    return streamflow;
  }
  FeatureVector& features(VariableKind kind) {
    return const_cast<FeatureVector&>(std::as_const(*this).features(kind));
  }
};

struct DatasetConfig {
  int start_year = 1980;
  int end_year = 2013;
  bool drop_leap_days = true;
  std::size_t period = kDefaultPeriod;
  // Apply log10 to the log_ attributes (input holds untransformed values).
  bool log_transform_attributes = false;
  FeatureOptions features;
  FailurePolicy policy = FailurePolicy::Drop;
  std::size_t workers = 1;
};

/// Raw files that make up one catchment.
inline constexpr std::array<std::string_view, 4> kSeriesFileKinds = {"tmin", "tmax", "precipitation", "streamflow"};

inline std::filesystem::path series_path(const std::filesystem::path& dir, std::string_view id, std::string_view kind) {
  return dir / (std::string(id) + "_" + std::string(kind) + ".csv");
}

// ---- calendar ----

inline std::optional<std::chrono::year_month_day> parse_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [](std::string_view part, auto& out) {
    const auto res = std::from_chars(part.data(), part.data() + part.size(), out);
    return res.ec == std::errc{} && res.ptr == part.data() + part.size();
  };
  if (!num(s.substr(0, 4), y) || !num(s.substr(5, 2), m) || !num(s.substr(8, 2), d)) return std::nullopt;
  const std::chrono::year_month_day date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline bool is_leap_day(const std::chrono::year_month_day& d) {
  return d.month() == std::chrono::February && d.day() == std::chrono::day{29};
}

/// Day-number -> position map of the analysis window.
class Calendar {
 public:
  explicit Calendar(const DatasetConfig& cfg) {
    using namespace std::chrono;
    const sys_days first{year{cfg.start_year} / January / 1};
    const sys_days last{year{cfg.end_year} / December / 31};
    for (sys_days day = first; day <= last; day += days{1}) {
      if (cfg.drop_leap_days && is_leap_day(year_month_day{day})) continue;
      index_.emplace(day.time_since_epoch().count(), dates_.size());
      dates_.push_back(year_month_day{day});
    }
  }

  std::size_t size() const { return dates_.size(); }
  const std::chrono::year_month_day& date(std::size_t i) const { return dates_[i]; }
  std::optional<std::size_t> position(const std::chrono::year_month_day& d) const {
    const auto it = index_.find(std::chrono::sys_days{d}.time_since_epoch().count());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::chrono::year_month_day> dates_;
  std::unordered_map<long, std::size_t> index_;
};

/// Reads a `date,value` file into the window. Malformed rows raise ParseError
/// (with file and line); dates outside the window are ignored; gaps and
/// missing values raise IncompleteRecord.
inline std::vector<double> read_series_file(const std::filesystem::path& path, const Calendar& calendar) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IncompleteRecord, "missing series file " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, path.string() + ":1: empty file");
  const auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "date" || header[1] != "value") {
    fail(ErrorCode::ParseError, path.string() + ":1: expected header 'date,value'");
  }
  std::vector<double> values(calendar.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> seen(calendar.size(), false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto cells = split_csv_line(line);
    if (cells.size() != 2) fail(ErrorCode::ParseError, where + ": expected 2 fields");
    const auto date = parse_iso_date(cells[0]);
    if (!date) fail(ErrorCode::ParseError, where + ": bad date '" + std::string(cells[0]) + "'");
    const double v = parse_double(cells[1], where);
    const auto pos = calendar.position(*date);
    if (!pos) continue;
    if (seen[*pos]) fail(ErrorCode::ParseError, where + ": duplicate date " + std::string(cells[0]));
    seen[*pos] = true;
    values[*pos] = v;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      const auto& d = calendar.date(i);
      fail(ErrorCode::IncompleteRecord,
           path.filename().string() + ": no valid value for " + std::to_string(static_cast<int>(d.year())) + "-" +
               std::to_string(static_cast<unsigned>(d.month())) + "-" + std::to_string(static_cast<unsigned>(d.day())));
    }
  }
  return values;
}

inline std::vector<double> daily_mean_temperature(std::span<const double> tmin, std::span<const double> tmax) {
  if (tmin.size() != tmax.size()) fail(ErrorCode::LengthMismatch, "tmin and tmax differ in length");
  std::vector<double> out(tmin.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = 0.5 * (tmin[t] + tmax[t]);
  return out;
}

struct AttributeTable {
  std::map<std::string, std::array<double, kStaticCount>> rows;
  std::vector<Exclusion> exclusions;
};

inline AttributeTable read_attributes(const std::filesystem::path& path, bool log_transform) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open attributes file " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, path.string() + ":1: empty file");
  const auto header = split_csv_line(line);
  std::optional<std::size_t> id_col;
  std::array<std::optional<std::size_t>, kStaticCount> cols{};
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "catchment_id") {
      id_col = c;
      continue;
    }
    const auto it = std::find(kStaticNames.begin(), kStaticNames.end(), header[c]);
    if (it == kStaticNames.end()) {
      fail(ErrorCode::UnknownAttribute, path.string() + ": unknown attribute column '" + std::string(header[c]) + "'");
    }
    cols[static_cast<std::size_t>(it - kStaticNames.begin())] = c;
  }
  if (!id_col) fail(ErrorCode::ParseError, path.string() + ":1: missing catchment_id column");
  for (std::size_t a = 0; a < kStaticCount; ++a) {
    if (!cols[a]) fail(ErrorCode::ParseError, path.string() + ":1: missing attribute column " + std::string(kStaticNames[a]));
  }

  AttributeTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) fail(ErrorCode::ParseError, where + ": wrong number of fields");
    const std::string id(cells[*id_col]);
    if (id.empty()) fail(ErrorCode::ParseError, where + ": empty catchment_id");
    if (table.rows.count(id)) fail(ErrorCode::ParseError, where + ": duplicate catchment_id " + id);
    std::array<double, kStaticCount> values{};
    std::string problem;
    for (std::size_t a = 0; a < kStaticCount; ++a) {
      double v = parse_double(cells[*cols[a]], where);
      if (log_transform && kStaticNames[a].starts_with("log_")) {
        v = v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
      }
      if (!std::isfinite(v) && problem.empty()) problem = "attribute " + std::string(kStaticNames[a]) + " missing or invalid";
      values[a] = v;
    }
    if (!problem.empty()) {
      table.exclusions.push_back({id, "attributes", "IncompleteRecord: " + problem});
      continue;
    }
    table.rows.emplace(id, values);
  }
  return table;
}

struct Dataset {
  std::vector<CatchmentRecord> records;  // sorted by catchment id
  std::vector<FeatureRow> feature_rows;  // rows of the kept catchments
  std::vector<Exclusion> exclusions;
};

/// Joins per-series feature rows with static attributes. A catchment is kept
/// only when it has attributes and all three feature vectors.
inline Dataset assemble_records(const std::vector<FeatureRow>& rows, const AttributeTable& attributes,
                                std::vector<Exclusion> exclusions = {}) {
  std::map<std::string, std::array<std::optional<FeatureVector>, 3>> by_id;
  for (const auto& row : rows) by_id[row.catchment_id][static_cast<std::size_t>(row.variable)] = row.features;

  Dataset out;
  out.exclusions = std::move(exclusions);
  for (const auto& e : attributes.exclusions) out.exclusions.push_back(e);
  std::map<std::string, bool> reported;
  for (const auto& e : out.exclusions) reported[e.catchment_id] = true;

  for (const auto& [id, feats] : by_id) {
    const auto attr = attributes.rows.find(id);
    const bool complete = feats[0] && feats[1] && feats[2];
    if (attr == attributes.rows.end() || !complete) {
      if (!reported[id]) {
        out.exclusions.push_back(
            {id, "catchment", attr == attributes.rows.end() ? "no static attributes" : "incomplete feature set"});
        reported[id] = true;
      }
      continue;
    }
    CatchmentRecord rec{id, attr->second, *feats[0], *feats[1], *feats[2]};
    out.records.push_back(std::move(rec));
    for (auto kind : kAllVariables) out.feature_rows.push_back({id, kind, out.records.back().features(kind)});
  }
  for (const auto& [id, values] : attributes.rows) {
    if (!by_id.count(id) && !reported[id]) out.exclusions.push_back({id, "catchment", "no feature rows"});
  }
  return out;
}

/// Reads every catchment listed in the attributes file, builds its daily
/// temperature ((tmin + tmax) / 2), precipitation and streamflow series over
/// the window, extracts features and joins the static attributes.
/// Incomplete catchments are excluded and reported; malformed files throw.
inline Dataset load_dataset(const std::filesystem::path& series_dir, const std::filesystem::path& attributes_file,
                            const DatasetConfig& cfg) {
  if (!std::filesystem::is_directory(series_dir)) {
    fail(ErrorCode::ParseError, "series directory not found: " + series_dir.string());
  }
  if (!std::filesystem::exists(attributes_file)) {
    fail(ErrorCode::ParseError, "attributes file not found: " + attributes_file.string());
  }
  if (cfg.end_year < cfg.start_year) fail(ErrorCode::Config, "end year precedes start year");
  const auto attributes = read_attributes(attributes_file, cfg.log_transform_attributes);
  const Calendar calendar(cfg);
  const auto start = calendar.date(0);

  std::vector<SeriesTask> tasks;
  std::vector<Exclusion> exclusions;
  for (const auto& [id, values] : attributes.rows) {
    try {
      std::array<std::vector<double>, 4> raw;
      for (std::size_t k = 0; k < kSeriesFileKinds.size(); ++k) {
        raw[k] = read_series_file(series_path(series_dir, id, kSeriesFileKinds[k]), calendar);
      }
      auto temperature = daily_mean_temperature(raw[0], raw[1]);
      tasks.push_back({id, VariableKind::Temperature, {std::move(temperature), start, cfg.period, VariableKind::Temperature}});
      tasks.push_back({id, VariableKind::Precipitation, {std::move(raw[2]), start, cfg.period, VariableKind::Precipitation}});
      tasks.push_back({id, VariableKind::Streamflow, {std::move(raw[3]), start, cfg.period, VariableKind::Streamflow}});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IncompleteRecord || cfg.policy == FailurePolicy::Strict) throw;
      exclusions.push_back({id, "series", e.what()});
    }
  }
  auto table = extract_batch(tasks, cfg.features, cfg.policy, cfg.workers);
  for (auto& e : table.exclusions) exclusions.push_back(std::move(e));
  return assemble_records(table.rows, attributes, std::move(exclusions));
}

}  // namespace hydrofeat::regionalization
