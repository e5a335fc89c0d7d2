#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hydrofeat/error.hpp"
#include "hydrofeat/forest.hpp"
#include "hydrofeat/regionalization/dataset.hpp"

namespace hydrofeat::regionalization {

enum class PredictorGroup { S, T, P, ST, SP, TP, STP };

inline constexpr std::array<PredictorGroup, 7> kAllGroups = {PredictorGroup::S,  PredictorGroup::T,  PredictorGroup::P,
                                                             PredictorGroup::ST, PredictorGroup::SP, PredictorGroup::TP,
                                                             PredictorGroup::STP};

inline constexpr std::string_view to_string(PredictorGroup g) {
  constexpr std::array<std::string_view, 7> names = {"S", "T", "P", "S+T", "S+P", "T+P", "S+T+P"};
  return names[static_cast<std::size_t>(g)];
}

inline std::optional<PredictorGroup> parse_group(std::string_view s) {
  for (auto g : kAllGroups) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

inline bool has_static(PredictorGroup g) {
  return g == PredictorGroup::S || g == PredictorGroup::ST || g == PredictorGroup::SP || g == PredictorGroup::STP;
}
inline bool has_temperature(PredictorGroup g) {
  return g == PredictorGroup::T || g == PredictorGroup::ST || g == PredictorGroup::TP || g == PredictorGroup::STP;
}
inline bool has_precipitation(PredictorGroup g) {
  return g == PredictorGroup::P || g == PredictorGroup::SP || g == PredictorGroup::TP || g == PredictorGroup::STP;
}

inline std::string dynamic_predictor_name(VariableKind kind, std::string_view feature) {
  return std::string(to_string(kind)) + "." + std::string(feature);
}

/// Column names of a group: statics first, then temperature.*, then precipitation.*.
inline std::vector<std::string> group_columns(PredictorGroup g) {
  std::vector<std::string> cols;
  if (has_static(g)) {
    for (auto name : kStaticNames) cols.emplace_back(name);
  }
  if (has_temperature(g)) {
    for (auto name : kFeatureNames) cols.push_back(dynamic_predictor_name(VariableKind::Temperature, name));
  }
  if (has_precipitation(g)) {
    for (auto name : kFeatureNames) cols.push_back(dynamic_predictor_name(VariableKind::Precipitation, name));
  }
  return cols;
}

inline std::vector<std::string> all_predictor_columns() { return group_columns(PredictorGroup::STP); }

inline void append_predictors(const CatchmentRecord& rec, PredictorGroup g, std::vector<double>& out) {
  if (has_static(g)) out.insert(out.end(), rec.static_attributes.begin(), rec.static_attributes.end());
  if (has_temperature(g)) out.insert(out.end(), rec.temperature.values.begin(), rec.temperature.values.end());
  if (has_precipitation(g)) out.insert(out.end(), rec.precipitation.values.begin(), rec.precipitation.values.end());
}

/// Predictor table of a group over `rows` (all records when empty) with the
/// streamflow feature `target` as response.
inline DesignMatrix design_matrix(const std::vector<CatchmentRecord>& records, PredictorGroup g, std::size_t target,
                                  const std::vector<std::size_t>* rows = nullptr) {
  if (target >= kFeatureCount) fail(ErrorCode::UnknownAttribute, "target index out of range");
  DesignMatrix d;
  d.columns = group_columns(g);
  const std::size_t n = rows ? rows->size() : records.size();
  d.values.reserve(n * d.columns.size());
  d.target.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = records[rows ? (*rows)[i] : i];
    append_predictors(rec, g, d.values);
    d.target.push_back(rec.streamflow[target]);
  }
  return d;
}

}  // namespace hydrofeat::regionalization
