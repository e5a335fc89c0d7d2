#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "hydrofeat/error.hpp"
#include "hydrofeat/regionalization/dataset.hpp"

namespace hydrofeat::regionalization {

struct FeatureSummary {
  VariableKind variable = VariableKind::Temperature;
  std::string feature;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Linear interpolation between order statistics (R type 7) on sorted input.
inline double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

/// Rows ordered by variable, then canonical feature order.
inline std::vector<FeatureSummary> feature_summary(const std::vector<CatchmentRecord>& records) {
  if (records.empty()) fail(ErrorCode::TooShort, "summary needs at least one catchment");
  std::vector<FeatureSummary> out;
  std::vector<double> col(records.size());
  for (auto kind : kAllVariables) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      for (std::size_t i = 0; i < records.size(); ++i) col[i] = records[i].features(kind)[f];
      std::sort(col.begin(), col.end());
      const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
      out.push_back({kind, std::string(kFeatureNames[f]), col.front(), sorted_quantile(col, 0.25),
                     sorted_quantile(col, 0.5), sorted_quantile(col, 0.75), col.back(), mean});
    }
  }
  return out;
}

}  // namespace hydrofeat::regionalization
