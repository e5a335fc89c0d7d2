#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hydrofeat/error.hpp"
#include "hydrofeat/regionalization/groups.hpp"

namespace hydrofeat::regionalization {

/// 1-based ranks; ties share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::LengthMismatch, "spearman inputs differ in length");
  if (x.size() < 3) fail(ErrorCode::TooShort, "spearman needs at least 3 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) fail(ErrorCode::ConstantVector, "spearman input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct CorrelationMatrix {
  std::vector<std::string> predictors;  // 75
  std::vector<std::string> targets;     // 28
  std::vector<std::optional<double>> rho;  // predictor-major

  const std::optional<double>& at(std::size_t predictor, std::size_t target) const {
    return rho[predictor * targets.size() + target];
  }
};

inline CorrelationMatrix correlation_matrix(const std::vector<CatchmentRecord>& records) {
  if (records.size() < 3) fail(ErrorCode::TooShort, "correlation analysis needs at least 3 catchments");
  CorrelationMatrix m;
  m.predictors = all_predictor_columns();
  m.targets.assign(kFeatureNames.begin(), kFeatureNames.end());
  const std::size_t n = records.size();
  const std::size_t p = m.predictors.size();

  std::vector<double> row;
  std::vector<std::vector<double>> pcols(p, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    append_predictors(records[i], PredictorGroup::STP, row);
    for (std::size_t j = 0; j < p; ++j) pcols[j][i] = row[j];
  }
  std::vector<std::vector<double>> tcols(kFeatureCount, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < kFeatureCount; ++t) tcols[t][i] = records[i].streamflow[t];
  }

  m.rho.reserve(p * kFeatureCount);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t t = 0; t < kFeatureCount; ++t) {
      try {
        m.rho.emplace_back(spearman(pcols[j], tcols[t]));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ConstantVector) throw;
        m.rho.emplace_back(std::nullopt);
      }
    }
  }
  return m;
}

}  // namespace hydrofeat::regionalization
