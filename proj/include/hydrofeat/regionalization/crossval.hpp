#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hydrofeat/error.hpp"
#include "hydrofeat/forest.hpp"
#include "hydrofeat/parallel.hpp"
#include "hydrofeat/regionalization/groups.hpp"

namespace hydrofeat::regionalization {

using FoldPartition = std::vector<std::vector<std::size_t>>;

/// Seeded random partition of 0..n-1 into k folds. The first n % k folds hold
/// one extra index; indices are sorted within each fold.
inline FoldPartition kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > n) fail(ErrorCode::BadK, "k = " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  FoldPartition folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos), idx.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

inline double rmse(std::span<const double> predicted, std::span<const double> observed) {
  if (predicted.size() != observed.size()) fail(ErrorCode::LengthMismatch, "rmse inputs differ in length");
  if (predicted.empty()) fail(ErrorCode::TooShort, "rmse of empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - observed[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(predicted.size()));
}

struct CvResult {
  std::vector<double> predictions;  // one per record
  std::vector<double> observed;
  std::vector<double> fold_mse;
  double rmse = 0.0;  // pooled over all records
};

inline CvResult cross_validate(const std::vector<CatchmentRecord>& records, std::size_t target, PredictorGroup group,
                               const FoldPartition& folds, const ForestParams& params, std::uint64_t seed) {
  const std::size_t n = records.size();
  const std::size_t k = folds.size();
  if (k < 2) fail(ErrorCode::BadK, "cross-validation needs at least 2 folds");
  if (n < 2 * k) fail(ErrorCode::TooShort, "cross-validation needs at least 2k records");

  std::vector<int> owner(n, -1);
  for (std::size_t f = 0; f < k; ++f) {
    for (auto i : folds[f]) {
      if (i >= n || owner[i] != -1) fail(ErrorCode::BadK, "fold partition is not a partition of the records");
      owner[i] = static_cast<int>(f);
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end()) fail(ErrorCode::BadK, "fold partition misses records");

  CvResult out;
  out.predictions.assign(n, 0.0);
  out.observed.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.observed[i] = records[i].streamflow[target];
  out.fold_mse.resize(k);

  double sse = 0.0;
  std::vector<std::size_t> train;
  for (std::size_t f = 0; f < k; ++f) {
    train.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (owner[i] != static_cast<int>(f)) train.push_back(i);
    }
    const auto model = fit(design_matrix(records, group, target, &train), params, mix_seed(seed, f));
    const auto held = design_matrix(records, group, target, &folds[f]);
    const auto pred = predict(model, held);
    double fold_sse = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const std::size_t i = folds[f][j];
      out.predictions[i] = pred[j];
      const double d = pred[j] - out.observed[i];
      fold_sse += d * d;
    }
    out.fold_mse[f] = fold_sse / static_cast<double>(pred.size());
    sse += fold_sse;
  }
  out.rmse = std::sqrt(sse / static_cast<double>(n));
  return out;
}

inline CvResult cross_validate(const std::vector<CatchmentRecord>& records, std::size_t target, PredictorGroup group,
                               std::size_t k, const ForestParams& params, std::uint64_t seed) {
  return cross_validate(records, target, group, kfold_split(records.size(), k, seed), params, seed);
}

struct PredictedObserved {
  std::string target;
  std::string catchment_id;
  double observed = 0.0;
  double predicted = 0.0;
};

struct EvaluationReport {
  std::vector<std::string> targets;
  std::vector<PredictorGroup> groups;
  FoldPartition folds;
  std::vector<std::vector<double>> rmse;  // [target][group]
  std::vector<std::vector<std::size_t>> ranks;
  // Absent when the static-only group was not evaluated.
  std::optional<std::vector<std::vector<double>>> relative_scores;
  std::vector<PredictedObserved> predicted_vs_observed;
};

struct EvaluationOptions {
  std::vector<PredictorGroup> groups{kAllGroups.begin(), kAllGroups.end()};
  std::size_t folds = 10;
  std::size_t workers = 1;
};

/// 1 = lowest value; exact ties keep the given column order.
inline std::vector<std::size_t> rank_ascending(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::size_t> ranks(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = pos + 1;
  return ranks;
}

inline double relative_score(double rmse_static, double rmse_group) {
  return 100.0 * (rmse_static - rmse_group) / rmse_static;
}

/// Cross-validates every (target, group) pair on one shared fold partition.
inline EvaluationReport evaluate_all(const std::vector<CatchmentRecord>& records, const ForestParams& params,
                                     std::uint64_t seed, const EvaluationOptions& opt = {}) {
  if (opt.groups.empty()) fail(ErrorCode::Config, "no predictor group selected");
  auto groups = opt.groups;
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());

  EvaluationReport rep;
  rep.targets.assign(kFeatureNames.begin(), kFeatureNames.end());
  rep.groups = groups;
  if (opt.folds < 2) fail(ErrorCode::BadK, "cross-validation needs at least 2 folds");
  if (records.size() < 2 * opt.folds) fail(ErrorCode::TooShort, "cross-validation needs at least 2k records");
  rep.folds = kfold_split(records.size(), opt.folds, seed);

  const std::size_t g_count = groups.size();
  std::vector<CvResult> results(kFeatureCount * g_count);
  ForestParams inner = params;
  inner.workers = 1;
  parallel_for(results.size(), opt.workers, [&](std::size_t job) {
    const std::size_t t = job / g_count;
    const auto g = groups[job % g_count];
    try {
      results[job] = cross_validate(records, t, g, rep.folds, inner, seed);
    } catch (const Error& e) {
      throw with_context(e, "target " + rep.targets[t] + ", group " + std::string(to_string(g)) + ": ");
    }
  });

  const auto s_pos = std::find(groups.begin(), groups.end(), PredictorGroup::S);
  const auto stp_pos = std::find(groups.begin(), groups.end(), PredictorGroup::STP);
  if (s_pos != groups.end()) rep.relative_scores.emplace();
  for (std::size_t t = 0; t < kFeatureCount; ++t) {
    std::vector<double> row(g_count);
    for (std::size_t g = 0; g < g_count; ++g) row[g] = results[t * g_count + g].rmse;
    rep.ranks.push_back(rank_ascending(row));
    if (rep.relative_scores) {
      const double base = row[static_cast<std::size_t>(s_pos - groups.begin())];
      std::vector<double> rel(g_count);
      for (std::size_t g = 0; g < g_count; ++g) rel[g] = groups[g] == PredictorGroup::S ? 0.0 : relative_score(base, row[g]);
      rep.relative_scores->push_back(std::move(rel));
    }
    rep.rmse.push_back(std::move(row));
  }
  if (stp_pos != groups.end()) {
    const std::size_t g = static_cast<std::size_t>(stp_pos - groups.begin());
    for (std::size_t t = 0; t < kFeatureCount; ++t) {
      const auto& res = results[t * g_count + g];
      for (std::size_t i = 0; i < records.size(); ++i) {
        rep.predicted_vs_observed.push_back({rep.targets[t], records[i].catchment_id, res.observed[i], res.predictions[i]});
      }
    }
  }
  return rep;
}

}  // namespace hydrofeat::regionalization
