#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hydrofeat/forest.hpp"
#include "hydrofeat/parallel.hpp"
#include "hydrofeat/regionalization/groups.hpp"

namespace hydrofeat::regionalization {

struct TargetImportance {
  std::string target;
  ImportanceReport report;
};

inline ImportanceReport importance_for(const DesignMatrix& data, const ForestParams& params, std::uint64_t seed) {
  const auto model = fit(data, params, seed);
  return permutation_importance(model, data, mix_seed(seed, 1));
}

/// One forest per streamflow feature on all 75 predictors.
inline std::vector<TargetImportance> importance_all(const std::vector<CatchmentRecord>& records, const ForestParams& params,
                                                    std::uint64_t seed, std::size_t workers = 1) {
  std::vector<TargetImportance> out(kFeatureCount);
  ForestParams inner = params;
  inner.workers = 1;
  parallel_for(kFeatureCount, workers, [&](std::size_t t) {
    out[t].target = std::string(kFeatureNames[t]);
    try {
      out[t].report = importance_for(design_matrix(records, PredictorGroup::STP, t), inner, mix_seed(seed, t));
    } catch (const Error& e) {
      throw with_context(e, "target " + out[t].target + ": ");
    }
  });
  return out;
}

}  // namespace hydrofeat::regionalization
