#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydrofeat/error.hpp"
#include "hydrofeat/features.hpp"
#include "hydrofeat/forest.hpp"
#include "hydrofeat/parallel.hpp"
#include "hydrofeat/regionalization/crossval.hpp"
#include "hydrofeat/regionalization/dataset.hpp"

namespace hydrofeat {

struct RunConfig {
  std::string series_dir;
  std::string attributes;
  std::string features;  // existing features.csv to reuse instead of extracting
  std::string out = "out";
  std::uint64_t seed = 42;
  std::size_t trees = 2000;
  std::size_t folds = 10;
  std::size_t period = kDefaultPeriod;
  std::size_t workers = default_workers();
  std::vector<std::string> groups = {"S", "T", "P", "S+T", "S+P", "T+P", "S+T+P"};
  FailurePolicy policy = FailurePolicy::Drop;
  bool synthetic = false;
  std::size_t synthetic_catchments = 60;
  int start_year = 1980;
  int end_year = 2013;
  bool drop_leap_days = true;
  bool log_attributes = false;
  std::size_t mtry = 0;
  std::size_t min_node_size = 5;
  FeatureOptions extraction;
};

namespace detail {

template <typename T>
T json_get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::Config, "config key '" + key + "' has the wrong type");
  }
}

inline void require_object(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::Config, where + " must be a JSON object");
}

inline void apply_stl_json(StlOptions& stl, const nlohmann::json& j) {
  require_object(j, "stl");
  for (const auto& [key, v] : j.items()) {
    const std::string k = "stl." + key;
    if (key == "seasonal_span") {
      if (v.is_string() && v.get<std::string>() == "periodic") {
        stl.seasonal_span.reset();
      } else {
        stl.seasonal_span = json_get<std::size_t>(v, k);
      }
    } else if (key == "seasonal_degree") {
      stl.seasonal_degree = json_get<int>(v, k);
    } else if (key == "trend_span") {
      stl.trend_span = json_get<std::size_t>(v, k);
    } else if (key == "trend_degree") {
      stl.trend_degree = json_get<int>(v, k);
    } else if (key == "lowpass_span") {
      stl.lowpass_span = json_get<std::size_t>(v, k);
    } else if (key == "lowpass_degree") {
      stl.lowpass_degree = json_get<int>(v, k);
    } else if (key == "inner_iterations") {
      stl.inner_iterations = json_get<std::size_t>(v, k);
    } else if (key == "outer_iterations") {
      stl.outer_iterations = json_get<std::size_t>(v, k);
    } else if (key == "peak_harmonics") {
      stl.peak_harmonics = json_get<std::size_t>(v, k);
    } else {
      fail(ErrorCode::Config, "unknown config key '" + k + "'");
    }
  }
}

}  // namespace detail

inline const char* to_string(FailurePolicy p) { return p == FailurePolicy::Strict ? "strict" : "drop"; }

/// Overlays the keys present in `j` onto `cfg`. Unknown keys are errors.
inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  using detail::json_get;
  detail::require_object(j, "config");
  for (const auto& [key, v] : j.items()) {
    if (key == "series_dir") {
      cfg.series_dir = json_get<std::string>(v, key);
    } else if (key == "attributes") {
      cfg.attributes = json_get<std::string>(v, key);
    } else if (key == "features") {
      cfg.features = json_get<std::string>(v, key);
    } else if (key == "out") {
      cfg.out = json_get<std::string>(v, key);
    } else if (key == "seed") {
      cfg.seed = json_get<std::uint64_t>(v, key);
    } else if (key == "trees") {
      cfg.trees = json_get<std::size_t>(v, key);
    } else if (key == "folds") {
      cfg.folds = json_get<std::size_t>(v, key);
    } else if (key == "period") {
      cfg.period = json_get<std::size_t>(v, key);
    } else if (key == "workers") {
      cfg.workers = json_get<std::size_t>(v, key);
    } else if (key == "groups") {
      cfg.groups = json_get<std::vector<std::string>>(v, key);
    } else if (key == "policy") {
      const auto p = json_get<std::string>(v, key);
      if (p != "strict" && p != "drop") fail(ErrorCode::Config, "policy must be 'strict' or 'drop'");
      cfg.policy = p == "strict" ? FailurePolicy::Strict : FailurePolicy::Drop;
    } else if (key == "synthetic") {
      cfg.synthetic = json_get<bool>(v, key);
    } else if (key == "synthetic_catchments") {
      cfg.synthetic_catchments = json_get<std::size_t>(v, key);
    } else if (key == "start_year") {
      cfg.start_year = json_get<int>(v, key);
    } else if (key == "end_year") {
      cfg.end_year = json_get<int>(v, key);
    } else if (key == "drop_leap_days") {
      cfg.drop_leap_days = json_get<bool>(v, key);
    } else if (key == "log_attributes") {
      cfg.log_attributes = json_get<bool>(v, key);
    } else if (key == "forest") {
      detail::require_object(v, "forest");
      for (const auto& [fk, fv] : v.items()) {
        if (fk == "mtry") {
          cfg.mtry = json_get<std::size_t>(fv, "forest.mtry");
        } else if (fk == "min_node_size") {
          cfg.min_node_size = json_get<std::size_t>(fv, "forest.min_node_size");
        } else {
          fail(ErrorCode::Config, "unknown config key 'forest." + fk + "'");
        }
      }
    } else if (key == "extraction") {
      detail::require_object(v, "extraction");
      for (const auto& [ek, ev] : v.items()) {
        if (ek == "firstzero_horizon") {
          cfg.extraction.firstzero_horizon = json_get<std::size_t>(ev, "extraction.firstzero_horizon");
        } else if (ek == "entropy_spans") {
          cfg.extraction.entropy_spans = json_get<std::vector<std::size_t>>(ev, "extraction.entropy_spans");
        } else if (ek == "tile_width") {
          cfg.extraction.tile_width = json_get<std::size_t>(ev, "extraction.tile_width");
        } else {
          fail(ErrorCode::Config, "unknown config key 'extraction." + ek + "'");
        }
      }
    } else if (key == "stl") {
      detail::apply_stl_json(cfg.extraction.stl, v);
    } else {
      fail(ErrorCode::Config, "unknown config key '" + key + "'");
    }
  }
}

inline nlohmann::ordered_json to_json(const RunConfig& cfg) {
  const auto& stl = cfg.extraction.stl;
  nlohmann::ordered_json j;
  j["series_dir"] = cfg.series_dir;
  j["attributes"] = cfg.attributes;
  j["features"] = cfg.features;
  j["out"] = cfg.out;
  j["seed"] = cfg.seed;
  j["trees"] = cfg.trees;
  j["folds"] = cfg.folds;
  j["period"] = cfg.period;
  j["workers"] = cfg.workers;
  j["groups"] = cfg.groups;
  j["policy"] = to_string(cfg.policy);
  j["synthetic"] = cfg.synthetic;
  j["synthetic_catchments"] = cfg.synthetic_catchments;
  j["start_year"] = cfg.start_year;
  j["end_year"] = cfg.end_year;
  j["drop_leap_days"] = cfg.drop_leap_days;
  j["log_attributes"] = cfg.log_attributes;
  j["forest"] = {{"mtry", cfg.mtry}, {"min_node_size", cfg.min_node_size}};
  j["extraction"] = {{"firstzero_horizon", cfg.extraction.firstzero_horizon},
                     {"entropy_spans", cfg.extraction.entropy_spans},
                     {"tile_width", cfg.extraction.tile_width}};
  nlohmann::ordered_json s;
  s["seasonal_span"] = stl.seasonal_span ? nlohmann::ordered_json(*stl.seasonal_span) : nlohmann::ordered_json("periodic");
  s["seasonal_degree"] = stl.seasonal_degree;
  s["trend_span"] = stl.trend_span;
  s["trend_degree"] = stl.trend_degree;
  s["lowpass_span"] = stl.lowpass_span;
  s["lowpass_degree"] = stl.lowpass_degree;
  s["inner_iterations"] = stl.inner_iterations;
  s["outer_iterations"] = stl.outer_iterations;
  s["peak_harmonics"] = stl.peak_harmonics;
  j["stl"] = std::move(s);
  return j;
}

inline std::vector<regionalization::PredictorGroup> parse_groups(const std::vector<std::string>& names) {
  std::vector<regionalization::PredictorGroup> out;
  for (const auto& name : names) {
    const auto g = regionalization::parse_group(name);
    if (!g) fail(ErrorCode::Config, "unknown predictor group '" + name + "' (expected S, T, P, S+T, S+P, T+P or S+T+P)");
    out.push_back(*g);
  }
  return out;
}

inline void validate(const RunConfig& cfg) {
  if (cfg.trees < 1) fail(ErrorCode::Config, "trees must be >= 1");
  if (cfg.folds < 2) fail(ErrorCode::Config, "folds must be >= 2");
  if (cfg.period < 2) fail(ErrorCode::Config, "period must be >= 2");
  if (cfg.workers < 1) fail(ErrorCode::Config, "workers must be >= 1");
  if (cfg.end_year < cfg.start_year) fail(ErrorCode::Config, "end_year precedes start_year");
  if (cfg.synthetic_catchments < 1) fail(ErrorCode::Config, "synthetic_catchments must be >= 1");
  if (cfg.groups.empty()) fail(ErrorCode::Config, "at least one predictor group is required");
  if (cfg.out.empty()) fail(ErrorCode::Config, "output directory is required");
  parse_groups(cfg.groups);
  if (cfg.synthetic && (!cfg.series_dir.empty() || !cfg.attributes.empty() || !cfg.features.empty())) {
    fail(ErrorCode::Config, "--synthetic cannot be combined with --series-dir, --attributes or --features");
  }
  if (!cfg.synthetic) {
    if (cfg.attributes.empty()) fail(ErrorCode::Config, "--attributes is required (or use --synthetic)");
    if (cfg.series_dir.empty() && cfg.features.empty()) {
      fail(ErrorCode::Config, "--series-dir or --features is required (or use --synthetic)");
    }
  }
}

inline regionalization::DatasetConfig dataset_config(const RunConfig& cfg) {
  regionalization::DatasetConfig d;
  d.start_year = cfg.start_year;
  d.end_year = cfg.end_year;
  d.drop_leap_days = cfg.drop_leap_days;
  d.period = cfg.period;
  d.log_transform_attributes = cfg.log_attributes;
  d.features = cfg.extraction;
  d.policy = cfg.policy;
  d.workers = cfg.workers;
  return d;
}

inline ForestParams forest_params(const RunConfig& cfg) {
  ForestParams p;
  p.n_trees = cfg.trees;
  p.mtry = cfg.mtry;
  p.min_node_size = cfg.min_node_size;
  p.workers = cfg.workers;
  return p;
}

}  // namespace hydrofeat
