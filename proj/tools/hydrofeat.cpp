#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hydrofeat/regionalization.hpp"
#include "hydrofeat/run_config.hpp"

namespace fs = std::filesystem;
using namespace hydrofeat;
using namespace hydrofeat::regionalization;

namespace {

enum ExitCode { kOk = 0, kInputError = 2, kExtractionError = 3, kConfigError = 4 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::UnknownAttribute:
    case ErrorCode::IncompleteRecord:
      return kInputError;
    case ErrorCode::Config:
    case ErrorCode::BadK:
      return kConfigError;
    default:
      return kExtractionError;
  }
}

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::ParseError, "cannot write " + path.string());
  writer(os);
  if (!os) fail(ErrorCode::ParseError, "failed writing " + path.string());
}

struct Loaded {
  Dataset dataset;
  bool extracted = false;
};

Loaded load(RunConfig& cfg) {
  const auto dcfg = dataset_config(cfg);
  if (cfg.synthetic) {
    SyntheticConfig s;
    s.n_catchments = cfg.synthetic_catchments;
    s.seed = cfg.seed;
    s.start_year = cfg.start_year;
    s.end_year = cfg.end_year;
    const auto paths = generate_synthetic(fs::path(cfg.out) / "synthetic", s, cfg.workers);
    std::cerr << "generated synthetic dataset under " << (fs::path(cfg.out) / "synthetic").string() << "\n";
    return {load_dataset(paths.series_dir, paths.attributes_file, dcfg), true};
  }
  if (!cfg.features.empty()) {
    std::ifstream in(cfg.features);
    if (!in) fail(ErrorCode::ParseError, "features file not found: " + cfg.features);
    if (!fs::exists(cfg.attributes)) fail(ErrorCode::ParseError, "attributes file not found: " + cfg.attributes);
    const auto rows = read_feature_table(in, cfg.features);
    return {assemble_records(rows, read_attributes(cfg.attributes, cfg.log_attributes)), false};
  }
  return {load_dataset(cfg.series_dir, cfg.attributes, dcfg), true};
}

void write_dataset_outputs(const fs::path& out, const Loaded& loaded) {
  if (loaded.extracted) {
    write_file(out / "features.csv", [&](std::ostream& os) { write_feature_table(os, loaded.dataset.feature_rows); });
  }
  write_file(out / "exclusions.csv", [&](std::ostream& os) { write_exclusions(os, loaded.dataset.exclusions); });
}

int run_command(const std::string& command, RunConfig& cfg) {
  validate(cfg);
  const fs::path out(cfg.out);
  fs::create_directories(out);
  write_file(out / "config.json", [&](std::ostream& os) { os << to_json(cfg).dump(2) << '\n'; });

  const auto loaded = load(cfg);
  const auto& records = loaded.dataset.records;
  write_dataset_outputs(out, loaded);
  std::cerr << records.size() << " catchments kept, " << loaded.dataset.exclusions.size() << " exclusions\n";
  if (cfg.policy == FailurePolicy::Strict && !loaded.dataset.exclusions.empty()) {
    const auto& e = loaded.dataset.exclusions.front();
    fail(ErrorCode::IncompleteRecord, e.catchment_id + "/" + e.variable + ": " + e.reason);
  }

  const auto params = forest_params(cfg);
  if (command == "extract") {
    std::cout << "wrote " << (out / "features.csv").string() << " (" << loaded.dataset.feature_rows.size() << " rows)\n";
  } else if (command == "correlate") {
    const auto m = correlation_matrix(records);
    write_file(out / "correlations.csv", [&](std::ostream& os) { write_correlations(os, m); });
    std::cout << "wrote " << (out / "correlations.csv").string() << " (" << m.rho.size() << " rows)\n";
  } else if (command == "importance") {
    const auto reports = importance_all(records, params, cfg.seed, cfg.workers);
    write_file(out / "importance.csv", [&](std::ostream& os) { write_importance(os, reports); });
    std::cout << "wrote " << (out / "importance.csv").string() << " (" << reports.size() * reports.front().report.predictors.size()
              << " rows)\n";
  } else if (command == "crossval") {
    EvaluationOptions opt;
    opt.groups = parse_groups(cfg.groups);
    opt.folds = cfg.folds;
    opt.workers = cfg.workers;
    const auto rep = evaluate_all(records, params, cfg.seed, opt);
    write_file(out / "evaluation.json", [&](std::ostream& os) { write_evaluation(os, rep); });
    write_file(out / "pred_vs_obs.csv", [&](std::ostream& os) { write_pred_vs_obs(os, rep.predicted_vs_observed); });
    std::cout << "wrote " << (out / "evaluation.json").string() << " (" << rep.rmse.size() * rep.groups.size()
              << " RMSE entries) and " << (out / "pred_vs_obs.csv").string() << "\n";
  } else if (command == "report") {
    const auto rows = feature_summary(records);
    write_file(out / "summaries.csv", [&](std::ostream& os) { write_summaries(os, rows); });
    std::cout << "wrote " << (out / "summaries.csv").string() << " (" << rows.size() << " rows)\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hydrofeat: time-series features and streamflow regionalization"};
  app.require_subcommand(1, 1);
  std::vector<CLI::App*> commands = {
      app.add_subcommand("extract", "extract features -> features.csv, exclusions.csv"),
      app.add_subcommand("correlate", "Spearman correlations -> correlations.csv"),
      app.add_subcommand("importance", "random-forest permutation importance -> importance.csv"),
      app.add_subcommand("crossval", "10-fold cross-validation -> evaluation.json, pred_vs_obs.csv"),
      app.add_subcommand("report", "feature distribution summaries -> summaries.csv")};
  for (auto* c : commands) c->fallthrough();

  std::string config_file, series_dir, attributes, features, out;
  std::uint64_t seed = 0;
  std::size_t trees = 0, folds = 0, period = 0, workers = 0, catchments = 0, mtry = 0, min_node = 0;
  int start_year = 0, end_year = 0;
  std::vector<std::string> groups;
  bool strict = false, drop = false;

  auto* o_config = app.add_option("--config", config_file, "JSON config file (flags override it)");
  auto* o_series = app.add_option("--series-dir", series_dir, "directory of <catchment_id>_<variable>.csv files");
  auto* o_attr = app.add_option("--attributes", attributes, "static attributes CSV");
  auto* o_feat = app.add_option("--features", features, "reuse an existing features.csv instead of extracting");
  auto* o_out = app.add_option("--out", out, "output directory (default: out)");
  auto* o_seed = app.add_option("--seed", seed, "random seed (default: 42)");
  auto* o_trees = app.add_option("--trees", trees, "trees per forest (default: 2000)");
  auto* o_folds = app.add_option("--folds", folds, "cross-validation folds (default: 10)");
  auto* o_period = app.add_option("--period", period, "seasonal period in days (default: 365)");
  auto* o_workers = app.add_option("--workers", workers, "worker threads (default: all cores)");
  auto* o_group = app.add_option("--group", groups, "restrict crossval to these predictor groups")->delimiter(',');
  auto* o_strict = app.add_flag("--strict", strict, "fail on the first extraction error");
  auto* o_drop = app.add_flag("--drop", drop, "drop failing series and record them (default)");
  o_strict->excludes(o_drop);
  bool synthetic = false, log_attr = false, keep_leap = false;
  auto* o_syn = app.add_flag("--synthetic", synthetic, "generate and use the seeded synthetic dataset");
  auto* o_cat = app.add_option("--synthetic-catchments", catchments, "catchments in the synthetic dataset (default: 60)");
  auto* o_start = app.add_option("--start-year", start_year, "first year of the analysis window (default: 1980)");
  auto* o_end = app.add_option("--end-year", end_year, "last year of the analysis window (default: 2013)");
  auto* o_log = app.add_flag("--log-attributes", log_attr, "apply log10 to the log_ attributes on input");
  auto* o_leap = app.add_flag("--keep-leap-days", keep_leap, "keep Feb 29 in the daily series");
  auto* o_mtry = app.add_option("--mtry", mtry, "candidate predictors per split (default: p/3)");
  auto* o_node = app.add_option("--min-node-size", min_node, "minimum rows per leaf (default: 5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  RunConfig cfg;
  try {
    if (*o_config) {
      std::ifstream in(config_file);
      if (!in) fail(ErrorCode::Config, "config file not found: " + config_file);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Config, config_file + ": " + e.what());
      }
      apply_json(cfg, j);
    }
    if (*o_series) cfg.series_dir = series_dir;
    if (*o_attr) cfg.attributes = attributes;
    if (*o_feat) cfg.features = features;
    if (*o_out) cfg.out = out;
    if (*o_seed) cfg.seed = seed;
    if (*o_trees) cfg.trees = trees;
    if (*o_folds) cfg.folds = folds;
    if (*o_period) cfg.period = period;
    if (*o_workers) cfg.workers = workers;
    if (*o_group) cfg.groups = groups;
    if (*o_strict) cfg.policy = FailurePolicy::Strict;
    if (*o_drop) cfg.policy = FailurePolicy::Drop;
    if (*o_syn) cfg.synthetic = true;
    if (*o_cat) cfg.synthetic_catchments = catchments;
    if (*o_start) cfg.start_year = start_year;
    if (*o_end) cfg.end_year = end_year;
    if (*o_log) cfg.log_attributes = true;
    if (*o_leap) cfg.drop_leap_days = false;
    if (*o_mtry) cfg.mtry = mtry;
    if (*o_node) cfg.min_node_size = min_node;

    std::string command;
    for (auto* c : commands) {
      if (c->parsed()) command = c->get_name();
    }
    return run_command(command, cfg);
  } catch (const Error& e) {
    std::cerr << "hydrofeat: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "hydrofeat: " << e.what() << "\n";
    return kInputError;
  }
}
