#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydrofeat/error.hpp"
#include "hydrofeat/features.hpp"
#include "hydrofeat/regionalization/correlation.hpp"
#include "hydrofeat/regionalization/crossval.hpp"
#include "hydrofeat/regionalization/importance.hpp"
#include "hydrofeat/regionalization/summary.hpp"

namespace hydrofeat::regionalization {

namespace detail {

struct CsvReader {
  CsvReader(std::istream& is, std::string_view src, std::string_view expected_header) : in(is), source(src) {
    if (!std::getline(in, line) || line != expected_header) {
      fail(ErrorCode::ParseError, source + ":1: expected header '" + std::string(expected_header) + "'");
    }
    line_no = 1;
  }

  std::istream& in;
  std::string source;
  std::size_t line_no = 0;
  std::string line;

  // Next non-empty row with exactly `cols` fields, or nullopt at end of input.
  std::optional<std::vector<std::string_view>> next(std::size_t cols) {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto cells = split_csv_line(line);
      if (cells.size() != cols) fail(ErrorCode::ParseError, where() + ": expected " + std::to_string(cols) + " fields");
      return cells;
    }
    return std::nullopt;
  }

  std::string where() const { return source + ":" + std::to_string(line_no); }

  std::size_t parse_size(std::string_view s) const {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      fail(ErrorCode::ParseError, where() + ": bad integer '" + std::string(s) + "'");
    }
    return v;
  }
};

}  // namespace detail

// ---- correlations.csv ----

inline void write_correlations(std::ostream& os, const CorrelationMatrix& m) {
  os << "predictor,target,rho\n";
  for (std::size_t p = 0; p < m.predictors.size(); ++p) {
    for (std::size_t t = 0; t < m.targets.size(); ++t) {
      const auto& r = m.at(p, t);
      os << m.predictors[p] << ',' << m.targets[t] << ',' << (r ? format_double(*r) : "undefined") << '\n';
    }
  }
}

inline CorrelationMatrix read_correlations(std::istream& is, std::string_view source = "correlations.csv") {
  detail::CsvReader r(is, source, "predictor,target,rho");
  CorrelationMatrix m;
  std::map<std::string, std::size_t> tindex;
  std::vector<std::pair<std::string, std::string>> keys;
  while (auto cells = r.next(3)) {
    const std::string pred((*cells)[0]), targ((*cells)[1]);
    if (m.predictors.empty() || m.predictors.back() != pred) m.predictors.push_back(pred);
    if (!tindex.count(targ)) {
      tindex.emplace(targ, m.targets.size());
      m.targets.push_back(targ);
    }
    keys.emplace_back(pred, targ);
    if ((*cells)[2] == "undefined") {
      m.rho.emplace_back(std::nullopt);
    } else {
      m.rho.emplace_back(parse_double((*cells)[2], r.where()));
    }
  }
  if (m.rho.size() != m.predictors.size() * m.targets.size()) {
    fail(ErrorCode::ParseError, std::string(source) + ": not a complete predictor x target matrix");
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].first != m.predictors[i / m.targets.size()] || keys[i].second != m.targets[i % m.targets.size()]) {
      fail(ErrorCode::ParseError, std::string(source) + ": rows are not in predictor-major order");
    }
  }
  return m;
}

// ---- importance.csv ----

inline void write_importance(std::ostream& os, const std::vector<TargetImportance>& reports) {
  os << "target,predictor,score,rank\n";
  for (const auto& t : reports) {
    for (std::size_t j = 0; j < t.report.predictors.size(); ++j) {
      os << t.target << ',' << t.report.predictors[j] << ',' << format_double(t.report.scores[j]) << ','
         << t.report.ranks[j] << '\n';
    }
  }
}

inline std::vector<TargetImportance> read_importance(std::istream& is, std::string_view source = "importance.csv") {
  detail::CsvReader r(is, source, "target,predictor,score,rank");
  std::vector<TargetImportance> out;
  while (auto cells = r.next(4)) {
    const std::string targ((*cells)[0]);
    if (out.empty() || out.back().target != targ) out.push_back({targ, {}});
    auto& rep = out.back().report;
    rep.predictors.emplace_back((*cells)[1]);
    rep.scores.push_back(parse_double((*cells)[2], r.where()));
    rep.ranks.push_back(r.parse_size((*cells)[3]));
  }
  return out;
}

// ---- pred_vs_obs.csv ----

inline void write_pred_vs_obs(std::ostream& os, const std::vector<PredictedObserved>& rows) {
  os << "target,catchment_id,observed,predicted\n";
  for (const auto& row : rows) {
    os << row.target << ',' << row.catchment_id << ',' << format_double(row.observed) << ','
       << format_double(row.predicted) << '\n';
  }
}

inline std::vector<PredictedObserved> read_pred_vs_obs(std::istream& is, std::string_view source = "pred_vs_obs.csv") {
  detail::CsvReader r(is, source, "target,catchment_id,observed,predicted");
  std::vector<PredictedObserved> out;
  while (auto cells = r.next(4)) {
    out.push_back({std::string((*cells)[0]), std::string((*cells)[1]), parse_double((*cells)[2], r.where()),
                   parse_double((*cells)[3], r.where())});
  }
  return out;
}

// ---- summaries.csv ----

inline void write_summaries(std::ostream& os, const std::vector<FeatureSummary>& rows) {
  os << "variable,feature,min,q1,median,q3,max,mean\n";
  for (const auto& s : rows) {
    os << to_string(s.variable) << ',' << s.feature << ',' << format_double(s.min) << ',' << format_double(s.q1) << ','
       << format_double(s.median) << ',' << format_double(s.q3) << ',' << format_double(s.max) << ','
       << format_double(s.mean) << '\n';
  }
}

inline std::vector<FeatureSummary> read_summaries(std::istream& is, std::string_view source = "summaries.csv") {
  detail::CsvReader r(is, source, "variable,feature,min,q1,median,q3,max,mean");
  std::vector<FeatureSummary> out;
  while (auto cells = r.next(8)) {
    VariableKind kind{};
    try {
      kind = parse_variable_kind((*cells)[0]);
    } catch (const Error&) {
      fail(ErrorCode::ParseError, r.where() + ": unknown variable '" + std::string((*cells)[0]) + "'");
    }
    FeatureSummary s{kind, std::string((*cells)[1])};
    double* fields[] = {&s.min, &s.q1, &s.median, &s.q3, &s.max, &s.mean};
    for (std::size_t i = 0; i < 6; ++i) *fields[i] = parse_double((*cells)[2 + i], r.where());
    out.push_back(std::move(s));
  }
  return out;
}

// ---- exclusion manifest ----

inline std::vector<Exclusion> read_exclusions(std::istream& is, std::string_view source = "exclusions.csv") {
  detail::CsvReader r(is, source, "catchment_id,variable,reason");
  std::vector<Exclusion> out;
  while (auto cells = r.next(3)) out.push_back({std::string((*cells)[0]), std::string((*cells)[1]), std::string((*cells)[2])});
  return out;
}

// ---- evaluation.json ----

inline nlohmann::ordered_json evaluation_to_json(const EvaluationReport& rep) {
  nlohmann::ordered_json j;
  j["targets"] = rep.targets;
  auto& groups = j["groups"] = nlohmann::ordered_json::array();
  for (auto g : rep.groups) groups.push_back(std::string(to_string(g)));
  j["folds"] = rep.folds;
  j["rmse"] = rep.rmse;
  j["ranks"] = rep.ranks;
  j["relative_scores"] = rep.relative_scores ? nlohmann::ordered_json(*rep.relative_scores) : nlohmann::ordered_json();
  return j;
}

inline void write_evaluation(std::ostream& os, const EvaluationReport& rep) { os << evaluation_to_json(rep).dump(2) << '\n'; }

inline EvaluationReport read_evaluation(std::istream& is, std::string_view source = "evaluation.json") {
  EvaluationReport rep;
  try {
    const auto j = nlohmann::ordered_json::parse(is);
    rep.targets = j.at("targets").get<std::vector<std::string>>();
    for (const auto& name : j.at("groups")) {
      const auto g = parse_group(name.get<std::string>());
      if (!g) fail(ErrorCode::ParseError, std::string(source) + ": unknown group " + name.dump());
      rep.groups.push_back(*g);
    }
    rep.folds = j.at("folds").get<FoldPartition>();
    rep.rmse = j.at("rmse").get<std::vector<std::vector<double>>>();
    rep.ranks = j.at("ranks").get<std::vector<std::vector<std::size_t>>>();
    if (!j.at("relative_scores").is_null()) {
      rep.relative_scores = j.at("relative_scores").get<std::vector<std::vector<double>>>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string(source) + ": " + e.what());
  }
  const auto check_shape = [&](const auto& m, std::string_view what) {
    if (m.size() != rep.targets.size()) fail(ErrorCode::ParseError, std::string(source) + ": " + std::string(what) + " has wrong row count");
    for (const auto& row : m) {
      if (row.size() != rep.groups.size()) fail(ErrorCode::ParseError, std::string(source) + ": " + std::string(what) + " has wrong column count");
    }
  };
  check_shape(rep.rmse, "rmse");
  check_shape(rep.ranks, "ranks");
  if (rep.relative_scores) check_shape(*rep.relative_scores, "relative_scores");
  return rep;
}

}  // namespace hydrofeat::regionalization
