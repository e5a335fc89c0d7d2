#include "hydrofeat/features.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <sstream>

#include "test_support.hpp"

using namespace hydrofeat;
namespace fx = hydrofeat::fixtures;

namespace {

TimeSeries series_of(std::vector<double> v, VariableKind kind = VariableKind::Streamflow) {
  TimeSeries s;
  s.values = std::move(v);
  s.kind = kind;
  return s;
}

}  // namespace

TEST(FeatureVector, CanonicalNames) {
  EXPECT_EQ(kFeatureNames.size(), 28u);
  EXPECT_EQ(kFeatureNames.front(), "x_acf1");
  EXPECT_EQ(kFeatureNames.back(), "trough");
  EXPECT_EQ(*feature_index("seasonal_strength"), 25u);
  EXPECT_FALSE(feature_index("mean").has_value());
}

TEST(ExtractFeatures, SeasonalSeries) {
  const auto f = extract_features(series_of(fx::sine(12410, 365.0, 0.1, 1)));
  EXPECT_GE(f.get("seasonal_strength"), 0.9);
  EXPECT_GE(f.get("seas_acf1"), 0.8);
}

TEST(ExtractFeatures, WhiteNoiseAndRanges) {
  const auto f = extract_features(series_of(fx::white_noise(12410, 2)));
  EXPECT_GE(f.get("entropy"), 0.95);
  EXPECT_LE(f.get("x_acf10"), 0.01);
  for (auto name : {"x_acf1", "diff1_acf1", "diff2_acf1", "seas_acf1", "e_acf1"}) {
    EXPECT_GE(f.get(name), -1.0);
    EXPECT_LE(f.get(name), 1.0);
  }
  for (auto name : {"entropy", "trend", "seasonal_strength"}) {
    EXPECT_GE(f.get(name), 0.0);
    EXPECT_LE(f.get(name), 1.0);
  }
  for (auto name : {"firstzero_ac", "crossing_points", "flat_spots", "peak", "trough"}) {
    EXPECT_EQ(f.get(name), std::floor(f.get(name))) << name;
  }
}

TEST(ExtractFeatures, DeterministicAndAffineInvariant) {
  auto x = fx::ar1(3000, 0.7, 3);
  const auto sn = fx::sine(3000, 365.0);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += 2.0 * sn[i];
  const auto a = extract_features(series_of(x));
  const auto b = extract_features(series_of(x));
  EXPECT_EQ(a, b);
  for (auto& v : x) v = 12.5 * v + 300.0;
  const auto c = extract_features(series_of(x));
  for (std::size_t i = 0; i < kFeatureCount; ++i) EXPECT_NEAR(a[i], c[i], 1e-8) << kFeatureNames[i];
}

TEST(ExtractFeatures, ErrorsAreAnnotated) {
  try {
    extract_features(series_of(std::vector<double>(1000, 1.0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVariance);
  }
  // Valid for standardization but zero-range after differencing is fine;
  // a series too short for the seasonal lag fails inside the acf block.
  try {
    extract_features(standardize(fx::white_noise(731, 1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("acf features"), std::string::npos);
  }
}

TEST(ExtractFeatures, FullLengthSeriesIsFast) {
  const auto start = std::chrono::steady_clock::now();
  extract_features(series_of(fx::ar1(12410, 0.9, 4)));
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RecordProperty("seconds", std::to_string(secs));
  EXPECT_LT(secs, 5.0);
}

namespace {

std::vector<SeriesTask> three_by_three(bool with_constant) {
  std::vector<SeriesTask> tasks;
  for (const char* id : {"c3", "c1", "c2"}) {
    for (auto kind : kAllVariables) {
      auto v = fx::ar1(1000, 0.5, std::hash<std::string>{}(id) + static_cast<int>(kind));
      if (with_constant && std::string(id) == "c2" && kind == VariableKind::Precipitation) v.assign(1000, 0.0);
      tasks.push_back({id, kind, series_of(v, kind)});
    }
  }
  return tasks;
}

}  // namespace

TEST(ExtractBatch, CardinalityAndOrder) {
  const auto table = extract_batch(three_by_three(false));
  ASSERT_EQ(table.rows.size(), 9u);
  EXPECT_TRUE(table.exclusions.empty());
  EXPECT_EQ(table.rows.front().catchment_id, "c1");
  EXPECT_EQ(table.rows.front().variable, VariableKind::Temperature);
  EXPECT_EQ(table.rows.back().catchment_id, "c3");
  EXPECT_EQ(table.rows.back().variable, VariableKind::Streamflow);
}

TEST(ExtractBatch, DropPolicyLogsExclusion) {
  const auto table = extract_batch(three_by_three(true), {}, FailurePolicy::Drop);
  EXPECT_EQ(table.rows.size(), 8u);
  ASSERT_EQ(table.exclusions.size(), 1u);
  EXPECT_EQ(table.exclusions[0].catchment_id, "c2");
  EXPECT_EQ(table.exclusions[0].variable, "precipitation");
  EXPECT_NE(table.exclusions[0].reason.find("ZeroVariance"), std::string::npos);
  EXPECT_THROW(extract_batch(three_by_three(true), {}, FailurePolicy::Strict), Error);
}

TEST(ExtractBatch, WorkerCountDoesNotMatter) {
  const auto tasks = three_by_three(true);
  const auto one = extract_batch(tasks, {}, FailurePolicy::Drop, 1);
  const auto eight = extract_batch(tasks, {}, FailurePolicy::Drop, 8);
  EXPECT_EQ(one.rows, eight.rows);
  EXPECT_EQ(one.exclusions, eight.exclusions);
}

TEST(FeatureTableIo, RoundTripIsIdentity) {
  const auto table = extract_batch(three_by_three(false));
  std::ostringstream first;
  write_feature_table(first, table.rows);
  std::istringstream in(first.str());
  const auto parsed = read_feature_table(in);
  EXPECT_EQ(parsed, table.rows);
  std::ostringstream second;
  write_feature_table(second, parsed);
  EXPECT_EQ(first.str(), second.str());
}

TEST(FeatureTableIo, RejectsBadHeaderAndRows) {
  std::istringstream bad_header("id,variable\n");
  EXPECT_THROW(read_feature_table(bad_header), Error);
  std::ostringstream os;
  write_feature_table(os, {});
  std::istringstream short_row(os.str() + "c1,temperature,1,2\n");
  try {
    read_feature_table(short_row);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos);
  }
}
