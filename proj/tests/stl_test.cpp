#include "hydrofeat/stl.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "hydrofeat/loess.hpp"
#include "test_support.hpp"

using namespace hydrofeat;
namespace fx = hydrofeat::fixtures;

TEST(Loess, ReproducesLinesAtDegreeOne) {
  std::vector<double> y(50);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 2.5 * static_cast<double>(i) - 4.0;
  for (std::size_t span : {3u, 7u, 21u, 49u, 51u, 151u}) {
    const auto s = loess_smooth(y, span, 1);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(s[i], y[i], 1e-8) << "span " << span;
  }
}

TEST(Loess, ConstantAtDegreeZero) {
  const std::vector<double> y(30, 4.2);
  for (double v : loess_smooth(y, 9, 0)) EXPECT_NEAR(v, 4.2, 1e-12);
}

TEST(Loess, ReproducesQuadraticsAtDegreeTwo) {
  std::vector<double> y(60);
  auto f = [](double t) { return 0.03 * t * t - 1.1 * t + 2.0; };
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(static_cast<double>(i));
  const auto s = loess_smooth(y, 11, 2);
  for (std::size_t i = 5; i + 5 < y.size(); ++i) EXPECT_NEAR(s[i], y[i], 1e-6);
}

TEST(Loess, ExtrapolatesLineOutsideRange) {
  const std::vector<double> y{1, 3, 5, 7, 9, 11};
  EXPECT_NEAR(*loess_point(y, -1.0, 5, 1), -1.0, 1e-10);
  EXPECT_NEAR(*loess_point(y, 6.0, 5, 1), 13.0, 1e-10);
}

TEST(Loess, VanishingWeightsAreSingular) {
  const std::vector<double> y{1, 2, 3, 4, 5};
  const std::vector<double> zero(5, 0.0);
  try {
    loess_smooth(y, 3, 1, zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularFit);
  }
}

TEST(Stl, RecoversSine) {
  const auto x = fx::standardized(fx::sine(3650, 365.0, 0.01, 3));
  const auto d = stl_decompose(x);
  std::vector<double> truth(3650);
  for (std::size_t t = 0; t < truth.size(); ++t) truth[t] = std::sin(2.0 * std::numbers::pi * t / 365.0);
  EXPECT_GE(fx::pearson(d.seasonal, truth), 0.99);
  EXPECT_LE(std::abs(mean(d.trend)), 0.05);
  EXPECT_LE(stddev(d.trend), 0.05);
}

TEST(Stl, RecoversRamp) {
  const auto x = fx::standardized(fx::ramp(3650, 0.001, 0.01, 4));
  const auto d = stl_decompose(x);
  std::vector<double> t(3650);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  EXPECT_GE(fx::pearson(d.trend, t), 0.99);
  EXPECT_LE(stddev(d.seasonal), 0.05);
}

TEST(Stl, ReconstructsInput) {
  StlOptions robust;
  robust.outer_iterations = 2;
  StlOptions windowed;
  windowed.seasonal_span = 7;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto v = fx::sine(1100 + seed * 50, 50.0, 0.3, seed);
    const auto r = fx::ramp(v.size(), 0.002);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += r[i];
    const auto x = fx::standardized(v, 50);
    for (const auto& opt : {StlOptions{}, robust, windowed}) {
      const auto d = stl_decompose(x, opt);
      ASSERT_EQ(d.trend.size(), v.size());
      for (std::size_t t = 0; t < v.size(); ++t) {
        EXPECT_NEAR(d.trend[t] + d.seasonal[t] + d.remainder[t], x.values[t], 1e-8);
      }
    }
  }
}

TEST(Stl, TooShort) {
  EXPECT_THROW(stl_decompose(fx::standardized(fx::white_noise(700, 1))), Error);
}

TEST(StlFeatures, SineVersusRamp) {
  const auto seasonal = stl_feature_set(fx::standardized(fx::sine(3650, 365.0, 0.1, 8)));
  EXPECT_GE(seasonal.seasonal_strength, 0.95);
  EXPECT_LE(seasonal.trend_strength, 0.2);
  EXPECT_NEAR(static_cast<double>(seasonal.peak), 92.0, 1.0);
  EXPECT_NEAR(static_cast<double>(seasonal.trough), 274.0, 1.0);

  const auto trend = stl_feature_set(fx::standardized(fx::ramp(3650, 0.001, 0.1, 9)));
  EXPECT_GE(trend.trend_strength, 0.95);
  EXPECT_LE(trend.seasonal_strength, 0.2);
  EXPECT_GT(trend.linearity, 0.0);

  const auto falling = stl_feature_set(fx::standardized(fx::ramp(3650, -0.001, 0.1, 9)));
  EXPECT_LT(falling.linearity, 0.0);
}

TEST(StlFeatures, WhiteNoiseRemainder) {
  const auto f = stl_feature_set(fx::standardized(fx::white_noise(3650, 10)));
  EXPECT_LE(std::abs(f.e_acf1), 0.05);
  EXPECT_GE(f.trend_strength, 0.0);
  EXPECT_LE(f.seasonal_strength, 1.0);
}

TEST(StlFeatures, PeakTroughIgnoreSeasonalOffset) {
  auto d = stl_decompose(fx::standardized(fx::sine(1460, 365.0, 0.2, 2)));
  const auto before = stl_feature_set(d);
  for (auto& s : d.seasonal) s += 3.0;
  const auto after = stl_feature_set(d);
  EXPECT_EQ(before.peak, after.peak);
  EXPECT_EQ(before.trough, after.trough);
  EXPECT_NE(before.peak, before.trough);
}

TEST(StlFeatures, PeakTroughStableUnderNoise) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = stl_feature_set(fx::standardized(fx::sine(3650, 365.0, 0.1, 100 + seed)));
    EXPECT_GE(f.peak, 91u);
    EXPECT_LE(f.peak, 93u);
    EXPECT_GE(f.trough, 273u);
    EXPECT_LE(f.trough, 275u);
  }
}

TEST(StlFeatures, RawShapeWhenHarmonicsDisabled) {
  // An alternating pattern has no power in harmonics 1 and 2 of period 6.
  Decomposition d;
  d.period = 6;
  const double pattern[] = {1.0, -1.0, 1.0, -1.0, 1.0, -1.0};
  for (std::size_t t = 0; t < 60; ++t) {
    d.seasonal.push_back(pattern[t % 6]);
    d.trend.push_back(0.01 * static_cast<double>(t));
    d.remainder.push_back(t % 2 ? 0.1 : -0.1);
  }
  const auto smoothed = stl_feature_set(d, 2);
  const auto raw = stl_feature_set(d, 0);
  EXPECT_EQ(raw.peak, 1u);
  EXPECT_EQ(raw.trough, 2u);
  EXPECT_EQ(smoothed.peak, raw.peak);
  EXPECT_EQ(smoothed.trough, raw.trough);
}

TEST(StlFeatures, SpikeMatchesBruteForceLeaveOneOut) {
  const auto e = fx::white_noise(60, 12);
  std::vector<double> loo;
  for (std::size_t i = 0; i < e.size(); ++i) {
    std::vector<double> rest;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (j != i) rest.push_back(e[j]);
    }
    loo.push_back(variance(rest));
  }
  EXPECT_NEAR(leave_one_out_variance_spread(e), variance(loo), 1e-12);
}

TEST(StlFeatures, OrthonormalBasis) {
  const auto [p1, p2] = orthonormal_poly2(500);
  double s1 = 0, s2 = 0, n1 = 0, n2 = 0, c = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    s1 += p1[i];
    s2 += p2[i];
    n1 += p1[i] * p1[i];
    n2 += p2[i] * p2[i];
    c += p1[i] * p2[i];
  }
  EXPECT_NEAR(s1, 0.0, 1e-10);
  EXPECT_NEAR(s2, 0.0, 1e-10);
  EXPECT_NEAR(n1, 1.0, 1e-10);
  EXPECT_NEAR(n2, 1.0, 1e-10);
  EXPECT_NEAR(c, 0.0, 1e-10);
  EXPECT_GT(p1[1], p1[0]);
  EXPECT_GT(p2[0], p2[250]);
}
