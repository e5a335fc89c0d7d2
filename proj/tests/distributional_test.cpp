#include "hydrofeat/distributional.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "test_support.hpp"

using namespace hydrofeat;
namespace fx = hydrofeat::fixtures;

namespace {

// Oracle: crossings recounted from a fully sorted copy.
std::size_t recount_crossings(const std::vector<double>& x) {
  auto s = x;
  std::sort(s.begin(), s.end());
  const double m = s.size() % 2 ? s[s.size() / 2] : 0.5 * (s[s.size() / 2 - 1] + s[s.size() / 2]);
  std::size_t c = 0;
  for (std::size_t t = 1; t < x.size(); ++t) c += (x[t - 1] <= m) != (x[t] <= m);
  return c;
}

// Oracle: label each point by scanning bin edges, then measure runs.
std::size_t brute_flat_spots(const std::vector<double>& x) {
  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());
  std::vector<int> labels;
  for (double v : x) {
    int b = 0;
    while (b < 9 && v >= lo + (hi - lo) * (b + 1) / 10.0) ++b;
    labels.push_back(b);
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < labels.size();) {
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    best = std::max(best, j - i);
    i = j;
  }
  return best;
}

std::vector<double> iota_vec(std::size_t n, double start = 1.0) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), start);
  return v;
}

}  // namespace

TEST(Std1stDer, RampIsZero) {
  EXPECT_NEAR(std1st_der(fx::standardized(iota_vec(100))), 0.0, 1e-10);
}

TEST(Std1stDer, NoiseAndAr1) {
  EXPECT_NEAR(std1st_der(fx::standardized(fx::white_noise(5000, 3))), std::sqrt(2.0), 0.05);
  EXPECT_NEAR(std1st_der(fx::standardized(fx::ar1(5000, 0.8, 3))), std::sqrt(0.4), 0.05);
}

TEST(CrossingPoints, Examples) {
  std::vector<double> alt(10);
  for (std::size_t i = 0; i < 10; ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  EXPECT_EQ(crossing_points(alt), 9u);
  EXPECT_EQ(crossing_points(iota_vec(100)), 1u);
}

TEST(CrossingPoints, PermutationMatchesRecount) {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    auto v = iota_vec(100);
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_EQ(crossing_points(v), recount_crossings(v));
  }
}

TEST(CrossingPoints, InvariantUnderMonotoneMaps) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = fx::white_noise(301, seed);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]) * 3.0 + 1.0;
    EXPECT_EQ(crossing_points(x), crossing_points(y));
    EXPECT_LE(crossing_points(x), x.size() - 1);
  }
}

TEST(FlatSpots, Examples) {
  EXPECT_EQ(flat_spots(iota_vec(100)), 10u);
  EXPECT_EQ(flat_spots(iota_vec(100)), brute_flat_spots(iota_vec(100)));
  std::vector<double> alt(20);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 0.0 : 10.0;
  EXPECT_EQ(flat_spots(alt), 1u);
  std::vector<double> blocks(100, 2.0);
  std::fill(blocks.begin() + 50, blocks.end(), 7.0);
  EXPECT_EQ(flat_spots(blocks), 50u);
}

TEST(FlatSpots, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = fx::ar1(400, 0.95, seed);
    const auto f = flat_spots(x);
    EXPECT_EQ(f, brute_flat_spots(x));
    EXPECT_GE(f, 1u);
    EXPECT_LE(f, x.size());
  }
}

TEST(FlatSpots, ConstantIsDegenerate) {
  const std::vector<double> c(20, 1.0);
  try {
    flat_spots(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateRange);
  }
}

TEST(TiledStats, TwoLevelSeries) {
  std::vector<double> x(730, -1.0);
  std::fill(x.begin() + 365, x.end(), 1.0);
  const auto s = tiled_stats(fx::standardized(x), 365);
  EXPECT_NEAR(s.stability, 2.0 * 729.0 / 730.0, 1e-10);
  EXPECT_NEAR(s.lumpiness, 0.0, 1e-10);
}

TEST(TiledStats, WhiteNoiseStability) {
  const auto s = tiled_stats(fx::standardized(fx::white_noise(36500, 6)), 365);
  EXPECT_LE(s.stability, 0.02);
}

TEST(TiledStats, TwoWindowsAndTruncation) {
  const auto z = fx::standardized(fx::ar1(1000, 0.5, 1), 500);
  const auto s = tiled_stats(z, 500);
  const std::span<const double> all(z.values);
  const double m1 = mean(all.subspan(0, 500)), m2 = mean(all.subspan(500));
  EXPECT_NEAR(s.stability, (m1 - m2) * (m1 - m2) / 2.0, 1e-12);

  const auto w = fx::standardized(fx::white_noise(1000, 2), 365);
  StandardizedSeries truncated{std::vector<double>(w.values.begin(), w.values.begin() + 730), 365};
  const auto a = tiled_stats(w), b = tiled_stats(truncated);
  EXPECT_EQ(a.stability, b.stability);
  EXPECT_EQ(a.lumpiness, b.lumpiness);
  EXPECT_GE(a.stability, 0.0);
  EXPECT_GE(a.lumpiness, 0.0);
  EXPECT_THROW(tiled_stats(w, 600), Error);
}

TEST(Nonlinearity, LinearVersusQuadraticMap) {
  // AR(2) with stationary roots
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> lin(5000), quad(5000);
  double a = 0, b = 0, q = 0.1;
  for (std::size_t t = 0; t < lin.size(); ++t) {
    const double next = 0.5 * a - 0.3 * b + z(rng);
    b = a;
    a = next;
    lin[t] = next;
    q = 0.5 * q * q - 0.3 + 0.2 * z(rng);
    quad[t] = q;
  }
  const double nl_lin = nonlinearity(fx::standardized(lin));
  const double nl_quad = nonlinearity(fx::standardized(quad));
  EXPECT_LE(nl_lin, 0.05);
  EXPECT_GE(nl_quad, 10.0 * nl_lin);
  EXPECT_GE(nonlinearity(fx::standardized(fx::white_noise(500, 3))), 0.0);
}

TEST(Nonlinearity, SingularDesign) {
  std::vector<double> x(40, 0.0);
  x[39] = 1.0;
  try {
    nonlinearity(StandardizedSeries{x, 7});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularDesign);
  }
}
