#include "hydrofeat/series.hpp"

#include <gtest/gtest.h>

#include <limits>

#include "test_support.hpp"

using namespace hydrofeat;

namespace {

TimeSeries make_series(std::vector<double> v, std::size_t period = 365) {
  TimeSeries s;
  s.values = std::move(v);
  s.period = period;
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Config;
}

}  // namespace

TEST(Validate, AcceptsCompleteSeries) {
  const auto s = make_series(fixtures::white_noise(12410, 3));
  EXPECT_EQ(&validate(s), &s);
}

TEST(Validate, RejectsNanAsMissing) {
  auto v = fixtures::white_noise(800, 1);
  v[17] = std::numeric_limits<double>::quiet_NaN();
  const auto s = make_series(v);
  EXPECT_EQ(code_of([&] { validate(s); }), ErrorCode::MissingData);
}

TEST(Validate, RejectsInfinity) {
  auto v = fixtures::white_noise(800, 1);
  v[3] = std::numeric_limits<double>::infinity();
  const auto s = make_series(v);
  EXPECT_EQ(code_of([&] { validate(s); }), ErrorCode::NonFinite);
}

TEST(Validate, RejectsShortSeries) {
  const auto s = make_series(fixtures::white_noise(400, 1));
  EXPECT_EQ(code_of([&] { validate(s); }), ErrorCode::TooShort);
}

TEST(Standardize, TwoPoints) {
  const std::vector<double> x{1, 3};
  const auto z = standardize(x);
  EXPECT_NEAR(z.values[0], -0.70710678118654752, 1e-12);
  EXPECT_NEAR(z.values[1], 0.70710678118654752, 1e-12);
}

TEST(Standardize, FourPoints) {
  // mean 2.5, sample sd sqrt(5/3)
  const std::vector<double> x{1, 2, 3, 4};
  const auto z = standardize(x);
  const double sd = std::sqrt(5.0 / 3.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(z.values[i], (x[i] - 2.5) / sd, 1e-12);
  EXPECT_NEAR(z.values[0], -1.1619, 1e-4);
  EXPECT_NEAR(z.values[1], -0.3873, 1e-4);
}

TEST(Standardize, ConstantIsZeroVariance) {
  const std::vector<double> x{5, 5, 5};
  EXPECT_EQ(code_of([&] { standardize(x); }), ErrorCode::ZeroVariance);
}

TEST(Standardize, MomentsAndInvariances) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = fixtures::ar1(500 + seed * 37, 0.5, seed);
    const auto z = standardize(x);
    EXPECT_LE(std::abs(mean(z.values)), 1e-10);
    EXPECT_LE(std::abs(stddev(z.values) - 1.0), 1e-10);

    const auto zz = standardize(z.values);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(zz.values[i], z.values[i], 1e-10);

    const double a = 0.1 + static_cast<double>(seed), b = -3.0 * static_cast<double>(seed);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    const auto zy = standardize(y);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(zy.values[i], z.values[i], 1e-10);
  }
}

TEST(Difference, Examples) {
  const std::vector<double> x{1, 2, 4, 7};
  EXPECT_EQ(difference(x, 1), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(difference(x, 2), (std::vector<double>{1, 1}));
  std::vector<double> ramp(10);
  for (std::size_t i = 0; i < 10; ++i) ramp[i] = static_cast<double>(i);
  EXPECT_EQ(difference(ramp, 1), std::vector<double>(9, 1.0));
}

TEST(Difference, SecondOrderIsRepeatedFirstOrder) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = fixtures::white_noise(50 + seed, seed);
    EXPECT_EQ(difference(x, 2), difference(difference(x, 1), 1));
    EXPECT_EQ(difference(x, 1).size(), x.size() - 1);
    EXPECT_EQ(difference(x, 2).size(), x.size() - 2);
  }
}

TEST(Difference, TooShort) {
  const std::vector<double> x{1, 2};
  EXPECT_EQ(code_of([&] { difference(x, 2); }), ErrorCode::TooShort);
}
