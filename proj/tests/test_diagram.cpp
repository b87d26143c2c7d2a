#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gigp/diagram.hpp"
#include "gigp/error.hpp"
#include "gigp/model.hpp"

using gigp::FrequencyTable;
using gigp::GigpDistribution;
using gigp::GigpParams;

namespace {

FrequencyTable figure_table() {
  const std::vector<std::int64_t> v = {4, 2, 2, 2, 1, 1};
  return gigp::table_from_sample(v);
}

}  // namespace

TEST(FrequencyTable, FromSample) {
  const FrequencyTable t = figure_table();
  EXPECT_EQ(t.count(4), 1);
  EXPECT_EQ(t.count(2), 3);
  EXPECT_EQ(t.count(1), 2);
  EXPECT_EQ(t.count(3), 0);
  EXPECT_EQ(t.M(), 6);
  EXPECT_EQ(t.N(), 12);
  EXPECT_EQ(t.entries().size(), 3u);

  const FrequencyTable empty = gigp::table_from_sample({});
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(empty.M(), 0);
  EXPECT_EQ(empty.N(), 0);

  const std::vector<std::int64_t> z = {0, 0, 3};
  const FrequencyTable tz = gigp::table_from_sample(z);
  EXPECT_EQ(tz.count(0), 2);
  EXPECT_EQ(tz.count(3), 1);
  EXPECT_EQ(tz.M(), 3);
  EXPECT_EQ(tz.N(), 3);
}

TEST(FrequencyTable, ConsistencyChecks) {
  EXPECT_NO_THROW(FrequencyTable({{1, 2}, {2, 3}}, 5, 8));
  EXPECT_THROW(FrequencyTable({{1, 2}, {2, 3}}, 5, 9), gigp::ValidationError);
  EXPECT_THROW(FrequencyTable({{1, -2}}), gigp::ValidationError);
  EXPECT_THROW(FrequencyTable({{-1, 2}}), gigp::ValidationError);
  const FrequencyTable merged({{2, 1}, {1, 1}, {2, 2}, {5, 0}});
  EXPECT_EQ(merged.entries().size(), 2u);
  EXPECT_EQ(merged.count(2), 3);
  EXPECT_EQ(merged.max_value(), 2);
}

TEST(YoungY, Examples) {
  const FrequencyTable t = figure_table();
  EXPECT_EQ(gigp::young_y(t, 3.0), 1);
  EXPECT_EQ(gigp::young_y(t, 2.0), 4);
  EXPECT_EQ(gigp::young_y(t, 5.0), 0);
  EXPECT_EQ(gigp::young_y(t, 0.0), 6);
  EXPECT_EQ(gigp::young_y(t, 1.5), 4);
  EXPECT_EQ(gigp::young_y(t, 4.0), 1);
  EXPECT_EQ(gigp::young_y(t, 4.0000001), 0);
}

TEST(ScaledY, Examples) {
  const FrequencyTable t = figure_table();
  for (double x : {0.0, 0.5, 1.0, 2.0, 3.7})
    EXPECT_EQ(gigp::scaled_y(t, 1.0, 1.0, x), static_cast<double>(gigp::young_y(t, x)));
  EXPECT_DOUBLE_EQ(gigp::scaled_y(t, 2.0, 6.0, 1.0), 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(gigp::scaled_y(t, 7.0, 3.0, 0.0), 2.0);
}

TEST(YoungBoundary, AreaAndMonotonicityOnRandomTables) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(0, 60), value(0, 500);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::int64_t> v(size(rng));
    for (auto& x : v) x = value(rng) / (1 + value(rng) % 7);
    const FrequencyTable t = gigp::table_from_sample(v);
    const gigp::YoungBoundary y(t);
    EXPECT_EQ(y.area(), t.N());
    std::int64_t direct = 0;
    for (std::int64_t k = 1; k <= t.max_value(); ++k) direct += y(static_cast<double>(k));
    EXPECT_EQ(direct, t.N());
    EXPECT_EQ(y(0.0), t.M());
    std::int64_t prev = y(0.0);
    for (double x = 0.0; x <= t.max_value() + 2.0; x += 0.37) {
      EXPECT_LE(y(x), prev);
      prev = y(x);
    }
  }
}

TEST(BoundaryMoments, Examples) {
  const GigpParams p{-0.5, 2.0, 0.99, false};
  const auto at0 = gigp::boundary_moments(p, 35, 0.0, 0.0);
  EXPECT_EQ(at0.mean, 35.0);
  EXPECT_EQ(at0.variance, 0.0);
  const auto m = gigp::boundary_moments(p, 35, 19.89983, 19.89983);
  EXPECT_NEAR(m.mean, 4.342498, 1e-3);
  EXPECT_DOUBLE_EQ(m.covariance, m.variance);
  EXPECT_THROW(gigp::boundary_moments(p, 35, 2.0, 1.0), gigp::ValidationError);
}

TEST(BoundaryMoments, MatchMonteCarlo) {
  const GigpParams p{0.5, 2.0, 0.9, false};
  const GigpDistribution d(p);
  const std::int64_t M = 60;
  const int reps = 10000;
  const double x = 5.0, x2 = 12.0;
  double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
  for (int r = 0; r < reps; ++r) {
    const auto t = d.sample(1000 + r, M);
    const double a = gigp::young_y(t, x), b = gigp::young_y(t, x2);
    s1 += a;
    s2 += b;
    s11 += a * a;
    s22 += b * b;
    s12 += a * b;
  }
  const double m1 = s1 / reps, m2 = s2 / reps;
  const double v1 = s11 / reps - m1 * m1, v2 = s22 / reps - m2 * m2;
  const double c12 = s12 / reps - m1 * m2;
  const auto ex = gigp::boundary_moments(d, M, x, x2);
  EXPECT_LT(std::abs(m1 - ex.mean), 4.0 * std::sqrt(ex.variance / reps));
  // Standard errors of sample (co)variances under approximate normality.
  EXPECT_LT(std::abs(v1 - ex.variance), 4.0 * ex.variance * std::sqrt(2.0 / reps));
  EXPECT_LT(std::abs(c12 - ex.covariance), 4.0 * std::sqrt((v1 * v2 + c12 * c12) / reps));
}

TEST(MartingaleW, Examples) {
  const GigpDistribution d({0.5, 2.0, 0.9, false});
  const std::vector<std::int64_t> sample = {0, 0, 1, 3, 0, 7, 2, 0};
  EXPECT_EQ(gigp::martingale_w(sample, d, 0.0), 0.0);
  const double m0 = 4.0;
  for (double t : {1.01, 2.0, 50.0})
    EXPECT_NEAR(gigp::martingale_w(sample, d, t), m0 / d.pmf(0) - 8.0, 1e-12);
  const auto table = gigp::table_from_sample(sample);
  for (double t : {0.0, 0.2, 0.5, 1.5}) EXPECT_NEAR(gigp::martingale_w(table, d, t), gigp::martingale_w(sample, d, t), 1e-12);
}

TEST(MartingaleW, DegenerateUnderTruncation) {
  const GigpDistribution d({0.0, 0.0, 0.9, true});
  const std::vector<std::int64_t> sample = {1, 2, 3};
  EXPECT_THROW(gigp::martingale_w(sample, d, 2.0), gigp::DomainError);
  EXPECT_THROW(gigp::martingale_w(sample, d, 1.0), gigp::DomainError);
  EXPECT_NO_THROW(gigp::martingale_w(sample, d, 0.4));
  EXPECT_THROW(gigp::martingale_w(sample, d, -1.0), gigp::DomainError);
}

TEST(MartingaleW, ZeroMeanAndOrthogonalIncrements) {
  const GigpDistribution d({0.5, 2.0, 0.9, false});
  const std::int64_t M = 40;
  const int reps = 10000;
  const double s = 0.1, t = 0.3;
  double sw = 0, sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int r = 0; r < reps; ++r) {
    const auto table = d.sample(5000 + r, M);
    const double ws = gigp::martingale_w(table, d, s);
    const double wt = gigp::martingale_w(table, d, t);
    sw += wt;
    const double inc = wt - ws;
    sa += ws;
    sb += inc;
    saa += ws * ws;
    sbb += inc * inc;
    sab += ws * inc;
  }
  const double var_t = M * d.ccdf(1.0 / t) / d.cdf(1.0 / t);
  EXPECT_LT(std::abs(sw / reps), 3.0 * std::sqrt(var_t / reps));
  const double ma = sa / reps, mb = sb / reps;
  const double corr = (sab / reps - ma * mb) / std::sqrt((saa / reps - ma * ma) * (sbb / reps - mb * mb));
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(double(reps)));
}
