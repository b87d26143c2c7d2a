#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "gigp/diagram.hpp"
#include "gigp/error.hpp"
#include "gigp/partition.hpp"

namespace {

void enumerate(int remaining, int max_part, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    current.push_back(p);
    enumerate(remaining - p, p, current, out);
    current.pop_back();
  }
}

std::vector<std::vector<int>> partitions_of(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate(n, n, cur, out);
  return out;
}

}  // namespace

TEST(Calibrate, Examples) {
  EXPECT_NEAR(gigp::partition_kappa(), 1.282550, 1e-6);
  const auto c = gigp::calibrate(10000);
  EXPECT_NEAR(c.z, 0.987256, 1e-6);
  EXPECT_NEAR(gigp::calibrate(1).z, std::exp(-std::numbers::pi / std::sqrt(6.0)), 1e-15);
  EXPECT_NEAR(gigp::calibrate(1).z, 0.277, 1e-3);
  EXPECT_THROW(gigp::calibrate(0), gigp::ValidationError);
}

TEST(Calibrate, CutoffIsMinimal) {
  for (std::int64_t n : {1, 8, 100, 10000, 1000000}) {
    const auto c = gigp::calibrate(n);
    const double tail = std::pow(c.z, double(c.j_cutoff + 1)) / (1.0 - c.z);
    EXPECT_LT(tail, 1e-12);
    EXPECT_GE(std::pow(c.z, double(c.j_cutoff)) / (1.0 - c.z), 1e-12);
  }
}

TEST(SamplePartition, MultiplicityMeans) {
  const auto c = gigp::calibrate(100);
  const int reps = 4000;
  std::vector<double> sum(6, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto t = gigp::sample_partition(c, r);
    for (int j = 1; j <= 5; ++j) sum[j] += double(t.count(j));
  }
  for (int j = 1; j <= 5; ++j) {
    const double zj = std::pow(c.z, j);
    const double mean = zj / (1 - zj);
    const double sd = std::sqrt(zj) / (1 - zj);
    EXPECT_NEAR(sum[j] / reps, mean, 4.0 * sd / std::sqrt(double(reps))) << "j=" << j;
  }
}

TEST(SamplePartition, WeightAndPartsAtTenThousand) {
  const auto c = gigp::calibrate(10000);
  double n_sum = 0, m_sum = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const auto t = gigp::sample_partition(c, 300 + r);
    n_sum += double(t.N());
    m_sum += double(t.M());
  }
  EXPECT_NEAR(n_sum / reps / 10000.0, 1.0, 0.05);
  EXPECT_NEAR(m_sum / reps / gigp::asymptotic_parts(10000), 1.0, 0.1);
  EXPECT_NEAR(gigp::asymptotic_parts(10000), 359.06, 0.01);
  EXPECT_NEAR(m_sum / reps, gigp::expected_parts(c), 4.0 * std::sqrt(gigp::expected_parts(c) / reps));
  // Exact weight sum against the continuum value n (1 + O(n^-1/2)).
  EXPECT_NEAR(gigp::expected_weight(c) / 10000.0, 1.0, 0.02);
}

TEST(SamplePartition, Deterministic) {
  const auto c = gigp::calibrate(500);
  EXPECT_EQ(gigp::sample_partition(c, 12), gigp::sample_partition(c, 12));
  EXPECT_FALSE(gigp::sample_partition(c, 12) == gigp::sample_partition(c, 13));
}

TEST(PartitionShape, Examples) {
  const double k = gigp::partition_kappa();
  const double sym = std::log(2.0) / k;
  EXPECT_NEAR(sym, 0.5404, 1e-4);
  EXPECT_NEAR(gigp::partition_shape(sym), sym, 1e-14);
  EXPECT_LT(gigp::partition_shape(40.0), 1e-20);
  for (double x : {0.1, 1.0, 5.0}) {
    EXPECT_NEAR(std::exp(-k * x) + std::exp(-k * gigp::partition_shape(x)), 1.0, 1e-14);
  }
  EXPECT_THROW(gigp::partition_shape(0.0), gigp::DomainError);
}

TEST(PartitionSup, MatchesDenseGrid) {
  const auto c = gigp::calibrate(2500);
  const auto t = gigp::sample_partition(c, 4);
  const double s = 50.0;
  const double sup = gigp::partition_sup_distance(t, 2500, 0.3);
  double brute = 0;
  for (double x = 0.3; x < 5.0; x += 1e-4) {
    brute = std::max(brute, std::abs(double(gigp::young_y(t, s * x)) / s - gigp::partition_shape(x)));
  }
  EXPECT_GE(sup + 1e-12, brute);
  EXPECT_LT(sup - brute, 5e-3);
}

TEST(PartitionSup, ScaledDiagramApproachesShape) {
  std::vector<double> med;
  for (std::int64_t n : {400, 10000, 250000}) {
    const auto c = gigp::calibrate(n);
    std::vector<double> sups;
    for (int r = 0; r < 21; ++r) sups.push_back(gigp::partition_sup_distance(gigp::sample_partition(c, r), n, 0.3));
    std::nth_element(sups.begin(), sups.begin() + 10, sups.end());
    med.push_back(sups[10]);
  }
  EXPECT_GT(med[0], med[1]);
  EXPECT_GT(med[1], med[2]);
}

TEST(PartitionUniformity, ConditionalOnWeightEight) {
  const auto all = partitions_of(8);
  ASSERT_EQ(all.size(), 22u);
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < all.size(); ++i) index[all[i]] = static_cast<int>(i);
  const auto c = gigp::calibrate(8);
  std::vector<double> counts(all.size(), 0.0);
  double hits = 0;
  for (int r = 0; r < 100000; ++r) {
    const auto t = gigp::sample_partition(c, r);
    if (t.N() != 8) continue;
    std::vector<int> parts;
    for (auto it = t.entries().rbegin(); it != t.entries().rend(); ++it)
      for (std::int64_t k = 0; k < it->count; ++k) parts.push_back(static_cast<int>(it->j));
    counts[index.at(parts)] += 1.0;
    hits += 1.0;
  }
  ASSERT_GT(hits, 22.0 * 20);
  double stat = 0;
  const double e = hits / 22.0;
  for (double o : counts) stat += (o - e) * (o - e) / e;
  boost::math::chi_squared_distribution<double> chi(21);
  EXPECT_GT(boost::math::cdf(boost::math::complement(chi, stat)), 0.01);
}
