#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gigp/frequency_table.hpp"
#include "gigp/model.hpp"
#include "gigp/shape.hpp"

namespace gigp {

// A group of consecutive input cells [first, last] (input indices).
struct GofBin {
  std::int64_t first;
  std::int64_t last;
  double observed;
  double expected;
};

struct GofReport {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::vector<GofBin> bins;
};

// Pearson chi-square after merging cells with expected < min_expected: the
// lowest cell into its right neighbour and the highest into its left one until
// both edges qualify, then any remaining interior cell into its smaller
// neighbour. df = bins - 1 - n_fitted.
GofReport pearson_chi2(std::span<const double> observed, std::span<const double> expected, int n_fitted,
                       double min_expected = 5.0);

struct TailFit {
  double slope;
  double intercept;
  double nu_hat;    // slope + 1
  double logB_hat;  // intercept
  double r_squared;
  double u_min;
  double u_max;
  std::size_t points;
};

// Least-squares line through (log x, log Y(A x) + x) at the jump points
// x = j / A, j >= 1. The default window is the 20th to 80th percentile of the
// available abscissae.
TailFit fit_tail_line(const FrequencyTable& table, double A, std::optional<double> u_min = {},
                      std::optional<double> u_max = {});

// Same fit on arbitrary (x, y) points with x, y > 0.
TailFit fit_tail_points(std::span<const std::pair<double, double>> points, std::optional<double> u_min = {},
                        std::optional<double> u_max = {});

// Inverts the case (c) y-scaling for alpha. Empty for nu >= 0, where B does
// not depend on alpha.
std::optional<double> alpha_from_b(double nu, double theta, std::int64_t M, double B_hat);

// theta matching the sample mean N / M.
double estimate_theta(double nu, double alpha, const FrequencyTable& table, std::optional<bool> zero_truncated = {});

struct ZTest {
  double z;
  double two_sided_p;
  double one_sided_p;  // P(Z <= -|z|)
  bool regime_warning;  // B below the regular-regime threshold
};

ZTest pointwise_z_test(const FrequencyTable& table, const GigpDistribution& dist, std::int64_t M,
                       const ScalingPair& pair, double x, double threshold = kDefaultRegimeThreshold);
ZTest pointwise_z_test(const FrequencyTable& table, const GigpParams& params, std::int64_t M,
                       const ScalingPair& pair, double x, double threshold = kDefaultRegimeThreshold);

struct KsResult {
  double d_stat;
  double p_approx;
};

// Kolmogorov-Smirnov distance to N(0, 1) with the asymptotic p-value.
KsResult ks_normality(std::span<const double> samples);

// P(sup |Brownian bridge| > lambda).
double kolmogorov_sf(double lambda);

}  // namespace gigp
