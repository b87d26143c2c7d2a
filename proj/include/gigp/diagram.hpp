#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gigp/frequency_table.hpp"
#include "gigp/model.hpp"

namespace gigp {

// Upper boundary Y(x) = sum_{j >= x} M_j of the Young diagram, a
// nonincreasing left-continuous step function with jumps at the support.
class YoungBoundary {
 public:
  explicit YoungBoundary(const FrequencyTable& table);

  std::int64_t operator()(double x) const;

  // Support values in increasing order and Y at each of them.
  const std::vector<std::int64_t>& support() const { return support_; }
  std::int64_t value_at(std::size_t i) const { return suffix_[i]; }
  // Y just to the right of support()[i].
  std::int64_t value_after(std::size_t i) const { return suffix_[i + 1]; }

  std::int64_t M() const { return suffix_.front(); }
  // Integral of Y over [0, inf), summed from the step structure.
  std::int64_t area() const;

 private:
  std::vector<std::int64_t> support_;
  std::vector<std::int64_t> suffix_;  // suffix_[i] = sum of counts at indices >= i
};

std::int64_t young_y(const FrequencyTable& table, double x);

// A * x in item units, snapped to the nearest integer when within relative
// 1e-9 so that x = j / A lands exactly on the jump at j.
double to_items(double A, double x);

// Y(A x) / B.
double scaled_y(const FrequencyTable& table, double A, double B, double x);

struct BoundaryMoments {
  double mean;
  double variance;
  double covariance;  // Cov(Y(x), Y(x2))
};

BoundaryMoments boundary_moments(const GigpDistribution& dist, std::int64_t M, double x, double x2);
BoundaryMoments boundary_moments(const GigpParams& params, std::int64_t M, double x, double x2);

// W(t) = sum_i 1{X_i < 1/t} / F(1/t) - M, with W(0) = 0.
double martingale_w(std::span<const std::int64_t> sample, const GigpDistribution& dist, double t);
double martingale_w(const FrequencyTable& table, const GigpDistribution& dist, double t);

}  // namespace gigp
