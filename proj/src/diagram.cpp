#include "gigp/diagram.hpp"

#include <algorithm>
#include <cmath>

#include "gigp/error.hpp"

namespace gigp {

YoungBoundary::YoungBoundary(const FrequencyTable& table) {
  const auto& e = table.entries();
  support_.reserve(e.size());
  suffix_.assign(e.size() + 1, 0);
  for (const auto& entry : e) support_.push_back(entry.j);
  for (std::size_t i = e.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + e[i].count;
}

std::int64_t YoungBoundary::operator()(double x) const {
  if (std::isnan(x)) throw DomainError("young_y: x is NaN");
  if (support_.empty() || x > static_cast<double>(support_.back())) return 0;
  if (x <= static_cast<double>(support_.front())) return suffix_.front();
  const auto k = static_cast<std::int64_t>(std::ceil(x));
  const auto it = std::lower_bound(support_.begin(), support_.end(), k);
  return suffix_[static_cast<std::size_t>(it - support_.begin())];
}

std::int64_t YoungBoundary::area() const {
  // Y is constant on (previous support point, j], for k >= 1.
  std::int64_t total = 0;
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] <= 0) continue;
    total += (support_[i] - prev) * suffix_[i];
    prev = support_[i];
  }
  return total;
}

std::int64_t young_y(const FrequencyTable& table, double x) { return YoungBoundary(table)(x); }

double to_items(double A, double x) {
  const double v = A * x;
  const double r = std::round(v);
  return std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v)) ? r : v;
}

double scaled_y(const FrequencyTable& table, double A, double B, double x) {
  if (!(A > 0.0) || !(B > 0.0)) throw DomainError("scaled_y: requires A > 0 and B > 0");
  return static_cast<double>(young_y(table, to_items(A, x))) / B;
}

BoundaryMoments boundary_moments(const GigpDistribution& dist, std::int64_t M, double x, double x2) {
  if (x2 < x) throw ValidationError("boundary_moments: requires x2 >= x");
  const double m = static_cast<double>(M);
  const double sf = dist.ccdf(x);
  const double cdf = dist.cdf(x);
  return {m * sf, m * sf * cdf, m * dist.ccdf(x2) * cdf};
}

BoundaryMoments boundary_moments(const GigpParams& params, std::int64_t M, double x, double x2) {
  return boundary_moments(GigpDistribution(params), M, x, x2);
}

namespace {

double w_from_count(std::int64_t below, std::int64_t M, const GigpDistribution& dist, double t) {
  if (!(t >= 0.0)) throw DomainError("martingale_w: requires t >= 0");
  if (t == 0.0) return 0.0;
  const double f = dist.cdf(1.0 / t);
  if (!(f > 0.0))
    throw DomainError("martingale_w: F(1/t) = 0, normalization undefined (1/t at or below the support minimum)");
  return static_cast<double>(below) / f - static_cast<double>(M);
}

}  // namespace

double martingale_w(std::span<const std::int64_t> sample, const GigpDistribution& dist, double t) {
  if (t > 0.0) {
    const double x = 1.0 / t;
    const auto below = std::count_if(sample.begin(), sample.end(), [x](std::int64_t v) { return v < x; });
    return w_from_count(below, static_cast<std::int64_t>(sample.size()), dist, t);
  }
  return w_from_count(0, static_cast<std::int64_t>(sample.size()), dist, t);
}

double martingale_w(const FrequencyTable& table, const GigpDistribution& dist, double t) {
  if (t > 0.0) return w_from_count(table.M() - young_y(table, 1.0 / t), table.M(), dist, t);
  return w_from_count(0, table.M(), dist, t);
}

}  // namespace gigp
