#include "gigp/fitgof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gigp/diagram.hpp"
#include "gigp/error.hpp"
#include "gigp/specfun.hpp"

namespace gigp {

namespace {

void absorb(GofBin& into, const GofBin& from) {
  into.first = std::min(into.first, from.first);
  into.last = std::max(into.last, from.last);
  into.observed += from.observed;
  into.expected += from.expected;
}

}  // namespace

GofReport pearson_chi2(std::span<const double> observed, std::span<const double> expected, int n_fitted,
                       double min_expected) {
  if (observed.size() != expected.size()) throw ValidationError("pearson_chi2: length mismatch");
  if (observed.empty()) throw InsufficientDataError("pearson_chi2: no cells");
  if (n_fitted < 0) throw ValidationError("pearson_chi2: n_fitted must be nonnegative");
  if (!(min_expected >= 0.0)) throw ValidationError("pearson_chi2: min_expected must be nonnegative");
  double so = 0.0, se = 0.0;
  std::vector<GofBin> bins;
  bins.reserve(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(observed[i] >= 0.0)) throw ValidationError("pearson_chi2: observed counts must be nonnegative");
    if (!(expected[i] > 0.0)) throw ValidationError("pearson_chi2: expected counts must be positive");
    so += observed[i];
    se += expected[i];
    const auto k = static_cast<std::int64_t>(i);
    bins.push_back({k, k, observed[i], expected[i]});
  }
  if (std::abs(so - se) > 0.005 * se) throw ValidationError("pearson_chi2: observed and expected totals differ by more than 0.5%");

  while (bins.size() > 1 && bins.front().expected < min_expected) {
    absorb(bins[1], bins[0]);
    bins.erase(bins.begin());
  }
  while (bins.size() > 1 && bins.back().expected < min_expected) {
    absorb(bins[bins.size() - 2], bins.back());
    bins.pop_back();
  }
  for (;;) {
    std::size_t worst = bins.size();
    for (std::size_t i = 1; i + 1 < bins.size(); ++i) {
      if (bins[i].expected < min_expected && (worst == bins.size() || bins[i].expected < bins[worst].expected)) worst = i;
    }
    if (worst == bins.size()) break;
    const std::size_t into = bins[worst - 1].expected <= bins[worst + 1].expected ? worst - 1 : worst + 1;
    absorb(bins[into], bins[worst]);
    bins.erase(bins.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  if (bins.size() < 2) throw InsufficientDataError("pearson_chi2: fewer than 2 cells remain after merging");
  const int df = static_cast<int>(bins.size()) - 1 - n_fitted;
  if (df < 1) throw InsufficientDataError("pearson_chi2: no degrees of freedom left");

  GofReport report;
  for (const auto& b : bins) report.statistic += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
  report.df = df;
  report.p_value = chi2_sf(report.statistic, df);
  report.bins = std::move(bins);
  return report;
}

namespace {

// Linear-interpolation quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

TailFit fit_transformed(const std::vector<double>& us, const std::vector<double>& vs, std::optional<double> u_min,
                        std::optional<double> u_max) {
  if (us.size() < 3) throw InsufficientDataError("fit_tail_line: fewer than 3 jump points");
  if (!u_min || !u_max) {
    std::vector<double> sorted = us;
    std::sort(sorted.begin(), sorted.end());
    if (!u_min) u_min = quantile(sorted, 0.2);
    if (!u_max) u_max = quantile(sorted, 0.8);
  }
  if (!(*u_min <= *u_max)) throw ValidationError("fit_tail_line: u_min exceeds u_max");

  double n = 0, su = 0, sv = 0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (us[i] < *u_min || us[i] > *u_max) continue;
    n += 1;
    su += us[i];
    sv += vs[i];
  }
  if (n < 3) throw InsufficientDataError("fit_tail_line: fewer than 3 points in the fit window");
  const double mu = su / n, mv = sv / n;
  double suu = 0, suv = 0, svv = 0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (us[i] < *u_min || us[i] > *u_max) continue;
    suu += (us[i] - mu) * (us[i] - mu);
    suv += (us[i] - mu) * (vs[i] - mv);
    svv += (vs[i] - mv) * (vs[i] - mv);
  }
  if (!(suu > 0.0)) throw InsufficientDataError("fit_tail_line: abscissae in the window are all equal");
  TailFit fit;
  fit.slope = suv / suu;
  fit.intercept = mv - fit.slope * mu;
  fit.nu_hat = fit.slope + 1.0;
  fit.logB_hat = fit.intercept;
  fit.r_squared = svv > 0.0 ? std::clamp(suv * suv / (suu * svv), 0.0, 1.0) : 1.0;
  fit.u_min = *u_min;
  fit.u_max = *u_max;
  fit.points = static_cast<std::size_t>(n);
  return fit;
}

}  // namespace

TailFit fit_tail_line(const FrequencyTable& table, double A, std::optional<double> u_min,
                      std::optional<double> u_max) {
  if (!(A > 0.0)) throw DomainError("fit_tail_line: A must be positive");
  const YoungBoundary y(table);
  std::vector<double> us, vs;
  for (std::size_t i = 0; i < y.support().size(); ++i) {
    const std::int64_t j = y.support()[i];
    if (j < 1) continue;
    const double x = static_cast<double>(j) / A;
    us.push_back(std::log(x));
    vs.push_back(std::log(static_cast<double>(y.value_at(i))) + x);
  }
  return fit_transformed(us, vs, u_min, u_max);
}

TailFit fit_tail_points(std::span<const std::pair<double, double>> points, std::optional<double> u_min,
                        std::optional<double> u_max) {
  std::vector<double> us, vs;
  us.reserve(points.size());
  vs.reserve(points.size());
  for (const auto& [u, v] : tail_transform(points)) {
    us.push_back(u);
    vs.push_back(v);
  }
  return fit_transformed(us, vs, u_min, u_max);
}

std::optional<double> alpha_from_b(double nu, double theta, std::int64_t M, double B_hat) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("alpha_from_b: theta must lie in (0, 1)");
  if (M <= 0) throw ValidationError("alpha_from_b: M must be positive");
  if (nu >= 0.0) return std::nullopt;
  if (nu < -1.0) throw DomainError("alpha_from_b: requires nu >= -1");
  if (!(B_hat > 0.0)) throw DomainError("alpha_from_b: inversion base must be positive");
  // B = M (alpha/2)^(-2 nu) eps^(-nu) / Gamma(-nu).
  const double log_base = std::log(B_hat) + log_gamma(-nu) - std::log(static_cast<double>(M)) + nu * std::log1p(-theta);
  return 2.0 * std::exp(-log_base / (2.0 * nu));
}

double estimate_theta(double nu, double alpha, const FrequencyTable& table, std::optional<bool> zero_truncated) {
  if (table.M() == 0) throw InsufficientDataError("estimate_theta: empty table");
  const double eta = static_cast<double>(table.N()) / static_cast<double>(table.M());
  return theta_from_mean(nu, alpha, eta, zero_truncated);
}

ZTest pointwise_z_test(const FrequencyTable& table, const GigpDistribution& dist, std::int64_t M,
                       const ScalingPair& pair, double x, double threshold) {
  const double z = upsilon(table, dist, M, pair, x);
  const double tail = normal_cdf(-std::abs(z));
  return {z, std::min(1.0, 2.0 * tail), tail, classify_regime(pair, threshold) == Regime::chaotic};
}

ZTest pointwise_z_test(const FrequencyTable& table, const GigpParams& params, std::int64_t M,
                       const ScalingPair& pair, double x, double threshold) {
  return pointwise_z_test(table, GigpDistribution(params), M, pair, x, threshold);
}

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series, fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      s += std::exp(-m * m * pi2 / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_normality(std::span<const double> samples) {
  if (samples.size() < 20) throw InsufficientDataError("ks_normality: needs at least 20 samples");
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal_cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double rn = std::sqrt(n);
  return {d, kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d)};
}

}  // namespace gigp
