#include "gigp/shape.hpp"

#include <algorithm>
#include <cmath>

#include "gigp/diagram.hpp"
#include "gigp/error.hpp"
#include "gigp/specfun.hpp"

namespace gigp {

char case_letter(ScalingCase c) {
  switch (c) {
    case ScalingCase::a: return 'a';
    case ScalingCase::b: return 'b';
    case ScalingCase::c: return 'c';
    case ScalingCase::d: return 'd';
  }
  return '?';
}

const char* regime_name(Regime r) { return r == Regime::regular ? "regular" : "chaotic"; }

double scaling_a(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("scaling_a: theta must lie in (0, 1)");
  return -1.0 / std::log(theta);
}

ScalingPair scaling_b(const GigpParams& params, std::int64_t M) {
  const GigpParams p = validate(params);
  if (M <= 0) throw ValidationError("scaling_b: M must be positive");
  const double m = static_cast<double>(M);
  const double log_eps = std::log1p(-p.theta);
  ScalingPair out{scaling_a(p.theta), 0.0, ScalingCase::a};
  if (p.nu > 0.0) {
    out.B = m * std::exp(-log_gamma(p.nu));
  } else if (p.nu == 0.0) {
    out.label = ScalingCase::b;
    out.B = m / -log_eps;
  } else if (p.alpha > 0.0) {
    out.label = ScalingCase::c;
    out.B = m * std::exp(-2.0 * p.nu * std::log(0.5 * p.alpha) - p.nu * log_eps - log_gamma(-p.nu));
  } else {
    out.label = ScalingCase::d;
    out.B = m * -p.nu * std::exp(-p.nu * log_eps - log_gamma(p.nu + 1.0));
  }
  if (p.zero_truncated && p.alpha > 0.0) {
    // Conditioning on j >= 1 inflates the tail by 1/(1 - f_0).
    const double log_f0 = 0.5 * p.nu * log_eps - log_bessel_k(p.nu, p.alpha * std::sqrt(1.0 - p.theta)) +
                          log_bessel_k(p.nu, p.alpha);
    out.B /= -std::expm1(log_f0);
  }
  return out;
}

Regime classify_regime(const ScalingPair& pair, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("classify_regime: threshold must be positive");
  return pair.B >= threshold ? Regime::regular : Regime::chaotic;
}

namespace {

void check_pair(const ScalingPair& pair) {
  if (!(pair.A > 0.0) || !(pair.B > 0.0)) throw DomainError("scaling pair must have A > 0 and B > 0");
}

ShapeReport sup_distance_impl(const FrequencyTable& table, const ScalingPair& pair, double nu, double delta,
                              const GigpDistribution* model) {
  if (!(delta > 0.0)) throw DomainError("sup_distance: requires delta > 0");
  check_pair(pair);
  const YoungBoundary y(table);
  const double M = static_cast<double>(table.M());
  ShapeReport report;
  report.delta = delta;

  auto record = [&](double x, double items, double value) {
    ShapePoint pt{x, value, upper_incomplete_gamma(nu, x), std::nullopt, std::nullopt};
    if (model) {
      const double sf = model->ccdf(items);
      const double mean = M * sf / pair.B;
      if (pt.phi > 0.0) pt.upsilon = std::sqrt(pair.B / pt.phi) * (value - mean);
      const double var = M * sf * (1.0 - sf) / (pair.B * pair.B);
      pt.mse = var + (mean - pt.phi) * (mean - pt.phi);
      report.max_mse = std::max(report.max_mse.value_or(0.0), *pt.mse);
    }
    report.pointwise.push_back(pt);
    return pt.phi;
  };
  auto consider = [&](double x, double value, double phi) {
    const double d = std::abs(value - phi);
    if (d > report.sup_distance) {
      report.sup_distance = d;
      report.sup_at = x;
    }
  };

  const double delta_items = to_items(pair.A, delta);
  const double at_delta = static_cast<double>(y(delta_items)) / pair.B;
  consider(delta, at_delta, record(delta, delta_items, at_delta));
  const auto& support = y.support();
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double items = static_cast<double>(support[i]);
    if (items < delta_items) continue;
    const double x = items / pair.A;
    const double left = static_cast<double>(y.value_at(i)) / pair.B;
    const double right = static_cast<double>(y.value_after(i)) / pair.B;
    const double phi = items == delta_items ? report.pointwise.front().phi : record(x, items, left);
    consider(x, left, phi);
    consider(x, right, phi);
  }
  return report;
}

}  // namespace

ShapeReport sup_distance(const FrequencyTable& table, const ScalingPair& pair, double nu, double delta) {
  return sup_distance_impl(table, pair, nu, delta, nullptr);
}

ShapeReport sup_distance(const FrequencyTable& table, const ScalingPair& pair, const GigpDistribution& model,
                         double delta) {
  return sup_distance_impl(table, pair, model.params().nu, delta, &model);
}

double upsilon(const FrequencyTable& table, const GigpDistribution& dist, std::int64_t M, const ScalingPair& pair,
               double x) {
  check_pair(pair);
  if (!(x > 0.0)) throw DomainError("upsilon: requires x > 0");
  const double phi = upper_incomplete_gamma(dist.params().nu, x);
  if (!(phi > 0.0)) throw DomainError("upsilon: phi_nu(x) underflows to 0");
  const double items = to_items(pair.A, x);
  const double y = static_cast<double>(young_y(table, items)) / pair.B;
  const double mean = static_cast<double>(M) * dist.ccdf(items) / pair.B;
  return std::sqrt(pair.B / phi) * (y - mean);
}

double upsilon(const FrequencyTable& table, const GigpParams& params, std::int64_t M, const ScalingPair& pair,
               double x) {
  return upsilon(table, GigpDistribution(params), M, pair, x);
}

double limit_cov(double nu, double x, double x2) {
  if (!(x > 0.0)) throw DomainError("limit_cov: requires x > 0");
  if (x2 < x) throw ValidationError("limit_cov: requires x2 >= x");
  return std::sqrt(upper_incomplete_gamma(nu, x2) / upper_incomplete_gamma(nu, x));
}

std::vector<std::pair<double, double>> tail_transform(std::span<const std::pair<double, double>> points) {
  std::vector<std::pair<double, double>> out;
  out.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("tail_transform: coordinates must be positive");
    out.emplace_back(std::log(x), std::log(y) + x);
  }
  return out;
}

double expected_shape_distance(const GigpDistribution& dist, const ScalingPair& pair, std::int64_t M, double x_lo,
                               double x_hi) {
  check_pair(pair);
  if (!(x_lo > 0.0) || !(x_hi >= x_lo)) throw DomainError("expected_shape_distance: requires 0 < x_lo <= x_hi");
  const double nu = dist.params().nu;
  const double scale = static_cast<double>(M) / pair.B;
  double best = 0.0;
  auto at = [&](double x, double sf) { best = std::max(best, std::abs(scale * sf - upper_incomplete_gamma(nu, x))); };
  at(x_lo, dist.ccdf(to_items(pair.A, x_lo)));
  at(x_hi, dist.ccdf(to_items(pair.A, x_hi)));
  const auto k_lo = static_cast<std::int64_t>(std::ceil(pair.A * x_lo));
  const auto k_hi = static_cast<std::int64_t>(std::floor(pair.A * x_hi));
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    const double x = static_cast<double>(k) / pair.A;
    const double kd = static_cast<double>(k);
    at(x, dist.ccdf(kd));
    if (x < x_hi) at(x, dist.ccdf(kd + 1.0));
  }
  return best;
}

}  // namespace gigp
