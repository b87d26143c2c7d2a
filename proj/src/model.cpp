#include "gigp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gigp/error.hpp"
#include "gigp/specfun.hpp"

namespace gigp {
namespace {

constexpr double kTailTolerance = 1e-17;
constexpr std::size_t kMaxTable = 20'000'000;

void check_domain(const GigpParams& p, bool allow_below_minus_one) {
  if (!std::isfinite(p.nu) || !std::isfinite(p.alpha) || !std::isfinite(p.theta))
    throw ValidationError("parameters must be finite");
  if (!(p.theta > 0.0 && p.theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
  if (p.alpha < 0.0) throw ValidationError("alpha must be >= 0");
  if (p.nu < -1.0 && !allow_below_minus_one) throw ValidationError("nu must be >= -1");
  if (p.nu <= -1.0 && p.alpha == 0.0) throw ValidationError("nu <= -1 requires alpha > 0");
  if (p.alpha == 0.0 && p.nu <= 0.0 && !p.zero_truncated)
    throw ValidationError("alpha = 0 with nu <= 0 requires zero truncation");
}

// nu / (exp(-nu * log_eps) - 1), continuous at nu = 0.
double truncated_family_constant(double nu, double log_eps) {
  if (nu == 0.0) return 1.0 / (-log_eps);
  return nu / std::expm1(-nu * log_eps);
}

// ln f_0 of the untruncated law with alpha > 0.
double log_zero_mass(double nu, double alpha, double eps) {
  return 0.5 * nu * std::log(eps) - log_bessel_k(nu, alpha * std::sqrt(eps)) + log_bessel_k(nu, alpha);
}

double mean_closed_form(const GigpParams& p) {
  const double eps = 1.0 - p.theta;
  const double log_eps = std::log1p(-p.theta);
  if (p.alpha > 0.0) {
    const double sq = std::sqrt(eps);
    const double eta = p.alpha * p.theta / (2.0 * sq) * bessel_k_ratio(p.nu, p.alpha * sq);
    if (!p.zero_truncated) return eta;
    return eta / -std::expm1(log_zero_mass(p.nu, p.alpha, eps));
  }
  if (!p.zero_truncated) return p.nu * p.theta / eps;
  if (p.nu == 0.0) return p.theta / (eps * -log_eps);
  return p.theta / eps * p.nu / -std::expm1(p.nu * log_eps);
}

// Compensated running sum.
struct Neumaier {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double t = sum + v;
    c += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace

GigpParams validate(const GigpParams& params) {
  check_domain(params, false);
  return params;
}

GigpDistribution::GigpDistribution(const GigpParams& params) : params_(validate(params)) {
  const double nu = params_.nu;
  const double alpha = params_.alpha;
  const double theta = params_.theta;
  const bool truncated = params_.zero_truncated;
  const double eps = 1.0 - theta;
  const double log_eps = std::log1p(-theta);
  const double log_theta = std::log(theta);
  mean_ = mean_closed_form(params_);

  double lp = 0.0;
  double ratio = 0.0;
  const double log_half_at = alpha > 0.0 ? std::log(0.5 * alpha * theta) : 0.0;
  if (alpha > 0.0) {
    first_ = 0;
    lp = log_zero_mass(nu, alpha, eps);
    ratio = bessel_k_ratio(nu, alpha);
  } else if (!truncated) {
    first_ = 0;
    lp = nu * log_eps;
  } else {
    first_ = 1;
    lp = log_theta + std::log(truncated_family_constant(nu, log_eps));
  }

  // ln f_{j+1} - ln f_j; advances the Bessel ratio to the next order.
  auto log_step = [&](std::int64_t j) {
    const double jd = static_cast<double>(j);
    if (alpha > 0.0) {
      const double s = log_half_at - std::log(jd + 1.0) + std::log(ratio);
      ratio = bessel_k_ratio_step(nu + jd + 1.0, alpha, ratio);
      return s;
    }
    return log_theta + std::log(nu + jd) - std::log(jd + 1.0);
  };

  log_pmf_.push_back(lp);
  for (std::int64_t j = first_;; ++j) {
    const double ratio_here = ratio;
    const double step = log_step(j);
    const double q = std::exp(step);
    if (q < 1.0 && static_cast<double>(j) >= mean_) {
      const double q_sup = std::max(q, theta);
      if (std::exp(lp) * q_sup / (1.0 - q_sup) < kTailTolerance) {
        last_ratio_ = ratio_here;
        break;
      }
    }
    lp += step;
    log_pmf_.push_back(lp);
    if (log_pmf_.size() > kMaxTable)
      throw NonConvergenceError("pmf table exceeds " + std::to_string(kMaxTable) + " entries; theta too close to 1");
  }
  if (alpha > 0.0) {
    f0_ = std::exp(log_pmf_.front());
    if (truncated) {
      log_norm_ = std::log(-std::expm1(log_pmf_.front()));
      log_pmf_.erase(log_pmf_.begin());
      for (double& v : log_pmf_) v -= log_norm_;
      first_ = 1;
    }
  } else if (!truncated) {
    f0_ = std::exp(log_pmf_.front());
  } else {
    f0_ = nu > 0.0 ? std::exp(nu * log_eps) : std::numeric_limits<double>::quiet_NaN();
  }

  const std::size_t n = log_pmf_.size();
  prefix_.assign(n + 1, 0.0);
  suffix_.assign(n + 1, 0.0);
  Neumaier acc;
  for (std::size_t i = 0; i < n; ++i) {
    acc.add(std::exp(log_pmf_[i]));
    prefix_[i + 1] = acc.value();
  }
  Neumaier back;
  for (std::size_t i = n; i-- > 0;) {
    back.add(std::exp(log_pmf_[i]));
    suffix_[i] = back.value();
  }
  if (std::abs(suffix_[0] - 1.0) > 1e-9)
    throw NonConvergenceError("pmf normalization check failed (sum = " + std::to_string(suffix_[0]) + ")");

  if (alpha > 0.0) gig_.emplace(nu, 2.0 * eps / theta, alpha * alpha * theta / 2.0);
}

double GigpDistribution::log_pmf(std::int64_t j) const {
  if (j < 0) throw DomainError("pmf: j must be >= 0");
  if (j < first_) throw DomainError("pmf: j = 0 is outside the support of a zero-truncated law");
  const std::int64_t end = table_end();
  if (j < end) return log_pmf_[static_cast<std::size_t>(j - first_)];
  // Beyond the cutoff: continue the incremental ratio from the last entry.
  const double nu = params_.nu;
  const double alpha = params_.alpha;
  double lp = log_pmf_.back();
  double ratio = last_ratio_;
  for (std::int64_t k = end - 1; k < j; ++k) {
    const double kd = static_cast<double>(k);
    if (alpha > 0.0) {
      lp += std::log(0.5 * alpha * params_.theta) - std::log(kd + 1.0) + std::log(ratio);
      ratio = bessel_k_ratio_step(nu + kd + 1.0, alpha, ratio);
    } else {
      lp += std::log(params_.theta) + std::log(nu + kd) - std::log(kd + 1.0);
    }
  }
  return lp;
}

double GigpDistribution::pmf(std::int64_t j) const { return std::exp(log_pmf(j)); }

std::size_t GigpDistribution::index_of(double x) const {
  // x > first_ and x < table_end() here.
  return static_cast<std::size_t>(static_cast<std::int64_t>(std::ceil(x)) - first_);
}

double GigpDistribution::ccdf(double x) const {
  if (std::isnan(x)) throw DomainError("ccdf: x is NaN");
  if (x <= static_cast<double>(first_)) return 1.0;
  if (x > static_cast<double>(table_end() - 1)) return 0.0;
  return suffix_[index_of(x)] / suffix_[0];
}

double GigpDistribution::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("cdf: x is NaN");
  if (x <= static_cast<double>(first_)) return 0.0;
  if (x > static_cast<double>(table_end() - 1)) return 1.0;
  return prefix_[index_of(x)] / suffix_[0];
}

std::int64_t GigpDistribution::inverse_cdf(double u) const {
  const double target = u * suffix_[0];
  auto it = std::lower_bound(prefix_.begin() + 1, prefix_.end(), target);
  if (it == prefix_.end()) --it;
  return first_ + static_cast<std::int64_t>(it - prefix_.begin()) - 1;
}

std::int64_t GigpDistribution::draw_mixture(Rng& rng) const {
  const double lambda = (*gig_)(rng);
  if (!(lambda > 0.0)) return 0;
  std::poisson_distribution<std::int64_t> poisson(lambda);
  return poisson(rng);
}

std::int64_t GigpDistribution::draw(Rng& rng) const {
  if (gig_) {
    if (!params_.zero_truncated) return draw_mixture(rng);
    // Rejection of zeros while they are not the bulk of the mass.
    if (1.0 - f0_ >= 0.1) {
      for (;;) {
        const std::int64_t v = draw_mixture(rng);
        if (v >= 1) return v;
      }
    }
  }
  return inverse_cdf(uniform_open(rng));
}

std::vector<std::int64_t> GigpDistribution::sample_values(std::uint64_t seed, std::int64_t count) const {
  if (count < 0) throw ValidationError("sample: count must be >= 0");
  Rng rng(seed);
  std::vector<std::int64_t> out(static_cast<std::size_t>(count));
  for (auto& v : out) v = draw(rng);
  return out;
}

FrequencyTable GigpDistribution::sample(std::uint64_t seed, std::int64_t count) const {
  const auto values = sample_values(seed, count);
  return FrequencyTable::from_sample(values);
}

double pmf(const GigpParams& params, std::int64_t j) { return GigpDistribution(params).pmf(j); }

double ccdf(const GigpParams& params, double x) { return GigpDistribution(params).ccdf(x); }

double mean_exact(const GigpParams& params) { return mean_closed_form(validate(params)); }

double mean_asymptotic(const GigpParams& params) {
  check_domain(params, true);
  const double nu = params.nu;
  const double alpha = params.alpha;
  const double eps = 1.0 - params.theta;
  const double half_a = 0.5 * alpha;
  double eta;
  if (nu > 0.0)
    eta = nu / eps;
  else if (nu == 0.0)
    eta = 1.0 / (eps * -std::log(eps));
  else if (nu > -1.0)
    eta = alpha > 0.0 ? std::tgamma(nu + 1.0) * std::pow(half_a, -2.0 * nu) / (std::tgamma(-nu) * std::pow(eps, nu + 1.0))
                      : -nu / std::pow(eps, nu + 1.0);
  else if (nu == -1.0)
    eta = half_a * half_a * -std::log(eps);
  else
    eta = half_a * half_a / (-nu - 1.0);
  if (params.zero_truncated && alpha > 0.0 && nu < 0.0) {
    // Limit of P(X = 0) as theta -> 1.
    const double f0 = 2.0 * std::exp(log_bessel_k(nu, alpha) - nu * std::log(half_a) - log_gamma(-nu));
    eta /= 1.0 - f0;
  }
  return eta;
}

double theta_from_mean(double nu, double alpha, double eta_target, std::optional<bool> zero_truncated) {
  GigpParams p{nu, alpha, 0.5, zero_truncated.value_or(alpha == 0.0 && nu <= 0.0)};
  validate(p);
  if (!std::isfinite(eta_target)) throw ValidationError("theta_from_mean: target mean must be finite");
  const double infimum = p.zero_truncated ? 1.0 : 0.0;
  if (!(eta_target > infimum))
    throw NoSolutionError("theta_from_mean: target mean " + std::to_string(eta_target) +
                          " is not above the attainable infimum " + std::to_string(infimum));

  // Leading-order inverse for 1 - theta.
  double eps;
  if (nu > 0.0) {
    eps = nu / eta_target;
  } else if (nu == 0.0) {
    eps = 1.0 / eta_target;
    for (int i = 0; i < 20 && eps < 1.0; ++i) eps = 1.0 / (eta_target * -std::log(eps));
  } else if (nu > -1.0) {
    const double c = alpha > 0.0 ? std::tgamma(nu + 1.0) * std::pow(0.5 * alpha, -2.0 * nu) / std::tgamma(-nu) : -nu;
    eps = std::pow(c / eta_target, 1.0 / (nu + 1.0));
  } else {
    eps = std::exp(-eta_target / (0.25 * alpha * alpha));
  }
  if (!(eps > 0.0) || !(eps < 0.5)) eps = std::isnan(eps) || eps >= 0.5 ? 0.5 : 1e-300;

  const double theta_max = std::nextafter(1.0, 0.0);
  const double s_max = std::log(theta_max / (1.0 - theta_max));
  const double s_min = -700.0;
  auto theta_of = [](double s) { return 1.0 / (1.0 + std::exp(-s)); };
  auto gap = [&](double s) {
    p.theta = theta_of(s);
    return mean_closed_form(p) / eta_target - 1.0;
  };

  int evals = 0;
  constexpr int kMaxEvals = 200;
  double s0 = std::clamp(std::log((1.0 - eps) / eps), s_min, s_max);
  double lo = s0;
  double hi = s0;
  double step = 1.0;
  if (gap(s0) < 0.0) {
    for (;;) {
      if (hi >= s_max)
        throw NoSolutionError("theta_from_mean: target mean exceeds the value at the largest representable theta");
      lo = hi;
      hi = std::min(hi + step, s_max);
      step *= 2.0;
      if (++evals > kMaxEvals) throw NonConvergenceError("theta_from_mean: bracketing failed");
      if (gap(hi) >= 0.0) break;
    }
  } else {
    for (;;) {
      if (lo <= s_min) throw NoSolutionError("theta_from_mean: target mean too close to the attainable infimum");
      hi = lo;
      lo = std::max(lo - step, s_min);
      step *= 2.0;
      if (++evals > kMaxEvals) throw NonConvergenceError("theta_from_mean: bracketing failed");
      if (gap(lo) <= 0.0) break;
    }
  }

  for (; evals <= kMaxEvals; ++evals) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || theta_of(lo) == theta_of(hi))
      return std::abs(gap(lo)) <= std::abs(gap(hi)) ? theta_of(lo) : theta_of(hi);
    const double g = gap(mid);
    if (std::abs(g) <= 1e-13) return theta_of(mid);
    if (g < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  throw NonConvergenceError("theta_from_mean: bisection did not converge within the iteration cap");
}

double gig_density(const GigpParams& params, double lambda) {
  validate(params);
  if (!(lambda > 0.0)) throw DomainError("gig_density: requires lambda > 0");
  const double nu = params.nu;
  const double alpha = params.alpha;
  const double theta = params.theta;
  const double eps = 1.0 - theta;
  if (alpha == 0.0) {
    if (nu <= 0.0) throw DomainError("gig_density: alpha = 0 requires nu > 0 (gamma mixing law)");
    const double rate = eps / theta;
    return std::exp(nu * std::log(rate) - log_gamma(nu) + (nu - 1.0) * std::log(lambda) - rate * lambda);
  }
  const double sq = std::sqrt(eps);
  const double log_g = nu * std::log(2.0 * sq / (alpha * theta)) - std::log(2.0) - log_bessel_k(nu, alpha * sq) +
                       (nu - 1.0) * std::log(lambda) - eps * lambda / theta - alpha * alpha * theta / (4.0 * lambda);
  return std::exp(log_g);
}

FrequencyTable sample(const GigpParams& params, std::uint64_t seed, std::int64_t count) {
  return GigpDistribution(params).sample(seed, count);
}

double tail_pmf_asymptotic(const GigpParams& params, std::int64_t j) {
  validate(params);
  if (j < 1) throw DomainError("tail_pmf_asymptotic: requires j >= 1");
  const double nu = params.nu;
  const double alpha = params.alpha;
  const double theta = params.theta;
  const double eps = 1.0 - theta;
  const double log_eps = std::log1p(-theta);
  double log_c;
  if (alpha > 0.0) {
    log_c = 0.5 * nu * log_eps - nu * std::log(0.5 * alpha) - std::log(2.0) - log_bessel_k(nu, alpha * std::sqrt(eps));
    if (params.zero_truncated) log_c -= std::log(-std::expm1(log_zero_mass(nu, alpha, eps)));
  } else if (!params.zero_truncated) {
    log_c = nu * log_eps - log_gamma(nu);
  } else if (nu == 0.0) {
    log_c = -std::log(-log_eps);
  } else {
    // (-nu) / (Gamma(nu + 1) (1 - eps^-nu)), written for either sign of nu.
    log_c = std::log(truncated_family_constant(nu, log_eps)) - log_gamma(nu + 1.0);
  }
  const double jd = static_cast<double>(j);
  return std::exp(log_c + (nu - 1.0) * std::log(jd) + jd * std::log(theta));
}

}  // namespace gigp
