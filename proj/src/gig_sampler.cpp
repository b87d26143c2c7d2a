#include "gigp/gig_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "gigp/error.hpp"

namespace gigp {

GigSampler::GigSampler(double p, double a, double b) : p_(p) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(p) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("GIG sampler: requires a > 0, b > 0 and finite p");
  lambda_ = std::abs(p);
  omega_ = std::sqrt(a * b);
  // sqrt(omega^2 + lambda^2) - lambda without cancellation for small omega.
  alpha_ = omega_ * omega_ / (std::sqrt(omega_ * omega_ + lambda_ * lambda_) + lambda_);
  scale_ = std::sqrt(b / a);
  mode_shift_ = lambda_ / omega_ + std::sqrt(1.0 + (lambda_ / omega_) * (lambda_ / omega_));

  const double x1 = -psi(1.0);
  if (x1 >= 0.5 && x1 <= 2.0)
    t_ = 1.0;
  else if (x1 > 2.0)
    t_ = std::sqrt(2.0 / (alpha_ + lambda_));
  else
    t_ = std::log(4.0 / (alpha_ + 2.0 * lambda_));

  const double x2 = -psi(-1.0);
  if (x2 >= 0.5 && x2 <= 2.0) {
    s_ = 1.0;
  } else if (x2 > 2.0) {
    s_ = std::sqrt(4.0 / (alpha_ * std::cosh(1.0) + lambda_));
  } else {
    const double ia = 1.0 / alpha_;
    s_ = std::log(1.0 + ia + std::sqrt(ia * ia + 2.0 * ia));
    if (lambda_ > 0.0) s_ = std::min(s_, 1.0 / lambda_);
  }

  eta_ = -psi(t_);
  zeta_ = alpha_ * std::sinh(t_) + lambda_ * std::expm1(t_);
  theta_ = -psi(-s_);
  xi_ = alpha_ * std::sinh(s_) - lambda_ * std::expm1(-s_);
  pp_ = 1.0 / xi_;
  rr_ = 1.0 / zeta_;
  td_ = t_ - rr_ * eta_;
  sd_ = s_ - pp_ * theta_;
  q_ = td_ + sd_;
}

double GigSampler::psi(double x) const {
  return -alpha_ * (std::cosh(x) - 1.0) - lambda_ * (std::expm1(x) - x);
}

double GigSampler::operator()(Rng& rng) const {
  const double total = pp_ + q_ + rr_;
  for (;;) {
    const double u = uniform_open(rng);
    const double v = uniform_open(rng);
    const double w = uniform_open(rng);
    double x;
    if (u < q_ / total)
      x = -sd_ + q_ * v;
    else if (u < (q_ + rr_) / total)
      x = td_ - rr_ * std::log(v);
    else
      x = -sd_ + pp_ * std::log(v);

    double chi = 1.0;
    if (x > td_)
      chi = std::exp(-eta_ - zeta_ * (x - t_));
    else if (x < -sd_)
      chi = std::exp(-theta_ + xi_ * (x + s_));
    if (w * chi <= std::exp(psi(x))) {
      const double y = mode_shift_ * std::exp(x);
      return p_ >= 0.0 ? scale_ * y : scale_ / y;
    }
  }
}

}  // namespace gigp
