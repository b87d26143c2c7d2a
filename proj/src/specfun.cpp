#include "gigp/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "gigp/error.hpp"

namespace gigp {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEuler = 0.57721566490153286061;
constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

// Taylor coefficients of 1/Gamma(z) = sum c[k] z^k, k = 1..26.
constexpr std::array<double, 27> kRecipGamma = {
    0.0,
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
};

struct TemmeGammas {
  double gam1;   // (1/G(1-mu) - 1/G(1+mu)) / (2 mu)
  double gam2;   // (1/G(1-mu) + 1/G(1+mu)) / 2
  double gampl;  // 1/G(1+mu)
  double gammi;  // 1/G(1-mu)
};

// Valid for |mu| <= 1/2.
TemmeGammas temme_gammas(double mu) {
  const double m2 = mu * mu;
  double g1 = 0.0;
  double g2 = 0.0;
  for (int k = 26; k >= 2; k -= 2) g1 = g1 * m2 + kRecipGamma[k];
  for (int k = 25; k >= 1; k -= 2) g2 = g2 * m2 + kRecipGamma[k];
  g1 = -g1;
  return {g1, g2, g2 - mu * g1, g2 + mu * g1};
}

struct BaseK {
  double log_k;  // ln K_mu(z)
  double ratio;  // K_{mu+1}(z) / K_mu(z)
};

// Temme series, z <= 2, |mu| <= 1/2.
BaseK temme_series(double mu, double z) {
  const double x2 = 0.5 * z;
  const double pimu = kPi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  const double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  const double dd = x2 * x2;
  double sum1 = p;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu * mu);
    c *= dd / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - i * ff);
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  if (i > kMaxIter) throw NonConvergenceError("log_bessel_k: series did not converge");
  return {std::log(sum), sum1 * (2.0 / z) / sum};
}

// Steed's continued fraction, z > 2, |mu| <= 1/2.
BaseK steed_cf(double mu, double z) {
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= kMaxIter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxIter) throw NonConvergenceError("log_bessel_k: continued fraction did not converge");
  h *= a1;
  return {0.5 * std::log(kPi / (2.0 * z)) - z - std::log(s), (mu + z + 0.5 - h) / z};
}

BaseK base_k(double mu, double z) { return z <= 2.0 ? temme_series(mu, z) : steed_cf(mu, z); }

void check_args(double nu, double z, const char* who) {
  if (!std::isfinite(nu) || !std::isfinite(z)) throw DomainError(std::string(who) + ": non-finite argument");
  if (z <= 0.0) throw DomainError(std::string(who) + ": requires z > 0");
}

// Walks from the reduced order up to a >= 0; returns (ln K_a, K_{a+1}/K_a).
BaseK bessel_k_at(double a, double z) {
  const long nl = static_cast<long>(a + 0.5);
  const double mu = a - static_cast<double>(nl);
  BaseK b = base_k(mu, z);
  double log_k = b.log_k;
  double r = b.ratio;
  for (long i = 1; i <= nl; ++i) {
    log_k += std::log(r);
    r = bessel_k_ratio_step(mu + static_cast<double>(i), z, r);
  }
  return {log_k, r};
}

// sum_{n>=0} x^n / (a (a+1) ... (a+n))
double lower_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) return sum;
  }
  throw NonConvergenceError("incomplete gamma: series did not converge");
}

// Modified Lentz for the continued fraction of e^x x^-a Gamma(a, x).
double upper_cf(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) return h;
  }
  throw NonConvergenceError("incomplete gamma: continued fraction did not converge");
}

// (Gamma(1+nu) - 1) / nu
double gamma_shift_quotient(double nu) {
  if (std::abs(nu) < 1e-8) return -kEuler + (0.5 * kEuler * kEuler + kPi * kPi / 12.0) * nu;
  return std::expm1(log_gamma(1.0 + nu)) / nu;
}

// Gamma(nu, x) for |nu| < 1/2 and 0 < x < 1.
double small_x_series(double nu, double x) {
  const double lx = std::log(x);
  const double head = std::abs(nu) < 1e-300 ? lx : std::expm1(nu * lx) / nu;
  double term = 1.0;
  double tail = 0.0;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= -x / n;
    const double del = term / (nu + n);
    tail += del;
    if (std::abs(del) < 1e-17) break;
  }
  return gamma_shift_quotient(nu) - head - std::exp(nu * lx) * tail;
}

}  // namespace

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_bessel_k(double nu, double z) {
  check_args(nu, z, "log_bessel_k");
  return bessel_k_at(std::abs(nu), z).log_k;
}

double bessel_k_ratio(double nu, double z) {
  check_args(nu, z, "bessel_k_ratio");
  if (nu >= 0.0) return bessel_k_at(nu, z).ratio;
  // K_{nu+1}/K_nu = K_{-nu-1}/K_{-nu}
  if (nu <= -1.0) return 1.0 / bessel_k_at(-nu - 1.0, z).ratio;
  return std::exp(bessel_k_at(nu + 1.0, z).log_k - bessel_k_at(-nu, z).log_k);
}

double upper_incomplete_gamma(double nu, double x) {
  if (!std::isfinite(nu) || std::isnan(x)) throw DomainError("upper_incomplete_gamma: non-finite argument");
  if (nu < -1.0) throw DomainError("upper_incomplete_gamma: requires nu >= -1");
  if (x < 0.0) throw DomainError("upper_incomplete_gamma: requires x >= 0");
  if (x == 0.0) {
    if (nu > 0.0) return std::tgamma(nu);
    throw DomainError("upper_incomplete_gamma: x = 0 requires nu > 0");
  }
  if (std::isinf(x)) return 0.0;
  if (nu >= 0.5) {
    const double pre = std::exp(nu * std::log(x) - x);
    if (x < nu + 1.0) return std::tgamma(nu) - pre * lower_series(nu, x);
    return pre * upper_cf(nu, x);
  }
  if (x >= 1.0) return std::exp(nu * std::log(x) - x) * upper_cf(nu, x);
  if (nu > -0.5) return small_x_series(nu, x);
  return (upper_incomplete_gamma(nu + 1.0, x) - std::exp(nu * std::log(x) - x)) / nu;
}

double regularized_upper_gamma(double a, double x) {
  if (!(a > 0.0) || std::isnan(x)) throw DomainError("regularized_upper_gamma: requires a > 0");
  if (x < 0.0) throw DomainError("regularized_upper_gamma: requires x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_pre = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) return 1.0 - std::exp(log_pre) * lower_series(a, x);
  return std::exp(log_pre) * upper_cf(a, x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi2_sf(double stat, int df) {
  if (df < 1) throw DomainError("chi2_sf: requires df >= 1");
  if (!(stat >= 0.0)) throw DomainError("chi2_sf: requires stat >= 0");
  return regularized_upper_gamma(0.5 * df, 0.5 * stat);
}

}  // namespace gigp
