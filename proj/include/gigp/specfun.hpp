#pragma once

namespace gigp {

// ln K_nu(z), modified Bessel function of the second kind, real order.
// Evaluated at |nu|, so the result is bit-identical for nu and -nu.
double log_bessel_k(double nu, double z);

// K_{nu+1}(z) / K_nu(z).
double bessel_k_ratio(double nu, double z);

// One step of the upward order recurrence on ratios:
// given K_order(z)/K_{order-1}(z), returns K_{order+1}(z)/K_order(z).
inline double bessel_k_ratio_step(double order, double z, double prev_ratio) {
  return 2.0 * order / z + 1.0 / prev_ratio;
}

// ln Gamma(x) for x > 0 (reentrant).
double log_gamma(double x);

// phi_nu(x) = int_x^inf s^(nu-1) e^(-s) ds for nu >= -1.
double upper_incomplete_gamma(double nu, double x);

// Q(a, x) = Gamma(a, x) / Gamma(a) for a > 0.
double regularized_upper_gamma(double a, double x);

double normal_cdf(double x);

// P(chi^2_df >= stat).
double chi2_sf(double stat, int df);

}  // namespace gigp
