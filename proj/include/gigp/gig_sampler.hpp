#pragma once

#include "gigp/random.hpp"

namespace gigp {

// Generalized inverse Gaussian variates with density proportional to
// x^(p-1) exp(-(a x + b / x) / 2), a > 0, b > 0.
//
// Devroye's (2014) rejection method on the log scale for the standardized
// law GIG(|p|, omega = sqrt(a b)), then rescaled by sqrt(b / a) and inverted
// for p < 0. Setup is done once; operator() is const and thread-compatible.
class GigSampler {
 public:
  GigSampler(double p, double a, double b);
  double operator()(Rng& rng) const;

 private:
  double psi(double x) const;

  double p_;
  double lambda_;  // |p|
  double omega_;
  double alpha_;
  double scale_;
  double mode_shift_;
  double t_, s_;
  double eta_, zeta_, theta_, xi_;
  double pp_, rr_, td_, sd_, q_;
};

}  // namespace gigp
