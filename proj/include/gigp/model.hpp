#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gigp/frequency_table.hpp"
#include "gigp/gig_sampler.hpp"
#include "gigp/random.hpp"

namespace gigp {

struct GigpParams {
  double nu = 0.0;
  double alpha = 0.0;
  double theta = 0.5;
  bool zero_truncated = false;
};

// Throws ValidationError outside the supported domain:
// nu >= -1, alpha >= 0, 0 < theta < 1, (nu, alpha) != (-1, 0), and
// alpha = 0 with nu <= 0 only under zero truncation.
GigpParams validate(const GigpParams& params);

// Tabulated GIGP law. The pmf is evaluated once, in log space, up to a cutoff
// beyond which the remaining mass is below 1e-16.
class GigpDistribution {
 public:
  explicit GigpDistribution(const GigpParams& params);

  const GigpParams& params() const { return params_; }
  std::int64_t min_support() const { return first_; }
  // One past the last tabulated value.
  std::int64_t table_end() const { return first_ + static_cast<std::int64_t>(log_pmf_.size()); }

  double pmf(std::int64_t j) const;
  double log_pmf(std::int64_t j) const;
  // P(X >= x) and P(X < x).
  double ccdf(double x) const;
  double cdf(double x) const;
  double mean() const { return mean_; }
  // P(X = 0) before zero truncation; NaN for the alpha = 0, nu <= 0
  // families, which exist only in truncated form.
  double untruncated_zero_mass() const { return f0_; }

  std::int64_t draw(Rng& rng) const;
  std::vector<std::int64_t> sample_values(std::uint64_t seed, std::int64_t count) const;
  FrequencyTable sample(std::uint64_t seed, std::int64_t count) const;

 private:
  std::int64_t inverse_cdf(double u) const;
  std::int64_t draw_mixture(Rng& rng) const;
  std::size_t index_of(double x) const;

  GigpParams params_;
  std::int64_t first_ = 0;
  std::vector<double> log_pmf_;
  std::vector<double> prefix_;  // prefix_[i] = sum of pmf over indices < i
  std::vector<double> suffix_;  // suffix_[i] = sum of pmf over indices >= i
  double last_ratio_ = 0.0;     // K ratio at the last tabulated order (alpha > 0)
  double f0_ = 0.0;
  double log_norm_ = 0.0;       // subtracted under truncation with alpha > 0
  double mean_ = 0.0;
  std::optional<GigSampler> gig_;
};

double pmf(const GigpParams& params, std::int64_t j);
double ccdf(const GigpParams& params, double x);

double mean_exact(const GigpParams& params);

// Leading-order mean as theta -> 1. Also accepts nu < -1 with alpha > 0.
double mean_asymptotic(const GigpParams& params);

// Solves mean_exact(nu, alpha, theta) = eta_target for theta. By default the
// truncation flag is set when alpha = 0 and nu <= 0 (the only valid choice).
double theta_from_mean(double nu, double alpha, double eta_target, std::optional<bool> zero_truncated = {});

// Mixing density g(lambda) of the Poisson rate.
double gig_density(const GigpParams& params, double lambda);

FrequencyTable sample(const GigpParams& params, std::uint64_t seed, std::int64_t count);

// Leading tail term c j^(nu-1) theta^j.
double tail_pmf_asymptotic(const GigpParams& params, std::int64_t j);

}  // namespace gigp
