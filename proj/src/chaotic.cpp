#include "gigp/chaotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gigp/diagram.hpp"
#include "gigp/error.hpp"
#include "gigp/parallel.hpp"
#include "gigp/random.hpp"
#include "gigp/specfun.hpp"

namespace gigp {

namespace {

void check_common(std::int64_t M, double A) {
  if (M <= 0) throw ValidationError("M must be positive");
  if (!(A > 0.0)) throw DomainError("A must be positive");
}

}  // namespace

PoissonApprox poisson_rate(const GigpDistribution& dist, std::int64_t M, double A, double x) {
  check_common(M, A);
  if (!(x > 0.0)) throw DomainError("poisson_rate: requires x > 0");
  const double sf = dist.ccdf(to_items(A, x));
  const double m = static_cast<double>(M);
  return {m * sf, m * sf * sf, x};
}

PoissonApprox poisson_rate(const GigpParams& params, std::int64_t M, double A, double x) {
  return poisson_rate(GigpDistribution(params), M, A, x);
}

std::vector<double> increment_rates(const GigpDistribution& dist, std::int64_t M, double A,
                                    std::span<const double> xs) {
  check_common(M, A);
  if (xs.empty()) throw ValidationError("increment_rates: no cut points");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw DomainError("increment_rates: cut points must be positive");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw ValidationError("increment_rates: cut points must be strictly increasing");
  }
  const double m = static_cast<double>(M);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double hi = i + 1 < xs.size() ? dist.ccdf(to_items(A, xs[i + 1])) : 0.0;
    out[i] = std::max(0.0, m * (dist.ccdf(to_items(A, xs[i])) - hi));
  }
  return out;
}

std::vector<double> increment_rates(const GigpParams& params, std::int64_t M, double A, std::span<const double> xs) {
  return increment_rates(GigpDistribution(params), M, A, xs);
}

double integrated_rate(const GigpDistribution& dist, std::int64_t M, double A, double t) {
  check_common(M, A);
  if (!(t > 0.0)) throw DomainError("integrated_rate: requires t > 0");
  return static_cast<double>(M) * dist.ccdf(to_items(A, 1.0 / t));
}

double integrated_rate(const GigpParams& params, std::int64_t M, double A, double t) {
  return integrated_rate(GigpDistribution(params), M, A, t);
}

PoissonExperiment poisson_gof_experiment(const GigpParams& params, std::int64_t M, double x0, int replicates,
                                         std::uint64_t seed, RateMode mode, double threshold, double min_expected) {
  if (replicates < 1) throw ValidationError("poisson_gof_experiment: replicates must be positive");
  if (!(x0 > 0.0)) throw DomainError("poisson_gof_experiment: requires x0 > 0");
  const GigpDistribution dist(params);
  PoissonExperiment out;
  out.pair = scaling_b(dist.params(), M);
  out.regime_warning = classify_regime(out.pair, threshold) == Regime::regular;
  const double items = to_items(out.pair.A, x0);
  out.model_lambda = poisson_rate(dist, M, out.pair.A, x0).lambda;

  const auto n = static_cast<std::size_t>(replicates);
  out.y_values.assign(n, 0);
  parallel_for(n, [&](std::size_t r) {
    out.y_values[r] = young_y(dist.sample(replicate_seed(seed, r), M), items);
  });

  double sum = 0.0;
  std::int64_t kmax = 0;
  for (auto y : out.y_values) {
    sum += static_cast<double>(y);
    kmax = std::max(kmax, y);
  }
  const double reps = static_cast<double>(replicates);
  out.replicate_mean = sum / reps;
  double ss = 0.0;
  for (auto y : out.y_values) ss += (static_cast<double>(y) - out.replicate_mean) * (static_cast<double>(y) - out.replicate_mean);
  out.replicate_variance = replicates > 1 ? ss / (reps - 1.0) : 0.0;

  out.lambda = mode == RateMode::specified ? out.model_lambda : out.replicate_mean;
  if (!(out.lambda > 0.0)) throw InsufficientDataError("poisson_gof_experiment: Poisson rate is zero");

  // Cells 0..K-1 and ">= K".
  const auto cells = static_cast<std::size_t>(kmax) + 1;
  std::vector<double> observed(cells, 0.0), expected(cells, 0.0);
  for (auto y : out.y_values) observed[static_cast<std::size_t>(y)] += 1.0;
  double below = 0.0;
  for (std::size_t k = 0; k + 1 < cells; ++k) {
    const double kd = static_cast<double>(k);
    const double p = std::exp(kd * std::log(out.lambda) - out.lambda - log_gamma(kd + 1.0));
    expected[k] = reps * p;
    below += p;
  }
  expected[cells - 1] = reps * std::max(0.0, 1.0 - below);
  if (cells == 1) expected[0] = reps;
  if (!(expected.back() > 0.0)) expected.back() = std::numeric_limits<double>::min();
  out.gof = pearson_chi2(observed, expected, mode == RateMode::estimated ? 1 : 0, min_expected);
  return out;
}

}  // namespace gigp
