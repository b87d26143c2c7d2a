#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gigp/fitgof.hpp"
#include "gigp/model.hpp"
#include "gigp/shape.hpp"

namespace gigp {

// Poisson approximation of Y(A x) when B stays bounded.
struct PoissonApprox {
  double lambda;    // M Fbar(A x)
  double tv_bound;  // M Fbar(A x)^2 = lambda^2 / M
  double x;
};

PoissonApprox poisson_rate(const GigpDistribution& dist, std::int64_t M, double A, double x);
PoissonApprox poisson_rate(const GigpParams& params, std::int64_t M, double A, double x);

// M (Fbar(A x_i) - Fbar(A x_{i+1})) with x_{k+1} = infinity.
std::vector<double> increment_rates(const GigpDistribution& dist, std::int64_t M, double A,
                                    std::span<const double> xs);
std::vector<double> increment_rates(const GigpParams& params, std::int64_t M, double A, std::span<const double> xs);

// Lambda(t) = M Fbar(A / t) of the inverted-time counting process.
double integrated_rate(const GigpDistribution& dist, std::int64_t M, double A, double t);
double integrated_rate(const GigpParams& params, std::int64_t M, double A, double t);

enum class RateMode { specified, estimated };

struct PoissonExperiment {
  GofReport gof;
  double lambda;       // rate the chi-square was computed against
  double model_lambda; // M Fbar(A x0)
  double replicate_mean;
  double replicate_variance;
  std::vector<std::int64_t> y_values;  // Y(A x0) per replicate
  ScalingPair pair;
  bool regime_warning;  // B at or above the regular threshold
};

// Simulates `replicates` tables with seeds seed + r and tests Y(A x0) against
// Poisson(lambda). Cells are the values 0..K-1 plus an upper cell ">= K", K the
// largest observed value. In estimated mode lambda is the replicate mean and
// one degree of freedom is spent on it.
PoissonExperiment poisson_gof_experiment(const GigpParams& params, std::int64_t M, double x0, int replicates,
                                         std::uint64_t seed, RateMode mode = RateMode::specified,
                                         double threshold = kDefaultRegimeThreshold, double min_expected = 5.0);

}  // namespace gigp
