#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gigp/frequency_table.hpp"
#include "gigp/model.hpp"

namespace gigp {

// Parameter case that determines the y-scaling B:
// a: nu > 0; b: nu = 0; c: -1 <= nu < 0, alpha > 0; d: -1 < nu < 0, alpha = 0.
enum class ScalingCase { a, b, c, d };
char case_letter(ScalingCase c);

struct ScalingPair {
  double A;
  double B;
  ScalingCase label;
};

double scaling_a(double theta);
ScalingPair scaling_b(const GigpParams& params, std::int64_t M);

enum class Regime { regular, chaotic };
const char* regime_name(Regime r);

inline constexpr double kDefaultRegimeThreshold = 50.0;

// Regular iff B >= threshold.
Regime classify_regime(const ScalingPair& pair, double threshold = kDefaultRegimeThreshold);

struct ShapePoint {
  double x;
  double y_scaled;                // scaled diagram at x
  double phi;                     // limit shape at x
  std::optional<double> upsilon;  // needs a model
  std::optional<double> mse;      // E (scaled diagram - phi)^2 under the model
};

struct ShapeReport {
  double delta = 0.0;
  double sup_distance = 0.0;
  double sup_at = 0.0;  // x where the supremum is attained (as a one-sided limit)
  std::vector<ShapePoint> pointwise;
  std::optional<double> max_mse;
};

// Exact sup_{x >= delta} |Y(A x)/B - phi_nu(x)|, evaluated at delta and on
// both sides of every jump of the scaled diagram.
ShapeReport sup_distance(const FrequencyTable& table, const ScalingPair& pair, double nu, double delta);

// Same, with Upsilon and the mean squared deviation filled from a model.
ShapeReport sup_distance(const FrequencyTable& table, const ScalingPair& pair, const GigpDistribution& model,
                         double delta);

// Upsilon(x) = sqrt(B / phi(x)) (Y(A x)/B - M Fbar(A x)/B).
double upsilon(const FrequencyTable& table, const GigpDistribution& dist, std::int64_t M, const ScalingPair& pair,
               double x);
double upsilon(const FrequencyTable& table, const GigpParams& params, std::int64_t M, const ScalingPair& pair,
               double x);

// Limit covariance sqrt(phi(x2) / phi(x)) for x <= x2.
double limit_cov(double nu, double x, double x2);

// (x, y) -> (log x, log y + x).
std::vector<std::pair<double, double>> tail_transform(std::span<const std::pair<double, double>> points);

// max over x in [x_lo, x_hi] of |M Fbar(A x)/B - phi_nu(x)|, exact over the
// steps of Fbar.
double expected_shape_distance(const GigpDistribution& dist, const ScalingPair& pair, std::int64_t M, double x_lo,
                               double x_hi);

}  // namespace gigp
