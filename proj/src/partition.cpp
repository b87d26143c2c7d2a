#include "gigp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gigp/diagram.hpp"
#include "gigp/error.hpp"
#include "gigp/random.hpp"

namespace gigp {

double partition_kappa() { return std::numbers::pi / std::sqrt(6.0); }

PartitionConfig calibrate(std::int64_t n) {
  if (n < 1) throw ValidationError("calibrate: n must be at least 1");
  PartitionConfig c;
  c.n = n;
  c.kappa = partition_kappa();
  const double log_z = -c.kappa / std::sqrt(static_cast<double>(n));
  c.z = std::exp(log_z);
  // z^(J+1) / (1 - z) < 1e-12.
  const double need = std::log(1e-12) + std::log(-std::expm1(log_z));
  c.j_cutoff = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(need / log_z)) - 1);
  while (static_cast<double>(c.j_cutoff + 1) * log_z >= need) ++c.j_cutoff;
  return c;
}

FrequencyTable sample_partition(const PartitionConfig& config, std::uint64_t seed) {
  if (!(config.z > 0.0 && config.z < 1.0)) throw ValidationError("sample_partition: z must lie in (0, 1)");
  Rng rng(seed);
  const double log_z = std::log(config.z);
  std::vector<FrequencyTable::Entry> entries;
  for (std::int64_t j = 1; j <= config.j_cutoff; ++j) {
    std::geometric_distribution<std::int64_t> geom(-std::expm1(static_cast<double>(j) * log_z));
    const std::int64_t m = geom(rng);
    if (m > 0) entries.push_back({j, m});
  }
  return FrequencyTable(std::move(entries));
}

double partition_shape(double x) {
  if (!(x > 0.0)) throw DomainError("partition_shape: requires x > 0");
  const double k = partition_kappa();
  return -std::log(-std::expm1(-k * x)) / k;
}

double expected_parts(const PartitionConfig& config) {
  const double log_z = std::log(config.z);
  double s = 0.0;
  for (std::int64_t j = config.j_cutoff; j >= 1; --j) s += 1.0 / std::expm1(-static_cast<double>(j) * log_z);
  return s;
}

double expected_weight(const PartitionConfig& config) {
  const double log_z = std::log(config.z);
  double s = 0.0;
  for (std::int64_t j = config.j_cutoff; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    s += jd / std::expm1(-jd * log_z);
  }
  return s;
}

double asymptotic_parts(std::int64_t n) {
  if (n < 1) throw ValidationError("asymptotic_parts: n must be at least 1");
  const double nd = static_cast<double>(n);
  return std::sqrt(6.0 * nd) * std::log(nd) / (2.0 * std::numbers::pi);
}

double partition_sup_distance(const FrequencyTable& table, std::int64_t n, double x_lo) {
  if (n < 1) throw ValidationError("partition_sup_distance: n must be at least 1");
  if (!(x_lo > 0.0)) throw DomainError("partition_sup_distance: requires x_lo > 0");
  const double s = std::sqrt(static_cast<double>(n));
  const YoungBoundary y(table);
  const double lo_items = to_items(s, x_lo);
  double sup = std::abs(static_cast<double>(y(lo_items)) / s - partition_shape(x_lo));
  for (std::size_t i = 0; i < y.support().size(); ++i) {
    const double j = static_cast<double>(y.support()[i]);
    if (j < lo_items) continue;
    const double shape = partition_shape(j / s);
    sup = std::max(sup, std::abs(static_cast<double>(y.value_at(i)) / s - shape));
    sup = std::max(sup, std::abs(static_cast<double>(y.value_after(i)) / s - shape));
  }
  return sup;
}

}  // namespace gigp
