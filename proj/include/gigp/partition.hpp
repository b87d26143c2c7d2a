#pragma once

#include <cstdint>

#include "gigp/frequency_table.hpp"

namespace gigp {

// Boltzmann model of integer partitions: independent multiplicities
// M_j ~ Geom(1 - z^j), z = exp(-kappa / sqrt(n)).
struct PartitionConfig {
  std::int64_t n;
  double z;
  double kappa;
  std::int64_t j_cutoff;  // sum_{j > j_cutoff} z^j < 1e-12
};

double partition_kappa();  // pi / sqrt(6)

PartitionConfig calibrate(std::int64_t n);

// Table of part sizes j with multiplicities M_j.
FrequencyTable sample_partition(const PartitionConfig& config, std::uint64_t seed);

// Limit shape y with exp(-kappa x) + exp(-kappa y) = 1.
double partition_shape(double x);

// E(number of parts) = sum z^j / (1 - z^j) and E(weight) = sum j z^j / (1 - z^j).
double expected_parts(const PartitionConfig& config);
double expected_weight(const PartitionConfig& config);

// Leading growth sqrt(6 n) log(n) / (2 pi) of the expected number of parts.
double asymptotic_parts(std::int64_t n);

// sup_{x >= x_lo} |Y(sqrt(n) x) / sqrt(n) - partition_shape(x)|, exact over
// the jumps of the scaled diagram.
double partition_sup_distance(const FrequencyTable& table, std::int64_t n, double x_lo);

}  // namespace gigp
