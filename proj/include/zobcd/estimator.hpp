#pragma once

#include <optional>
#include <span>

#include "zobcd/blocks.hpp"
#include "zobcd/core.hpp"
#include "zobcd/sampling.hpp"
#include "zobcd/sparse_recovery.hpp"

namespace zobcd {

struct EstimatorConfig {
  double delta = 1e-2;  // query radius
  CosampConfig cosamp;  // cosamp.s is the block sparsity target

  void validate() const;
};

/// Finite-difference measurements of one block gradient.
struct BlockMeasurements {
  Vector y;           // y_i = (E_f(x + delta U z_i) - E_f(x)) / (sqrt(m) delta)
  double base_value;  // E_f(x)
};

struct BlockGradientEstimate {
  SparseVector gradient;  // in block coordinates
  double base_value;
};

/// Issues exactly rows(z) + 1 oracle queries. The query indices are reserved up
/// front, so the assembled measurements do not depend on evaluation order.
/// `clock`, if given, is paused while queries are built and evaluated.
BlockMeasurements measure_block(Oracle& oracle, std::span<const double> x, const BlockPartition& p,
                                std::size_t j, const SampleEnsemble& z, double delta,
                                ComputeClock* clock = nullptr);

/// Measurements followed by CoSaMP recovery of the block gradient.
BlockGradientEstimate estimate_block_gradient(Oracle& oracle, std::span<const double> x,
                                              const BlockPartition& p, std::size_t j,
                                              const SampleEnsemble& z, const EstimatorConfig& cfg,
                                              ComputeClock* clock = nullptr);

/// delta = 2 sqrt(sigma / H); `fallback` when sigma == 0 or H is unknown.
double theoretical_radius(double sigma, std::optional<double> curvature, double fallback = 1e-2);

}  // namespace zobcd
