#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "zobcd/blocks.hpp"
#include "zobcd/core.hpp"
#include "zobcd/estimator.hpp"
#include "zobcd/sampling.hpp"

namespace zobcd {

enum class Variant {
  r,   ///< dense Rademacher directions
  rc,  ///< partial circulant directions
};

struct ZobcdConfig {
  Variant variant = Variant::r;
  std::size_t d = 0;
  std::size_t num_blocks = 1;
  std::size_t s = 1;  ///< user's upper estimate of the gradient sparsity
  double alpha = 0.9;
  double delta = 1e-2;
  double b1 = 2.0;
  double b3 = 0.01;
  /// s_block = ceil(sparsity_factor * s / J).
  double sparsity_factor = 1.1;
  std::size_t n_cosamp = 10;
  std::size_t lsq_max_iters = 20;
  double lsq_tol = 1e-8;
  std::uint64_t budget = 1;
  std::optional<double> target;
  std::optional<std::size_t> reshuffle_period;
  std::uint64_t seed = 0;
  bool record_timing = true;

  void validate() const;
  std::size_t block_sparsity() const;
  EnsembleKind ensemble_kind() const noexcept;
  /// Rows m of the sampling ensemble; one iteration issues m + 1 queries.
  std::size_t rows_per_iteration() const;
};

enum class Termination { budget_exhausted, target_reached, numerical_failure };

std::string_view termination_name(Termination t) noexcept;

struct RunResult {
  Vector x_final;
  ConvergenceTrace trace;
  Termination termination = Termination::budget_exhausted;
  std::string message;
  std::size_t iterations = 0;
  std::size_t rows_per_iteration = 0;
};

/// Noiseless evaluator used only for reporting; never counted as a query.
using Reporter = std::function<double(std::span<const double>)>;

struct IterationInfo {
  std::size_t iteration;  // 1-based
  std::size_t block;
  const BlockPartition& partition;
  std::span<const double> x_before;
  std::span<const double> x_after;
};

using IterationObserver = std::function<void(const IterationInfo&)>;

/// Block coordinate descent with compressed-sensing block gradient estimates.
///
/// Setup draws a random partition and one sampling ensemble (Rademacher or
/// partial circulant) that is reused for every block and iteration. Each
/// iteration picks a block uniformly, estimates its gradient from m + 1
/// queries and takes x <- x - alpha * U^(j) g_hat.
///
/// An iteration starts whenever fewer than `budget` queries have been used, so
/// the total can exceed the budget by at most m + 1. Trace values come from
/// `report` when given; otherwise from the noisy base query of each iteration
/// (the value at the iterate *before* the step), and one extra query is spent
/// on the initial record.
RunResult run_zobcd(Oracle& oracle, std::span<const double> x0, const ZobcdConfig& cfg,
                    const Reporter& report = {}, const IterationObserver& observer = {});

/// x - alpha * U^(j) g_hat.
Vector step(std::span<const double> x, const SparseVector& g_hat, double alpha,
            const BlockPartition& p, std::size_t j);

/// 1 / L_max.
double theoretical_step_size(double l_max);

/// Inexactness constants of one block step and the admissibility quantity
/// eta^2 + 4 theta / c1 = 4 rho^{4n} + 16 tau^2 sigma H / (c1 L_max), which
/// must stay below 1 for the sublinear rate to apply.
struct InexactnessConstants {
  double eta;
  double theta;
  double admissibility;
  bool admissible;
};

InexactnessConstants inexactness_constants(double rho, double tau, std::size_t n_cosamp,
                                           double sigma, double curvature, double l_max,
                                           double c1);

/// c1 = 2 J L_max R^2(x0).
double level_set_constant(std::size_t num_blocks, double l_max, double radius);

}  // namespace zobcd
