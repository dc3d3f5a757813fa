#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "zobcd/optimizer.hpp"

namespace zobcd {

enum class BaselineMethod { fdsa, spsa, zoscd };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::spsa;
  double alpha = 0.01;
  double delta = 1e-2;
  std::uint64_t budget = 1;
  std::optional<double> target;
  std::uint64_t seed = 0;
  bool record_timing = true;

  void validate() const;
};

// All three follow run_zobcd's conventions for budgets, traces and reporting.

/// Forward differences on every coordinate (d + 1 queries per iteration).
RunResult run_fdsa(Oracle& oracle, std::span<const double> x0, const BaselineConfig& cfg,
                   const Reporter& report = {});

/// One Rademacher direction per iteration, central difference (2 queries).
RunResult run_spsa(Oracle& oracle, std::span<const double> x0, const BaselineConfig& cfg,
                   const Reporter& report = {});

/// One uniformly chosen coordinate per iteration, forward difference (2 queries).
RunResult run_zoscd(Oracle& oracle, std::span<const double> x0, const BaselineConfig& cfg,
                    const Reporter& report = {});

RunResult run_baseline(Oracle& oracle, std::span<const double> x0, const BaselineConfig& cfg,
                       const Reporter& report = {});

}  // namespace zobcd
