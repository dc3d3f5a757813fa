#include "zobcd/estimator.hpp"

#include <cmath>
#include <string>

namespace zobcd {

void EstimatorConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("query radius must be positive");
  cosamp.validate();
}

BlockMeasurements measure_block(Oracle& oracle, std::span<const double> x, const BlockPartition& p,
                                std::size_t j, const SampleEnsemble& z, double delta,
                                ComputeClock* clock) {
  if (x.size() != p.dim()) throw ContractError("measure_block: dimension mismatch");
  const auto idx = p.block(j);
  if (z.cols() != idx.size()) {
    throw ContractError("measure_block: ensemble has " + std::to_string(z.cols()) +
                        " columns but block " + std::to_string(j) + " has " +
                        std::to_string(idx.size()) + " coordinates");
  }
  const std::size_t m = z.rows();
  BlockMeasurements out{Vector(m), 0.0};
  Vector values(m);
  {
    PauseClock pause(clock);
    const std::uint64_t first = oracle.reserve(m + 1);
    out.base_value = oracle.eval_at(x, first);
    if (!std::isfinite(out.base_value)) {
      throw NumericalError("oracle returned a non-finite base value (query " +
                           std::to_string(first) + ")");
    }
    Vector point(x.begin(), x.end());
    Vector dir(idx.size());
    for (std::size_t i = 0; i < m; ++i) {
      z.direction(i, dir);
      for (std::size_t k = 0; k < idx.size(); ++k) point[idx[k]] = x[idx[k]] + delta * dir[k];
      values[i] = oracle.eval_at(point, first + 1 + i);
      if (!std::isfinite(values[i])) {
        throw NumericalError("oracle returned a non-finite value for direction " +
                             std::to_string(i) + " (query " + std::to_string(first + 1 + i) + ")");
      }
      for (auto k : idx) point[k] = x[k];
    }
  }
  const double denom = std::sqrt(static_cast<double>(m)) * delta;
  for (std::size_t i = 0; i < m; ++i) out.y[i] = (values[i] - out.base_value) / denom;
  return out;
}

BlockGradientEstimate estimate_block_gradient(Oracle& oracle, std::span<const double> x,
                                              const BlockPartition& p, std::size_t j,
                                              const SampleEnsemble& z, const EstimatorConfig& cfg,
                                              ComputeClock* clock) {
  cfg.validate();
  if (cfg.cosamp.s > z.cols()) {
    throw ConfigError("block sparsity " + std::to_string(cfg.cosamp.s) + " exceeds block size " +
                      std::to_string(z.cols()));
  }
  auto meas = measure_block(oracle, x, p, j, z, cfg.delta, clock);
  return {cosamp(z, meas.y, cfg.cosamp), meas.base_value};
}

double theoretical_radius(double sigma, std::optional<double> curvature, double fallback) {
  if (!(sigma >= 0.0)) throw ConfigError("noise level must be non-negative");
  if (sigma == 0.0 || !curvature) return fallback;
  if (!(*curvature > 0.0)) throw ConfigError("curvature bound H must be positive");
  return 2.0 * std::sqrt(sigma / *curvature);
}

}  // namespace zobcd
