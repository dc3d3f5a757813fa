#include "zobcd/optimizer.hpp"

#include <cmath>
#include <string>

namespace zobcd {

void ZobcdConfig::validate() const {
  if (d == 0) throw ConfigError("dimension must be positive");
  if (num_blocks == 0 || num_blocks > d) throw ConfigError("number of blocks must lie in [1, d]");
  if (s == 0) throw ConfigError("sparsity must be at least 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("step size must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("query radius must be positive");
  if (budget == 0) throw ConfigError("query budget must be at least 1");
  if (n_cosamp == 0) throw ConfigError("CoSaMP needs at least one iteration");
  if (reshuffle_period && *reshuffle_period == 0) {
    throw ConfigError("reshuffle period must be at least 1");
  }
  const std::size_t smallest = d / num_blocks;
  if (block_sparsity() > smallest) {
    throw ConfigError("block sparsity " + std::to_string(block_sparsity()) +
                      " exceeds the smallest block size " + std::to_string(smallest));
  }
}

std::size_t ZobcdConfig::block_sparsity() const {
  return zobcd::block_sparsity(s, num_blocks, sparsity_factor);
}

EnsembleKind ZobcdConfig::ensemble_kind() const noexcept {
  return variant == Variant::r ? EnsembleKind::dense_rademacher : EnsembleKind::partial_circulant;
}

std::size_t ZobcdConfig::rows_per_iteration() const {
  const std::size_t n_max = (d + num_blocks - 1) / num_blocks;
  return required_rows(ensemble_kind(), block_sparsity(), n_max, b1, b3);
}

std::string_view termination_name(Termination t) noexcept {
  switch (t) {
    case Termination::budget_exhausted: return "budget_exhausted";
    case Termination::target_reached: return "target_reached";
    case Termination::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

RunResult run_zobcd(Oracle& oracle, std::span<const double> x0, const ZobcdConfig& cfg,
                    const Reporter& report, const IterationObserver& observer) {
  cfg.validate();
  if (x0.size() != cfg.d) throw ContractError("initial point has the wrong dimension");
  if (oracle.dim() != cfg.d) throw ContractError("oracle dimension differs from configuration");
  if (!all_finite(x0)) throw ContractError("initial point must be finite");

  const RngStreams streams(cfg.seed);
  Prng partition_rng = streams.substream(Stream::partition);
  Prng direction_rng = streams.substream(Stream::directions);
  Prng omega_rng = streams.substream(Stream::omega);
  Prng block_rng = streams.substream(Stream::block_choice);

  BlockPartition partition = random_partition(cfg.d, cfg.num_blocks, partition_rng);
  const std::size_t n_max = partition.max_block_size();
  const std::size_t m = cfg.rows_per_iteration();
  SampleEnsemble master = cfg.variant == Variant::r
                              ? SampleEnsemble::rademacher(m, n_max, direction_rng)
                              : SampleEnsemble::partial_circulant(m, n_max, direction_rng, omega_rng);

  EstimatorConfig est;
  est.delta = cfg.delta;
  est.cosamp.s = cfg.block_sparsity();
  est.cosamp.n_iters = cfg.n_cosamp;
  est.cosamp.lsq_max_iters = cfg.lsq_max_iters;
  est.cosamp.lsq_tol = cfg.lsq_tol;
  est.cosamp.quiet = true;
  if (3 * est.cosamp.s > m) {
    warn(std::to_string(m) + " rows per iteration for block sparsity " + std::to_string(est.cosamp.s) +
         "; CoSaMP least-squares fits will be underdetermined");
  }

  RunResult result;
  result.rows_per_iteration = m;
  Vector x(x0.begin(), x0.end());
  Vector previous;

  const std::uint64_t start = oracle.query_count();
  auto used = [&] { return oracle.query_count() - start; };

  const double f0 = report ? report(x) : oracle.eval(x);
  result.trace.append({0, used(), f0, 0});
  if (cfg.target && f0 <= *cfg.target) {
    result.termination = Termination::target_reached;
    result.x_final = std::move(x);
    return result;
  }

  result.termination = Termination::budget_exhausted;
  ComputeClock clock(cfg.record_timing);
  std::size_t k = 0;
  while (used() < cfg.budget) {
    clock.reset();
    clock.start();
    const std::size_t j = block_rng.below(cfg.num_blocks);
    const SampleEnsemble z = master.truncated(partition.block_size(j));
    BlockGradientEstimate g;
    try {
      g = estimate_block_gradient(oracle, x, partition, j, z, est, &clock);
    } catch (const NumericalError& e) {
      clock.stop();
      result.termination = Termination::numerical_failure;
      result.message = "iteration " + std::to_string(k + 1) + ": " + e.what();
      break;
    }
    if (observer) previous = x;
    add_lifted(x, g.gradient, partition, j, -cfg.alpha);
    ++k;
    if (!all_finite(x)) {
      clock.stop();
      result.termination = Termination::numerical_failure;
      result.message = "iteration " + std::to_string(k) + ": iterate became non-finite";
      break;
    }
    if (observer) observer({k, j, partition, previous, x});

    if (cfg.reshuffle_period && k % *cfg.reshuffle_period == 0) {
      partition = reshuffle_if_due(partition, k, cfg.reshuffle_period, partition_rng);
      if (cfg.variant == Variant::rc) {
        master = master.with_rows(random_row_set(m, n_max, omega_rng));
      }
    }
    clock.stop();

    const double f = report ? report(x) : g.base_value;
    if (!std::isfinite(f)) {
      result.termination = Termination::numerical_failure;
      result.message = "iteration " + std::to_string(k) + ": non-finite objective value";
      break;
    }
    result.trace.append({k, used(), f, clock.nanos()});
    if (cfg.target && f <= *cfg.target) {
      result.termination = Termination::target_reached;
      break;
    }
  }
  result.iterations = k;
  result.x_final = std::move(x);
  return result;
}

Vector step(std::span<const double> x, const SparseVector& g_hat, double alpha,
            const BlockPartition& p, std::size_t j) {
  Vector out(x.begin(), x.end());
  add_lifted(out, g_hat, p, j, -alpha);
  return out;
}

double theoretical_step_size(double l_max) {
  if (!(l_max > 0.0)) throw ConfigError("L_max must be positive");
  return 1.0 / l_max;
}

InexactnessConstants inexactness_constants(double rho, double tau, std::size_t n_cosamp,
                                           double sigma, double curvature, double l_max,
                                           double c1) {
  if (!(l_max > 0.0) || !(c1 > 0.0)) throw ConfigError("L_max and c1 must be positive");
  const double eta = 2.0 * std::pow(rho, 2.0 * static_cast<double>(n_cosamp));
  const double theta = 4.0 * tau * tau * sigma * curvature / l_max;
  const double lhs = eta * eta + 4.0 * theta / c1;
  return {eta, theta, lhs, lhs < 1.0};
}

double level_set_constant(std::size_t num_blocks, double l_max, double radius) {
  return 2.0 * static_cast<double>(num_blocks) * l_max * radius * radius;
}

}  // namespace zobcd
