#include "zobcd/baselines.hpp"

#include <cmath>
#include <string>

namespace zobcd {

void BaselineConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("step size must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("sampling radius must be positive");
  if (budget == 0) throw ConfigError("query budget must be at least 1");
}

namespace {

void check_finite(double v, std::uint64_t query) {
  if (!std::isfinite(v)) {
    throw NumericalError("oracle returned a non-finite value (query " + std::to_string(query) + ")");
  }
}

/// Shared driver. `advance` updates x in place and returns a noisy estimate of
/// f at the pre-step iterate.
template <class Advance>
RunResult drive(Oracle& oracle, std::span<const double> x0, const BaselineConfig& cfg,
                const Reporter& report, Advance advance) {
  cfg.validate();
  if (x0.size() != oracle.dim()) throw ContractError("initial point has the wrong dimension");
  RunResult result;
  Vector x(x0.begin(), x0.end());
  const std::uint64_t start = oracle.query_count();
  auto used = [&] { return oracle.query_count() - start; };

  const double f0 = report ? report(x) : oracle.eval(x);
  result.trace.append({0, used(), f0, 0});
  if (cfg.target && f0 <= *cfg.target) {
    result.termination = Termination::target_reached;
    result.x_final = std::move(x);
    return result;
  }
  ComputeClock clock(cfg.record_timing);
  std::size_t k = 0;
  while (used() < cfg.budget) {
    clock.reset();
    clock.start();
    double noisy = 0.0;
    try {
      noisy = advance(x, clock);
    } catch (const NumericalError& e) {
      clock.stop();
      result.termination = Termination::numerical_failure;
      result.message = "iteration " + std::to_string(k + 1) + ": " + e.what();
      break;
    }
    clock.stop();
    ++k;
    const double f = report ? report(x) : noisy;
    if (!all_finite(x) || !std::isfinite(f)) {
      result.termination = Termination::numerical_failure;
      result.message = "iteration " + std::to_string(k) + ": iterate became non-finite";
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

}  // namespace

RunResult run_fdsa(Oracle& oracle, std::span<const double> x0, const BaselineConfig& cfg,
                   const Reporter& report) {
  const std::size_t d = x0.size();
  Vector grad(d);
  return drive(oracle, x0, cfg, report, [&](Vector& x, ComputeClock& clock) {
    double base = 0.0;
    {
      PauseClock pause(&clock);
      const std::uint64_t first = oracle.reserve(d + 1);
      base = oracle.eval_at(x, first);
      check_finite(base, first);
      for (std::size_t i = 0; i < d; ++i) {
        const double saved = x[i];
        x[i] = saved + cfg.delta;
        const double v = oracle.eval_at(x, first + 1 + i);
        x[i] = saved;
        check_finite(v, first + 1 + i);
        grad[i] = v;
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      x[i] -= cfg.alpha * (grad[i] - base) / cfg.delta;
    }
    return base;
  });
}

RunResult run_spsa(Oracle& oracle, std::span<const double> x0, const BaselineConfig& cfg,
                   const Reporter& report) {
  const std::size_t d = x0.size();
  Prng rng = RngStreams(cfg.seed).substream(Stream::directions);
  Vector dir(d);
  Vector point(d);
  return drive(oracle, x0, cfg, report, [&](Vector& x, ComputeClock& clock) {
    for (auto& z : dir) z = rng.rademacher();
    double plus = 0.0;
    double minus = 0.0;
    {
      PauseClock pause(&clock);
      const std::uint64_t first = oracle.reserve(2);
      for (std::size_t i = 0; i < d; ++i) point[i] = x[i] + cfg.delta * dir[i];
      plus = oracle.eval_at(point, first);
      check_finite(plus, first);
      for (std::size_t i = 0; i < d; ++i) point[i] = x[i] - cfg.delta * dir[i];
      minus = oracle.eval_at(point, first + 1);
      check_finite(minus, first + 1);
    }
    const double slope = (plus - minus) / (2.0 * cfg.delta);
    for (std::size_t i = 0; i < d; ++i) x[i] -= cfg.alpha * slope * dir[i];
    return 0.5 * (plus + minus);
  });
}

RunResult run_zoscd(Oracle& oracle, std::span<const double> x0, const BaselineConfig& cfg,
                    const Reporter& report) {
  const std::size_t d = x0.size();
  Prng rng = RngStreams(cfg.seed).substream(Stream::block_choice);
  return drive(oracle, x0, cfg, report, [&](Vector& x, ComputeClock& clock) {
    const std::size_t i = rng.below(d);
    double base = 0.0;
    double moved = 0.0;
    {
      PauseClock pause(&clock);
      const std::uint64_t first = oracle.reserve(2);
      base = oracle.eval_at(x, first);
      check_finite(base, first);
      const double saved = x[i];
      x[i] = saved + cfg.delta;
      moved = oracle.eval_at(x, first + 1);
      x[i] = saved;
      check_finite(moved, first + 1);
    }
    x[i] -= cfg.alpha * (moved - base) / cfg.delta;
    return base;
  });
}

RunResult run_baseline(Oracle& oracle, std::span<const double> x0, const BaselineConfig& cfg,
                       const Reporter& report) {
  switch (cfg.method) {
    case BaselineMethod::fdsa: return run_fdsa(oracle, x0, cfg, report);
    case BaselineMethod::spsa: return run_spsa(oracle, x0, cfg, report);
    case BaselineMethod::zoscd: return run_zoscd(oracle, x0, cfg, report);
  }
  throw ConfigError("unknown baseline method");
}

}  // namespace zobcd
