#include <doctest.h>

#include <cmath>

#include "zobcd/baselines.hpp"
#include "zobcd/objectives.hpp"

using namespace zobcd;

namespace {

BaselineConfig config(BaselineMethod method, double alpha, double delta, std::uint64_t budget) {
  BaselineConfig cfg;
  cfg.method = method;
  cfg.alpha = alpha;
  cfg.delta = delta;
  cfg.budget = budget;
  cfg.record_timing = false;
  return cfg;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("fdsa spends d + 1 queries and takes the forward-difference step") {
    const std::size_t d = 30;
    const double L = 3.0;
    auto f = [&](std::span<const double> x) { return 0.5 * L * dot(x, x); };
    auto oracle = make_noisy_oracle(f, d, NoiseModel::noiseless(), RngStreams(1));
    Prng g(2);
    Vector x0(d);
    for (auto& v : x0) v = g.normal();
    const double delta = 1e-4;
    const auto r = run_fdsa(*oracle, x0, config(BaselineMethod::fdsa, 1.0 / L, delta, 1), f);
    CHECK(r.iterations == 1);
    CHECK(oracle->query_count() == d + 1);
    // (f(x + delta e_i) - f(x)) / delta = L x_i + L delta / 2, so the step lands on -delta / 2.
    for (double v : r.x_final) CHECK(v == doctest::Approx(-delta / 2).epsilon(1e-6));
  }

  TEST_CASE("fdsa descends monotonically on a quadric") {
    Prng g(3);
    const std::size_t d = 100;
    std::vector<std::size_t> support(d);
    std::vector<double> coeffs(d);
    for (std::size_t i = 0; i < d; ++i) {
      support[i] = i;
      coeffs[i] = g.uniform(0.2, 1.0);
    }
    coeffs[0] = 1.0;
    SparseQuadric q(d, support, coeffs);
    Vector x0(d);
    for (auto& v : x0) v = g.normal();
    auto oracle = make_noisy_oracle(q.as_function(), d, NoiseModel::noiseless(), RngStreams(4));
    auto cfg = config(BaselineMethod::fdsa, theoretical_step_size(q.l_max()), 1e-5, 200000);
    cfg.target = 1e-6;
    const auto r = run_fdsa(*oracle, x0, cfg, [&](std::span<const double> x) { return q.value(x); });
    CHECK(r.termination == Termination::target_reached);
    const auto& recs = r.trace.records();
    for (std::size_t k = 1; k < recs.size(); ++k) CHECK(recs[k].f_value <= recs[k - 1].f_value);
  }

  TEST_CASE("spsa spends two queries per iteration") {
    auto f = [](std::span<const double> x) { return dot(x, x); };
    auto oracle = make_noisy_oracle(f, 8, NoiseModel::noiseless(), RngStreams(5));
    const auto r = run_spsa(*oracle, Vector(8, 1.0), config(BaselineMethod::spsa, 0.01, 1e-2, 20), f);
    CHECK(r.iterations == 10);
    CHECK(oracle->query_count() == 20);
    for (std::size_t k = 0; k < r.trace.size(); ++k) CHECK(r.trace.records()[k].cumulative_queries == 2 * k);
  }

  TEST_CASE("spsa estimate is unbiased for linear functions") {
    const Vector c{1.0, -2.0, 0.5, 3.0, 0.0};
    const std::size_t d = c.size();
    auto f = [&](std::span<const double> x) { return dot(c, x); };
    const int draws = 10000;
    const double alpha = 1.0;
    Vector mean(d, 0.0);
    for (int t = 0; t < draws; ++t) {
      auto oracle = make_noisy_oracle(f, d, NoiseModel::noiseless(), RngStreams(6));
      auto cfg = config(BaselineMethod::spsa, alpha, 1e-2, 1);
      cfg.seed = static_cast<std::uint64_t>(t);
      const auto r = run_spsa(*oracle, Vector(d, 0.0), cfg, f);
      for (std::size_t i = 0; i < d; ++i) mean[i] += -r.x_final[i] / alpha / draws;
    }
    // Var of g_hat_i = sum_{k != i} c_k^2; the aggregate error has the summed variance.
    const double cc = dot(c, c);
    double var_sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) var_sum += cc - c[i] * c[i];
    double err = 0.0;
    for (std::size_t i = 0; i < d; ++i) err += (mean[i] - c[i]) * (mean[i] - c[i]);
    CHECK(std::sqrt(err) <= 2.0 * std::sqrt(var_sum / draws));
  }

  TEST_CASE("zoscd changes one coordinate per iteration with two queries") {
    const std::size_t d = 40;
    auto f = [](std::span<const double> x) { return dot(x, x); };
    Prng g(7);
    Vector x0(d);
    for (auto& v : x0) v = g.normal();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto oracle = make_noisy_oracle(f, d, NoiseModel::noiseless(), RngStreams(8));
      auto cfg = config(BaselineMethod::zoscd, 0.1, 1e-3, 1);
      cfg.seed = seed;
      const auto r = run_zoscd(*oracle, x0, cfg, f);
      CHECK(oracle->query_count() == 2);
      std::size_t changed = 0;
      for (std::size_t i = 0; i < d; ++i) changed += r.x_final[i] != x0[i];
      CHECK(changed == 1);
    }
  }

  TEST_CASE("zoscd solves a separable quadric coordinate-wise") {
    const std::size_t d = 20;
    const double L = 2.0, delta = 1e-7;
    std::vector<std::size_t> support(d);
    for (std::size_t i = 0; i < d; ++i) support[i] = i;
    SparseQuadric q(d, support, std::vector<double>(d, L));
    Vector x0(d, 5.0);
    auto oracle = make_noisy_oracle(q.as_function(), d, NoiseModel::noiseless(), RngStreams(9));
    auto cfg = config(BaselineMethod::zoscd, 1.0 / L, delta, 2000);
    const auto r = run_zoscd(*oracle, x0, cfg, [&](std::span<const double> x) { return q.value(x); });
    // Each visited coordinate lands on -delta / 2, the forward-difference fixed point.
    for (double v : r.x_final) CHECK(std::abs(v + delta / 2) <= 1e-6);
  }

  TEST_CASE("shared conventions") {
    auto f = [](std::span<const double> x) { return dot(x, x); };
    for (auto m : {BaselineMethod::fdsa, BaselineMethod::spsa, BaselineMethod::zoscd}) {
      auto oracle = make_noisy_oracle(f, 5, NoiseModel::bounded(1e-8), RngStreams(10));
      auto cfg = config(m, 0.1, 1e-3, 60);
      const auto r = run_baseline(*oracle, Vector(5, 1.0), cfg);
      CHECK(r.trace.records()[0].cumulative_queries == 1);
      CHECK(r.trace.back().cumulative_queries == oracle->query_count());
      CHECK(oracle->query_count() <= 60 + 6);
      CHECK(r.termination == Termination::budget_exhausted);
    }
    auto oracle = make_noisy_oracle(f, 5, NoiseModel::noiseless(), RngStreams(10));
    auto cfg = config(BaselineMethod::spsa, 0.0, 1e-3, 10);
    CHECK_THROWS_AS(run_baseline(*oracle, Vector(5, 1.0), cfg), ConfigError);
    cfg.alpha = 0.1;
    cfg.delta = -1.0;
    CHECK_THROWS_AS(run_baseline(*oracle, Vector(5, 1.0), cfg), ConfigError);
    cfg.delta = 1e-3;
    CHECK_THROWS_AS(run_baseline(*oracle, Vector(4, 1.0), cfg), ContractError);
  }

  TEST_CASE("divergent steps are reported as numerical failure") {
    auto f = [](std::span<const double> x) { return std::exp(dot(x, x)); };
    auto oracle = make_noisy_oracle(f, 3, NoiseModel::noiseless(), RngStreams(11));
    const auto r = run_baseline(*oracle, Vector(3, 1.0), config(BaselineMethod::zoscd, 1e6, 1e-3, 1000));
    CHECK(r.termination == Termination::numerical_failure);
    CHECK_FALSE(r.message.empty());
  }
}
