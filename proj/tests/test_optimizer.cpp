#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "zobcd/objectives.hpp"
#include "zobcd/optimizer.hpp"

using namespace zobcd;

namespace {

Vector random_point(std::size_t d, double scale, Prng& g) {
  Vector x(d);
  for (auto& v : x) v = g.normal();
  const double n = norm2(x);
  for (auto& v : x) v *= scale / n;
  return x;
}

ZobcdConfig small_config(std::size_t d, std::size_t J, std::size_t s) {
  ZobcdConfig cfg;
  cfg.d = d;
  cfg.num_blocks = J;
  cfg.s = s;
  cfg.alpha = 0.9;
  cfg.delta = 1e-3;
  cfg.budget = 20000;
  cfg.seed = 17;
  cfg.record_timing = false;
  return cfg;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("one block, exact step on an isotropic quadratic lands at the minimizer") {
    Prng g(1);
    const double L = 2.0;
    const std::size_t d = 200;
    auto q = SparseQuadric::random(d, 4, g, L);
    Vector x0(d, 0.0);
    for (auto i : q.support()) x0[i] = g.normal();
    auto oracle = make_noisy_oracle(q.as_function(), d, NoiseModel::noiseless(), RngStreams(2));
    ZobcdConfig cfg = small_config(d, 1, 4);
    cfg.alpha = theoretical_step_size(L);
    cfg.delta = 1e-8;
    cfg.lsq_tol = 1e-15;
    cfg.lsq_max_iters = 50;
    cfg.budget = 1;
    const auto r = run_zobcd(*oracle, x0, cfg, [&](std::span<const double> x) { return q.value(x); });
    CHECK(r.iterations == 1);
    CHECK(norm2(r.x_final) <= 1e-6 * norm2(x0));
  }

  TEST_CASE("a budget of m queries runs exactly one iteration") {
    Prng g(3);
    const std::size_t d = 1000;
    auto q = SparseQuadric::random(d, 10, g);
    ZobcdConfig cfg = small_config(d, 4, 10);
    const std::size_t m = cfg.rows_per_iteration();
    cfg.budget = m;
    for (bool with_report : {true, false}) {
      auto oracle = make_noisy_oracle(q.as_function(), d, NoiseModel::noiseless(), RngStreams(4));
      Reporter rep;
      if (with_report) rep = [&](std::span<const double> x) { return q.value(x); };
      const auto r = run_zobcd(*oracle, random_point(d, 10, g), cfg, rep);
      CHECK(r.iterations == 1);
      CHECK(r.termination == Termination::budget_exhausted);
      CHECK(r.rows_per_iteration == m);
      CHECK(oracle->query_count() == m + 1 + (with_report ? 0 : 1));
    }
  }

  TEST_CASE("step") {
    auto p = BlockPartition::identity(6, 2);
    const Vector x{1, 2, 3, 4, 5, 6};
    CHECK(step(x, SparseVector(3), 0.7, p, 1) == x);
    CHECK(step(x, SparseVector(3, {{0, 5.0}}), 0.0, p, 1) == x);
    const Vector y = step(x, SparseVector(3, {{0, 1.0}, {2, -2.0}}), 0.5, p, 1);
    CHECK(y == Vector{1, 2, 3, 3.5, 5, 7});
  }

  TEST_CASE("theoretical step size") {
    CHECK(theoretical_step_size(1.0) == 1.0);
    CHECK(theoretical_step_size(4.0) == 0.25);
    CHECK_THROWS_AS(theoretical_step_size(0.0), ConfigError);
    CHECK_THROWS_AS(theoretical_step_size(-1.0), ConfigError);
  }

  TEST_CASE("config validation") {
    ZobcdConfig cfg = small_config(100, 4, 10);
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.num_blocks = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.num_blocks = 101;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.budget = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.s = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.reshuffle_period = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(cfg.block_sparsity() == 3);
  }

  TEST_CASE("iterates change only on the chosen block and the budget overshoot is bounded") {
    Prng g(5);
    const std::size_t d = 2000;
    auto q = SparseQuadric::random(d, 20, g);
    for (auto variant : {Variant::r, Variant::rc}) {
      for (std::uint64_t budget : {1000u, 3333u, 5000u}) {
        auto oracle = make_noisy_oracle(q.as_function(), d, NoiseModel::bounded(1e-6), RngStreams(6));
        ZobcdConfig cfg = small_config(d, 5, 20);
        cfg.variant = variant;
        cfg.budget = budget;
        cfg.reshuffle_period = 5;
        std::size_t violations = 0, observed = 0;
        const auto r = run_zobcd(
            *oracle, random_point(d, 10, g), cfg, [&](std::span<const double> x) { return q.value(x); },
            [&](const IterationInfo& info) {
              ++observed;
              for (std::size_t i = 0; i < d; ++i) {
                if (info.partition.owner(i) != info.block && info.x_before[i] != info.x_after[i]) {
                  ++violations;
                }
              }
            });
        CHECK(violations == 0);
        CHECK(observed == r.iterations);
        CHECK(oracle->query_count() <= budget + r.rows_per_iteration + 1);
        CHECK(r.trace.back().cumulative_queries == oracle->query_count());
      }
    }
  }

  TEST_CASE("lower bound of the optimality gap by the block gradient") {
    Prng g(7);
    const std::size_t d = 3000, s = 60, J = 6;
    std::vector<std::size_t> support;
    while (support.size() < s) {
      const auto i = g.below(d);
      if (std::find(support.begin(), support.end(), i) == support.end()) support.push_back(i);
    }
    std::sort(support.begin(), support.end());
    std::vector<double> coeffs(s);
    for (auto& a : coeffs) a = g.uniform(0.1, 5.0);
    SparseQuadric q(d, support, coeffs);
    const double l_max = q.l_max();
    auto p = random_partition(d, J, g);
    std::size_t violations = 0;
    for (int t = 0; t < 1000; ++t) {
      Vector x(d);
      for (auto& v : x) v = g.normal() * g.uniform(0.01, 10.0);
      const double gap = q.value(x);
      const Vector grad = q.gradient(x).to_dense();
      for (std::size_t j = 0; j < J; ++j) {
        const Vector gj = restrict_block(grad, p, j);
        const double rhs = dot(gj, gj) / (2.0 * l_max);
        violations += gap < rhs - 1e-12;
      }
    }
    CHECK(violations == 0);
  }

  TEST_CASE("inexactness constants") {
    const auto c = inexactness_constants(0.5, 2.0, 3, 1e-4, 1.0, 1.0, 10.0);
    CHECK(c.eta == doctest::Approx(2.0 * std::pow(0.5, 6)));
    CHECK(c.theta == doctest::Approx(4.0 * 4.0 * 1e-4));
    CHECK(c.admissibility == doctest::Approx(4.0 * std::pow(0.5, 12) + 16.0 * 4.0 * 1e-4 / 10.0));
    CHECK(c.admissible);
    CHECK_FALSE(inexactness_constants(0.99, 10.0, 1, 1.0, 1.0, 1.0, 1.0).admissible);
    CHECK_THROWS_AS(inexactness_constants(0.5, 1.0, 1, 1.0, 1.0, 0.0, 1.0), ConfigError);
    CHECK(level_set_constant(5, 2.0, 3.0) == doctest::Approx(180.0));
  }

  TEST_CASE("both variants converge on a small sparse quadric") {
    Prng g(8);
    const std::size_t d = 4000;
    auto q = SparseQuadric::random(d, 20, g);
    for (auto variant : {Variant::r, Variant::rc}) {
      auto oracle = make_noisy_oracle(q.as_function(), d, NoiseModel::bounded(1e-6), RngStreams(9));
      ZobcdConfig cfg = small_config(d, 4, 20);
      cfg.variant = variant;
      cfg.budget = 200000;
      cfg.target = 1e-4;
      cfg.reshuffle_period = 4;
      const Vector x0 = random_point(d, 100, g);
      const auto r = run_zobcd(*oracle, x0, cfg, [&](std::span<const double> x) { return q.value(x); });
      CHECK(r.termination == Termination::target_reached);
      CHECK(r.trace.back().f_value <= 1e-4);
      CHECK(r.trace.size() == r.iterations + 1);
    }
  }

  TEST_CASE("smoothed trace is non-increasing") {
    Prng g(10);
    const std::size_t d = 4000, J = 4;
    auto q = SparseQuadric::random(d, 40, g);
    auto oracle = make_noisy_oracle(q.as_function(), d, NoiseModel::gaussian(1e-6), RngStreams(11));
    ZobcdConfig cfg = small_config(d, J, 40);
    cfg.delta = 1e-2;
    cfg.sparsity_factor = 1.05;
    cfg.target = 1e-2;
    cfg.budget = 500000;
    const auto r = run_zobcd(*oracle, random_point(d, 100, g), cfg,
                             [&](std::span<const double> x) { return q.value(x); });
    const auto& recs = r.trace.records();
    std::vector<double> smooth;
    for (std::size_t k = 0; k + J <= recs.size(); ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < J; ++i) acc += recs[k + i].f_value;
      smooth.push_back(acc / J);
    }
    REQUIRE(smooth.size() > 10);
    std::size_t ok = 0;
    for (std::size_t k = 1; k < smooth.size(); ++k) ok += smooth[k] <= smooth[k - 1];
    CHECK(double(ok) >= 0.95 * double(smooth.size() - 1));
  }

  TEST_CASE("non-finite oracle values end the run as a numerical failure") {
    Prng g(12);
    const std::size_t d = 500;
    auto q = SparseQuadric::random(d, 5, g);
    auto f = [&](std::span<const double> x) {
      const double v = q.value(x);
      return v < 10.0 ? NAN : v;
    };
    auto oracle = make_noisy_oracle(f, d, NoiseModel::noiseless(), RngStreams(13));
    ZobcdConfig cfg = small_config(d, 1, 5);
    Vector x0(d, 0.0);
    for (auto i : q.support()) x0[i] = 10.0;
    const auto r = run_zobcd(*oracle, x0, cfg);
    CHECK(r.termination == Termination::numerical_failure);
    CHECK_FALSE(r.message.empty());
    CHECK_FALSE(r.trace.empty());
    CHECK(r.iterations >= 1);
  }

  TEST_CASE("runs are reproducible from the seed") {
    Prng g(14);
    const std::size_t d = 1000;
    auto q = SparseQuadric::random(d, 10, g);
    const Vector x0 = random_point(d, 10, g);
    auto run = [&] {
      auto oracle = make_noisy_oracle(q.as_function(), d, NoiseModel::gaussian(1e-6), RngStreams(15));
      ZobcdConfig cfg = small_config(d, 2, 10);
      cfg.budget = 3000;
      return run_zobcd(*oracle, x0, cfg).trace.records();
    };
    CHECK(run() == run());
  }

  TEST_CASE("contract errors") {
    auto oracle = make_noisy_oracle([](std::span<const double>) { return 0.0; }, 10,
                                    NoiseModel::noiseless(), RngStreams(1));
    ZobcdConfig cfg = small_config(10, 1, 2);
    CHECK_THROWS_AS(run_zobcd(*oracle, Vector(9, 0.0), cfg), ContractError);
    cfg.d = 12;
    CHECK_THROWS_AS(run_zobcd(*oracle, Vector(12, 0.0), cfg), ContractError);
    CHECK(termination_name(Termination::target_reached) == "target_reached");
  }
}
