#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "zobcd/blocks.hpp"

using namespace zobcd;

namespace {

SparseVector random_sparse(std::size_t d, std::size_t s, Prng& g) {
  std::vector<std::size_t> pool(d);
  for (std::size_t i = 0; i < d; ++i) pool[i] = i;
  for (std::size_t i = 0; i < s; ++i) std::swap(pool[i], pool[i + g.below(d - i)]);
  pool.resize(s);
  std::sort(pool.begin(), pool.end());
  std::vector<SparseVector::Entry> e;
  for (auto i : pool) e.push_back({i, 1.0});
  return SparseVector(d, std::move(e));
}

}  // namespace

TEST_SUITE("blocks") {
  TEST_CASE("equal block sizes put the remainder first") {
    using V = std::vector<std::size_t>;
    CHECK(equal_block_sizes(6, 3) == V{2, 2, 2});
    CHECK(equal_block_sizes(7, 3) == V{3, 2, 2});
    CHECK_THROWS_AS(equal_block_sizes(3, 4), ConfigError);
    CHECK_THROWS_AS(equal_block_sizes(3, 0), ConfigError);
  }

  TEST_CASE("random partition is a bijection with the stated sizes") {
    Prng g(1);
    auto p = random_partition(20000, 5, g);
    CHECK(p.num_blocks() == 5);
    for (std::size_t j = 0; j < 5; ++j) CHECK(p.block_size(j) == 4000);
    std::vector<char> seen(20000, 0);
    for (auto i : p.permutation()) seen[i]++;
    CHECK(std::all_of(seen.begin(), seen.end(), [](char c) { return c == 1; }));
    for (std::size_t j = 0; j < 5; ++j) {
      for (auto i : p.block(j)) CHECK(p.owner(i) == j);
    }
    CHECK_THROWS_AS(BlockPartition({0, 0, 1}, {3}), ConfigError);
    CHECK_THROWS_AS(BlockPartition({0, 1, 2}, {1, 1}), ConfigError);
  }

  TEST_CASE("partition assignment is uniform") {
    Prng g(2);
    std::map<std::vector<std::size_t>, int> counts;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
      auto p = random_partition(6, 2, g);
      auto b = std::vector<std::size_t>(p.block(0).begin(), p.block(0).end());
      std::sort(b.begin(), b.end());
      counts[b]++;
    }
    CHECK(counts.size() == 20);  // C(6,3) possible first blocks
    for (const auto& [_, c] : counts) CHECK(std::abs(c - trials / 20.0) <= 0.05 * trials / 20.0);
  }

  TEST_CASE("restrict and lift") {
    auto p = BlockPartition::identity(4, 2);
    const Vector x{9, 8, 7, 6};
    CHECK(restrict_block(x, p, 0) == Vector{9, 8});
    CHECK_THROWS_AS(restrict_block(x, p, 2), ContractError);
    CHECK(lift(Vector{0, 0}, p, 1) == Vector(4, 0.0));
    CHECK_THROWS_AS(lift(Vector{1, 2, 3}, p, 1), ContractError);

    Prng g(3);
    auto q = random_partition(11, 3, g);
    Vector y(11);
    for (auto& v : y) v = g.normal();
    Vector sum(11, 0.0);
    Vector concat;
    for (std::size_t j = 0; j < 3; ++j) {
      const Vector t = restrict_block(y, q, j);
      CHECK(restrict_block(lift(t, q, j), q, j) == t);
      CHECK(norm2(lift(t, q, j)) == doctest::Approx(norm2(t)));
      const Vector l = lift(t, q, j);
      for (std::size_t i = 0; i < 11; ++i) sum[i] += l[i];
      concat.insert(concat.end(), t.begin(), t.end());
    }
    CHECK(sum == y);
    std::sort(concat.begin(), concat.end());
    Vector sorted = y;
    std::sort(sorted.begin(), sorted.end());
    CHECK(concat == sorted);

    Vector z = y;
    add_lifted(z, SparseVector(q.block_size(1), {{0, 1.0}}), q, 1, -2.0);
    CHECK(z[q.block(1)[0]] == doctest::Approx(y[q.block(1)[0]] - 2.0));
  }

  TEST_CASE("sparsity histogram") {
    Prng g(4);
    auto p = random_partition(100, 4, g);
    const auto s = random_sparse(100, 13, g);
    const auto h = block_sparsity_histogram(s, p);
    CHECK(std::accumulate(h.begin(), h.end(), std::size_t{0}) == 13);
    CHECK(block_sparsity_histogram(s, BlockPartition::identity(100, 1)) == std::vector<std::size_t>{13});
    CHECK(block_sparsity_histogram(SparseVector(100), p) == std::vector<std::size_t>(4, 0));
  }

  TEST_CASE("equisparsity bound and its Monte-Carlo check") {
    const double bound = equisparsity_failure_bound(5, 200, 0.1);
    CHECK(bound == doctest::Approx(10.0 * std::exp(-0.01 * 200 / 15.0)));
    Prng g(5);
    const auto s = random_sparse(20000, 200, g);
    int within = 0;
    for (int t = 0; t < 1000; ++t) {
      auto p = random_partition(20000, 5, g);
      const auto h = block_sparsity_histogram(s, p);
      within += *std::max_element(h.begin(), h.end()) <= 44;
    }
    CHECK(within / 1000.0 >= 1.0 - bound);
  }

  TEST_CASE("block sparsity") {
    CHECK(block_sparsity(200, 5) == 44);
    CHECK(block_sparsity(200, 5, 1.05) == 42);
    CHECK(block_sparsity(3, 10) == 1);
    CHECK_THROWS_AS(block_sparsity(0, 2), ConfigError);
  }

  TEST_CASE("reshuffling") {
    Prng g(6);
    auto p = random_partition(1000, 5, g);
    for (std::size_t k = 1; k < 20; ++k) CHECK(reshuffle_if_due(p, k, std::nullopt, g) == p);
    CHECK(reshuffle_if_due(p, 3, 5, g) == p);
    int changed = 0;
    for (std::uint64_t seed = 100; seed < 200; ++seed) {
      Prng r(seed);
      changed += !(reshuffle_if_due(p, 5, 5, r) == p);
    }
    CHECK(changed == 100);
    CHECK_THROWS_AS(reshuffle_if_due(p, 5, 0, g), ConfigError);
  }

  TEST_CASE("shared directions for unequal blocks") {
    Prng g(7);
    BlockPartition p({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {6, 4});
    SharedDirections shared(12, 6, g);
    Prng pick(8);
    auto z0 = shared.for_block(0, p, 12, pick);
    CHECK(z0.cols() == 6);
    auto z1 = shared.for_block(1, p, 5, pick);
    CHECK(z1.cols() == 4);
    CHECK(z1.rows() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(z1.entry(i, j)) == 1.0);
    }
    // With all rows selected the block-0 ensemble is the master itself.
    for (std::size_t i = 0; i < 12; ++i) {
      bool found = false;
      for (std::size_t r = 0; r < 12 && !found; ++r) {
        bool same = true;
        for (std::size_t j = 0; j < 6; ++j) same &= z0.entry(i, j) == shared.master().entry(r, j);
        found = same;
      }
      CHECK(found);
    }
    BlockPartition too_big({0, 1, 2, 3, 4, 5, 6, 7}, {7, 1});
    CHECK_THROWS_AS(shared.for_block(0, too_big, 3, pick), ConfigError);
    CHECK(unequal_block_rows(2.0, 10, 20000, 5) ==
          static_cast<std::size_t>(std::ceil(2.0 * 10 * std::log(4000.0))));
  }
}
