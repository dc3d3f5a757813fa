#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "zobcd/sampling.hpp"

using namespace zobcd;

namespace {

// Dense matrix built entry by entry from the definition, independent of the
// library's fast paths.
Eigen::MatrixXd dense_circulant_rows(std::span<const double> z, std::span<const std::size_t> omega,
                                     std::size_t n_cols) {
  const std::size_t n = z.size();
  Eigen::MatrixXd a(omega.size(), n_cols);
  for (std::size_t t = 0; t < omega.size(); ++t) {
    for (std::size_t j = 0; j < n_cols; ++j) a(t, j) = z[(omega[t] + j) % n];
  }
  return a / std::sqrt(static_cast<double>(omega.size()));
}

Eigen::MatrixXd dense_of(const SampleEnsemble& z) {
  Eigen::MatrixXd a(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < z.cols(); ++j) a(i, j) = z.entry(i, j) * z.scale();
  }
  return a;
}

Vector random_vector(std::size_t n, Prng& g) {
  Vector v(n);
  for (auto& x : v) x = g.normal();
  return v;
}

double rel_err(const Vector& a, const Eigen::VectorXd& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

Eigen::Map<const Eigen::VectorXd> as_eigen(const Vector& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

TEST_SUITE("sampling") {
  TEST_CASE("rademacher basics") {
    Prng g(1);
    auto z = SampleEnsemble::rademacher(4, 8, g);
    CHECK(z.apply(Vector(8, 0.0)) == Vector(4, 0.0));
    Vector e1(8, 0.0);
    e1[0] = 1.0;
    for (double v : z.apply(e1)) CHECK(std::abs(v) == doctest::Approx(0.5));
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(z.entry(i, j)) == 1.0);
    }
    CHECK_THROWS_AS(SampleEnsemble::rademacher(0, 8, g), ConfigError);
    CHECK_THROWS_AS(SampleEnsemble::rademacher(4, 0, g), ConfigError);
    CHECK_THROWS_AS(z.apply(Vector(7, 0.0)), ContractError);
    CHECK_THROWS_AS(z.adjoint(Vector(3, 0.0)), ContractError);
  }

  TEST_CASE("rademacher column means concentrate") {
    Prng g(2);
    auto z = SampleEnsemble::rademacher(1000, 100, g);
    for (std::size_t j = 0; j < 100; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < 1000; ++i) sum += z.entry(i, j);
      CHECK(std::abs(sum / 1000.0) <= 4.0 / std::sqrt(1000.0));
    }
  }

  TEST_CASE("circulant row formula on the three-element generator") {
    auto z = SampleEnsemble::partial_circulant({1.0, 2.0, 3.0}, {0, 1, 2});
    const double rows[3][3] = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) CHECK(z.entry(i, j) == rows[i][j]);
    }
    const auto out = z.apply(Vector{1.0, 0.0, 0.0});
    for (std::size_t i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx((i + 1) / std::sqrt(3.0)));
  }

  TEST_CASE("partial circulant with m = n is the full circulant product") {
    Prng g(3);
    for (std::size_t n : {16, 100, 300}) {
      auto z = SampleEnsemble::partial_circulant(n, n, g);
      const Vector v = random_vector(n, g);
      const Eigen::MatrixXd a = dense_circulant_rows(z.generator(), z.omega(), n);
      CHECK(rel_err(z.apply(v), a * as_eigen(v)) < 1e-10);
    }
  }

  TEST_CASE("partial circulant apply and adjoint match dense oracle") {
    Prng g(4);
    for (std::size_t n : {40, 63, 64, 256, 500}) {
      for (std::size_t m : {std::size_t{1}, n / 4 + 1, n}) {
        auto z = SampleEnsemble::partial_circulant(m, n, g);
        const Eigen::MatrixXd a = dense_circulant_rows(z.generator(), z.omega(), n);
        const Vector v = random_vector(n, g);
        const Vector y = random_vector(m, g);
        CHECK(rel_err(z.apply(v), a * as_eigen(v)) < 1e-10);
        CHECK(rel_err(z.adjoint(y), a.transpose() * as_eigen(y)) < 1e-10);
        CHECK(z.adjoint(Vector(m, 0.0)) == Vector(n, 0.0));
      }
    }
  }

  TEST_CASE("circulant storage is linear in n + m") {
    Prng g(5);
    auto z = SampleEnsemble::partial_circulant(64, 256, g);
    CHECK(z.storage_scalars() <= 4 * (256 + 64));
    for (double v : z.generator()) CHECK(std::abs(v) == 1.0);
    const auto om = z.omega();
    CHECK(std::is_sorted(om.begin(), om.end()));
    CHECK(std::adjacent_find(om.begin(), om.end()) == om.end());
    CHECK_THROWS_AS(SampleEnsemble::partial_circulant(300, 256, g), ConfigError);
  }

  TEST_CASE("adjoint consistency and linearity") {
    Prng g(6);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 20 + g.below(200);
      const std::size_t m = 1 + g.below(n);
      auto z = trial % 2 ? SampleEnsemble::rademacher(m, n, g)
                         : SampleEnsemble::partial_circulant(m, n, g);
      const Vector v = random_vector(n, g);
      const Vector w = random_vector(n, g);
      const Vector y = random_vector(m, g);
      const double lhs = dot(z.apply(v), y);
      const double rhs = dot(v, z.adjoint(y));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)) * 10);

      Vector comb(n);
      for (std::size_t i = 0; i < n; ++i) comb[i] = 2.5 * v[i] - 0.5 * w[i];
      const Vector zc = z.apply(comb), zv = z.apply(v), zw = z.apply(w);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double expect = 2.5 * zv[i] - 0.5 * zw[i];
        num += (zc[i] - expect) * (zc[i] - expect);
        den += expect * expect;
      }
      CHECK(std::sqrt(num / den) < 1e-12);
    }
  }

  TEST_CASE("restricted column operators and gathers agree with the dense matrix") {
    Prng g(7);
    for (int kind = 0; kind < 2; ++kind) {
      auto z = kind ? SampleEnsemble::partial_circulant(30, 90, g)
                    : SampleEnsemble::rademacher(30, 90, g);
      const Eigen::MatrixXd a = dense_of(z);
      const std::vector<std::size_t> support{0, 7, 44, 89};
      const Vector w{1.0, -2.0, 0.5, 3.0};
      Vector out(30);
      z.apply_columns(support, w, out);
      Eigen::VectorXd expect = Eigen::VectorXd::Zero(30);
      for (std::size_t k = 0; k < support.size(); ++k) expect += w[k] * a.col(support[k]);
      CHECK(rel_err(out, expect) < 1e-12);

      const Vector y = random_vector(30, g);
      Vector back(4);
      z.adjoint_columns(support, y, back);
      for (std::size_t k = 0; k < support.size(); ++k) {
        CHECK(back[k] == doctest::Approx(a.col(support[k]).dot(as_eigen(y))).epsilon(1e-12));
      }
      const Vector sub = z.gather_columns(support);
      for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t k = 0; k < 4; ++k) CHECK(sub[i * 4 + k] == a(i, support[k]));
      }
    }
  }

  TEST_CASE("truncation, row replacement and selection") {
    Prng g(8);
    auto r = SampleEnsemble::rademacher(10, 50, g);
    auto t = r.truncated(20);
    CHECK(t.cols() == 20);
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t j = 0; j < 20; ++j) CHECK(t.entry(i, j) == r.entry(i, j));
    }
    const std::vector<std::size_t> rows{1, 4, 9};
    auto sel = r.select_rows(rows);
    CHECK(sel.rows() == 3);
    CHECK(sel.entry(1, 3) == r.entry(4, 3));
    CHECK(sel.scale() == doctest::Approx(1.0 / std::sqrt(3.0)));

    auto c = SampleEnsemble::partial_circulant(10, 50, g);
    auto c2 = c.with_rows({0, 2, 5});
    CHECK(c2.rows() == 3);
    CHECK(c2.entry(1, 0) == c.generator()[2]);
    CHECK(std::equal(c2.generator().begin(), c2.generator().end(), c.generator().begin()));
    CHECK_THROWS(c.truncated(60));
  }

  TEST_CASE("required rows") {
    CHECK(required_rows(EnsembleKind::dense_rademacher, 42, 4000, 1.0, 1.0) == 349);
    CHECK(required_rows(EnsembleKind::dense_rademacher, 50, 50, 2.0, 1.0) == 50);
    CHECK(required_rows(EnsembleKind::partial_circulant, 50, 50, 1.0, 1.0) == 50);
    const double ln2 = std::log(2.0), ln100 = std::log(100.0);
    CHECK(required_rows(EnsembleKind::partial_circulant, 1, 100, 1.0, 0.5) ==
          static_cast<std::size_t>(std::ceil(0.5 * ln2 * ln2 * ln100 * ln100)));
    // Lower clamp s + 1.
    CHECK(required_rows(EnsembleKind::partial_circulant, 10, 4000, 1.0, 1e-6) == 11);
    for (double b1 : {1.0, 2.5, 4.0}) {
      CHECK(required_rows(EnsembleKind::dense_rademacher, 10, 1000, b1, 1.0) ==
            static_cast<std::size_t>(std::ceil(b1 * 10 * std::log(1000.0))));
    }
    CHECK_THROWS_AS(required_rows(EnsembleKind::dense_rademacher, 11, 10, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(required_rows(EnsembleKind::dense_rademacher, 5, 10, 0.0, 1.0), ConfigError);
  }

  TEST_CASE("partial circulant RIP spot check") {
    Prng g(9);
    auto z = SampleEnsemble::partial_circulant(512, 1024, g);
    int inside = 0;
    for (int trial = 0; trial < 200; ++trial) {
      Vector v(1024, 0.0);
      for (std::size_t i = 0; i < 32; ++i) v[g.below(1024)] = g.normal();
      const double nv = norm2(v);
      for (auto& x : v) x /= nv;
      const double e = dot(z.apply(v), z.apply(v));
      inside += std::abs(e - 1.0) <= 0.3843;
    }
    CHECK(inside >= 198);
  }
}
