#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "zobcd/core.hpp"

namespace zobcd {

enum class EnsembleKind { dense_rademacher, partial_circulant };

/// Measurement operator Z with rows z_i / sqrt(m).
///
/// Two layouts are supported:
///  - dense Rademacher: an m x n table of +-1 signs;
///  - partial circulant: a generator z of length n and a sorted row set Omega;
///    row i is the cyclic shift C_{omega_i}(z)_j = z_{(omega_i + j) mod n}.
///
/// Stored entries are never scaled; 1/sqrt(m) is applied on the fly. The
/// object is immutable and cheap to copy (storage is shared), so concurrent
/// `apply`/`adjoint` calls are safe.
class SampleEnsemble {
 public:
  static SampleEnsemble rademacher(std::size_t m, std::size_t n, Prng& rng);
  /// Row-major signs, each +1 or -1.
  static SampleEnsemble rademacher_from_signs(std::size_t m, std::size_t n,
                                              std::vector<std::int8_t> signs);

  /// Draws a Rademacher generator from `generator_rng` and Omega (uniform,
  /// without replacement) from `row_rng`.
  static SampleEnsemble partial_circulant(std::size_t m, std::size_t n, Prng& generator_rng,
                                          Prng& row_rng);
  static SampleEnsemble partial_circulant(std::size_t m, std::size_t n, Prng& rng) {
    return partial_circulant(m, n, rng, rng);
  }
  /// Explicit generator and 0-based row set. Generator values only need to be finite.
  static SampleEnsemble partial_circulant(std::vector<double> generator,
                                          std::vector<std::size_t> omega);

  EnsembleKind kind() const noexcept { return kind_; }
  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return n_; }
  double scale() const noexcept;

  /// out = Z v. Sizes: v.size() == cols(), out.size() == rows().
  void apply(std::span<const double> v, std::span<double> out) const;
  Vector apply(std::span<const double> v) const;
  /// out = Z^T y.
  void adjoint(std::span<const double> y, std::span<double> out) const;
  Vector adjoint(std::span<const double> y) const;

  /// out = Z[:, support] w, in O(m |support|).
  void apply_columns(std::span<const std::size_t> support, std::span<const double> w,
                     std::span<double> out) const;
  /// out = Z[:, support]^T y, in O(m |support|).
  void adjoint_columns(std::span<const std::size_t> support, std::span<const double> y,
                       std::span<double> out) const;
  /// Scaled dense copy of Z[:, support], row-major (m x |support|).
  Vector gather_columns(std::span<const std::size_t> support) const;

  /// Unscaled sample direction z_i (entries +-1 for Rademacher generators).
  void direction(std::size_t i, std::span<double> out) const;
  /// Unscaled entry (i, j).
  double entry(std::size_t i, std::size_t j) const;

  /// View restricted to the first `n` columns; shares storage.
  SampleEnsemble truncated(std::size_t n) const;
  /// Partial circulant with a new row set over the same generator.
  SampleEnsemble with_rows(std::vector<std::size_t> omega) const;
  /// Dense ensemble made of the given rows of this one (any kind).
  SampleEnsemble select_rows(std::span<const std::size_t> rows) const;

  /// Circulant generator (empty for dense ensembles).
  std::span<const double> generator() const noexcept;
  /// Circulant row set, 0-based and sorted (empty for dense ensembles).
  std::span<const std::size_t> omega() const noexcept { return omega_; }
  /// Number of stored scalars backing this operator.
  std::size_t storage_scalars() const noexcept;

  struct CirculantData;

 private:
  SampleEnsemble() = default;

  void check_apply(std::size_t in, std::size_t out) const;
  void check_adjoint(std::size_t in, std::size_t out) const;
  /// Full cyclic correlation r_i = sum_j w_j z_{(i+j) mod N}, w of length N.
  void correlate(std::span<const double> w, std::span<double> r) const;

  EnsembleKind kind_ = EnsembleKind::dense_rademacher;
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  // dense
  std::shared_ptr<const std::vector<std::int8_t>> signs_;
  std::size_t stride_ = 0;
  // circulant
  std::shared_ptr<const CirculantData> circulant_;
  std::vector<std::size_t> omega_;
};

/// m distinct indices drawn uniformly from [0, n), returned sorted.
std::vector<std::size_t> random_row_set(std::size_t m, std::size_t n, Prng& rng);

/// Circulant sizes at or above this use FFT-based correlation.
inline constexpr std::size_t fft_threshold = 64;

/// Row count for an ensemble over n columns targeting s-sparse recovery:
///   dense:     ceil(b1 * s * ln n)
///   circulant: ceil(b3 * s * ln^2(max(s, 2)) * ln^2 n)
/// clamped to [s + 1, n] (upper bound wins when s == n).
std::size_t required_rows(EnsembleKind kind, std::size_t s, std::size_t n, double b1, double b3);

}  // namespace zobcd
