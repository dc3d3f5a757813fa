#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "zobcd/core.hpp"
#include "zobcd/sampling.hpp"

namespace zobcd {

/// s-sparse vector stored as (index, value) pairs with strictly increasing
/// 0-based indices.
class SparseVector {
 public:
  struct Entry {
    std::size_t index;
    double value;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SparseVector() = default;
  explicit SparseVector(std::size_t dim) : dim_(dim) {}
  /// Validates ordering, bounds and the optional entry budget.
  SparseVector(std::size_t dim, std::vector<Entry> entries,
               std::size_t budget = static_cast<std::size_t>(-1));

  /// Keeps the nonzero entries of a dense vector.
  static SparseVector from_dense(std::span<const double> dense);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::vector<std::size_t> support() const;
  Vector to_dense() const;
  double norm() const noexcept;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

struct CosampConfig {
  std::size_t s = 1;
  std::size_t n_iters = 10;
  /// Absolute stopping threshold on ||y - Z x||; negative selects 1e-12 * ||y||.
  double residual_tol = -1.0;
  std::size_t lsq_max_iters = 20;
  double lsq_tol = 1e-8;
  /// Skip the per-call warnings about underdetermined fits; for callers that
  /// solve many problems of one shape and warn once themselves.
  bool quiet = false;

  void validate() const;
};

/// Per-iteration view passed to an optional observer.
struct CosampIterate {
  std::size_t iteration;  // 1-based
  const SparseVector& estimate;
  double residual_norm;
};

using CosampObserver = std::function<void(const CosampIterate&)>;

/// Indices of the k largest |v_i| among nonzero entries; ties go to the lower
/// index. Returned in ascending index order.
std::vector<std::size_t> top_k_magnitude(std::span<const double> v, std::size_t k);
std::vector<std::size_t> top_k_magnitude(const SparseVector& v, std::size_t k);

struct LsqResult {
  Vector values;  // aligned with the support
  std::size_t iterations = 0;
  double relative_residual = 0.0;  // ||A^T r|| / ||A^T y||
};

/// Least squares over the columns in `support`, by CGLS (conjugate gradients on
/// the normal equations) using only restricted apply/adjoint. `initial`, if
/// non-empty, warm-starts the iteration.
LsqResult restricted_lsq(const SampleEnsemble& z, std::span<const double> y,
                         std::span<const std::size_t> support, std::size_t max_iters, double tol,
                         std::span<const double> initial = {}, bool quiet = false);

/// CoSaMP for min ||Z v - y|| s.t. ||v||_0 <= s.
SparseVector cosamp(const SampleEnsemble& z, std::span<const double> y, const CosampConfig& cfg,
                    const CosampObserver& observer = {});

}  // namespace zobcd
