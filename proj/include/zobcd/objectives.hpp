#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zobcd/blocks.hpp"
#include "zobcd/core.hpp"
#include "zobcd/sparse_recovery.hpp"

namespace zobcd {

/// Synthetic benchmark function with a known minimum value of zero and an
/// analytic (sub)gradient for validation.
class SyntheticObjective {
 public:
  virtual ~SyntheticObjective() = default;

  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t dim() const noexcept = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual SparseVector gradient(std::span<const double> x) const = 0;
  /// Largest block Lipschitz constant of the gradient.
  virtual double l_max() const noexcept = 0;

  Objective as_function() const {
    return [this](std::span<const double> x) { return value(x); };
  }

 protected:
  void check_dim(std::span<const double> x) const;
};

/// f(x) = 1/2 sum_{i in S} a_i x_i^2 with |S| = s and a_i > 0.
class SparseQuadric final : public SyntheticObjective {
 public:
  SparseQuadric(std::size_t d, std::vector<std::size_t> support, std::vector<double> coeffs);
  /// Support drawn uniformly without replacement; all coefficients equal `coeff`.
  static SparseQuadric random(std::size_t d, std::size_t s, Prng& rng, double coeff = 1.0);

  std::string_view name() const noexcept override { return "sparse-quadric"; }
  std::size_t dim() const noexcept override { return d_; }
  double value(std::span<const double> x) const override;
  SparseVector gradient(std::span<const double> x) const override;
  double l_max() const noexcept override;

  std::span<const std::size_t> support() const noexcept { return support_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  /// Induced l1 norm (max column sum) of the block-j Hessian: the largest a_i
  /// in block j, or 0 if the block holds no support index. Constant in x.
  double block_hessian_norm1(const BlockPartition& p, std::size_t j) const;

 private:
  std::size_t d_;
  std::vector<std::size_t> support_;  // sorted
  std::vector<double> coeffs_;
};

/// f(x) = 1/2 sum of the s largest x_i^2. The active set moves with x;
/// ties are broken towards the lower index.
class MaxSSumSquared final : public SyntheticObjective {
 public:
  MaxSSumSquared(std::size_t d, std::size_t s);

  std::string_view name() const noexcept override { return "max-s-sum-squared"; }
  std::size_t dim() const noexcept override { return d_; }
  double value(std::span<const double> x) const override;
  SparseVector gradient(std::span<const double> x) const override;
  double l_max() const noexcept override { return 1.0; }

  std::size_t sparsity() const noexcept { return s_; }

 private:
  std::size_t d_;
  std::size_t s_;
};

struct ObjectiveParams {
  std::size_t d = 0;
  std::size_t s = 0;
  double coeff = 1.0;
};

/// Names accepted by make_objective.
std::vector<std::string> objective_names();

/// Builds a registered objective, drawing any random parts from `rng`
/// (normally the `objective` substream).
std::unique_ptr<SyntheticObjective> make_objective(std::string_view name,
                                                   const ObjectiveParams& params, Prng& rng);

}  // namespace zobcd
