#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "zobcd/core.hpp"
#include "zobcd/sampling.hpp"
#include "zobcd/sparse_recovery.hpp"

namespace zobcd {

/// Assignment of d coordinates to J blocks through a permutation: block j owns
/// the ambient coordinates perm[offset_j], ..., perm[offset_j + size_j - 1].
class BlockPartition {
 public:
  /// Validates that `perm` is a bijection on [0, d) and sizes sum to d.
  BlockPartition(std::vector<std::size_t> perm, std::vector<std::size_t> block_sizes);

  /// Contiguous blocks in natural order, near-equal sizes.
  static BlockPartition identity(std::size_t d, std::size_t num_blocks);

  std::size_t dim() const noexcept { return perm_.size(); }
  std::size_t num_blocks() const noexcept { return sizes_.size(); }
  std::size_t block_size(std::size_t j) const;
  std::size_t max_block_size() const noexcept;
  /// Ambient coordinates of block j, in partition order.
  std::span<const std::size_t> block(std::size_t j) const;
  /// Block owning ambient coordinate i.
  std::size_t owner(std::size_t i) const { return owner_.at(i); }

  std::span<const std::size_t> permutation() const noexcept { return perm_; }
  std::span<const std::size_t> sizes() const noexcept { return sizes_; }

  friend bool operator==(const BlockPartition& a, const BlockPartition& b) {
    return a.perm_ == b.perm_ && a.sizes_ == b.sizes_;
  }

 private:
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> owner_;
};

/// Near-equal block sizes: floor(d/J) or ceil(d/J), the first (d mod J) blocks larger.
std::vector<std::size_t> equal_block_sizes(std::size_t d, std::size_t num_blocks);

/// Uniformly random permutation (Fisher-Yates) split into near-equal blocks.
BlockPartition random_partition(std::size_t d, std::size_t num_blocks, Prng& rng);

/// x^(j): the block-j coordinates of x in partition order.
Vector restrict_block(std::span<const double> x, const BlockPartition& p, std::size_t j);
/// U^(j) t: ambient vector with t on block j and zeros elsewhere.
Vector lift(std::span<const double> t, const BlockPartition& p, std::size_t j);
/// x += scale * U^(j) t, touching only block-j coordinates.
void add_lifted(std::span<double> x, std::span<const double> t, const BlockPartition& p,
                std::size_t j, double scale = 1.0);
void add_lifted(std::span<double> x, const SparseVector& t, const BlockPartition& p,
                std::size_t j, double scale = 1.0);

/// Number of nonzeros of g in each block.
std::vector<std::size_t> block_sparsity_histogram(const SparseVector& g, const BlockPartition& p);

/// Upper bound 2 J exp(-delta^2 s / (3 J)) on the probability that some block
/// holds more than (1 + delta) s / J of the s nonzeros.
double equisparsity_failure_bound(std::size_t num_blocks, std::size_t s, double delta);

/// Fresh random partition when `period` is set and k is a positive multiple of it.
BlockPartition reshuffle_if_due(const BlockPartition& p, std::size_t k,
                                std::optional<std::size_t> period, Prng& rng);

/// Per-block sparsity target ceil(factor * s / J).
std::size_t block_sparsity(std::size_t s, std::size_t num_blocks, double factor = 1.1);

/// Row count m^(j) = ceil(b1 * s_j * ln(d / J)) for user-defined unequal blocks.
std::size_t unequal_block_rows(double b1, std::size_t block_s, std::size_t d,
                               std::size_t num_blocks);

/// Master Rademacher directions shared by unequally sized blocks: m_max rows of
/// length d_max. A block of size d_j uses m_j rows (chosen without replacement)
/// truncated to their first d_j entries.
class SharedDirections {
 public:
  SharedDirections(std::size_t m_max, std::size_t d_max, Prng& rng);
  explicit SharedDirections(SampleEnsemble master);

  std::size_t max_rows() const noexcept { return master_.rows(); }
  std::size_t max_cols() const noexcept { return master_.cols(); }
  const SampleEnsemble& master() const noexcept { return master_; }

  /// Directions for block j of `p`, using `rows` master rows drawn from `rng`.
  SampleEnsemble for_block(std::size_t j, const BlockPartition& p, std::size_t rows,
                           Prng& rng) const;

 private:
  SampleEnsemble master_;
};

}  // namespace zobcd
