#include "zobcd/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace zobcd {

BlockPartition::BlockPartition(std::vector<std::size_t> perm, std::vector<std::size_t> block_sizes)
    : perm_(std::move(perm)), sizes_(std::move(block_sizes)) {
  const std::size_t d = perm_.size();
  if (d == 0 || sizes_.empty()) throw ConfigError("partition needs d >= 1 and J >= 1");
  if (std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0}) != d) {
    throw ConfigError("block sizes must sum to the dimension");
  }
  owner_.assign(d, sizes_.size());
  offsets_.resize(sizes_.size() + 1, 0);
  for (std::size_t j = 0; j < sizes_.size(); ++j) {
    if (sizes_[j] == 0) throw ConfigError("blocks must be non-empty");
    offsets_[j + 1] = offsets_[j] + sizes_[j];
    for (std::size_t k = offsets_[j]; k < offsets_[j + 1]; ++k) {
      const std::size_t i = perm_[k];
      if (i >= d || owner_[i] != sizes_.size()) {
        throw ConfigError("partition permutation is not a bijection");
      }
      owner_[i] = j;
    }
  }
}

BlockPartition BlockPartition::identity(std::size_t d, std::size_t num_blocks) {
  auto sizes = equal_block_sizes(d, num_blocks);
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  return BlockPartition(std::move(perm), std::move(sizes));
}

std::size_t BlockPartition::block_size(std::size_t j) const {
  if (j >= sizes_.size()) throw ContractError("block index out of range");
  return sizes_[j];
}

std::size_t BlockPartition::max_block_size() const noexcept {
  return *std::max_element(sizes_.begin(), sizes_.end());
}

std::span<const std::size_t> BlockPartition::block(std::size_t j) const {
  if (j >= sizes_.size()) throw ContractError("block index out of range");
  return std::span<const std::size_t>(perm_).subspan(offsets_[j], sizes_[j]);
}

std::vector<std::size_t> equal_block_sizes(std::size_t d, std::size_t num_blocks) {
  if (num_blocks == 0 || num_blocks > d) {
    throw ConfigError("number of blocks must lie in [1, d]; got J=" + std::to_string(num_blocks) +
                      ", d=" + std::to_string(d));
  }
  std::vector<std::size_t> sizes(num_blocks, d / num_blocks);
  for (std::size_t j = 0; j < d % num_blocks; ++j) ++sizes[j];
  return sizes;
}

BlockPartition random_partition(std::size_t d, std::size_t num_blocks, Prng& rng) {
  auto sizes = equal_block_sizes(d, num_blocks);
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = d; i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.below(i)]);
  }
  return BlockPartition(std::move(perm), std::move(sizes));
}

Vector restrict_block(std::span<const double> x, const BlockPartition& p, std::size_t j) {
  if (x.size() != p.dim()) throw ContractError("restrict: dimension mismatch");
  const auto idx = p.block(j);
  Vector out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = x[idx[k]];
  return out;
}

Vector lift(std::span<const double> t, const BlockPartition& p, std::size_t j) {
  Vector out(p.dim(), 0.0);
  add_lifted(out, t, p, j);
  return out;
}

void add_lifted(std::span<double> x, std::span<const double> t, const BlockPartition& p,
                std::size_t j, double scale) {
  const auto idx = p.block(j);
  if (t.size() != idx.size() || x.size() != p.dim()) {
    throw ContractError("lift: dimension mismatch");
  }
  for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] += scale * t[k];
}

void add_lifted(std::span<double> x, const SparseVector& t, const BlockPartition& p,
                std::size_t j, double scale) {
  const auto idx = p.block(j);
  if (t.dim() != idx.size() || x.size() != p.dim()) {
    throw ContractError("lift: dimension mismatch");
  }
  for (const auto& e : t.entries()) x[idx[e.index]] += scale * e.value;
}

std::vector<std::size_t> block_sparsity_histogram(const SparseVector& g, const BlockPartition& p) {
  if (g.dim() != p.dim()) throw ContractError("histogram: dimension mismatch");
  std::vector<std::size_t> counts(p.num_blocks(), 0);
  for (const auto& e : g.entries()) {
    if (e.value != 0.0) ++counts[p.owner(e.index)];
  }
  return counts;
}

double equisparsity_failure_bound(std::size_t num_blocks, std::size_t s, double delta) {
  const double jb = static_cast<double>(num_blocks);
  return 2.0 * jb * std::exp(-delta * delta * static_cast<double>(s) / (3.0 * jb));
}

BlockPartition reshuffle_if_due(const BlockPartition& p, std::size_t k,
                                std::optional<std::size_t> period, Prng& rng) {
  if (!period) return p;
  if (*period == 0) throw ConfigError("reshuffle period must be at least 1");
  if (k == 0 || k % *period != 0) return p;
  return random_partition(p.dim(), p.num_blocks(), rng);
}

std::size_t block_sparsity(std::size_t s, std::size_t num_blocks, double factor) {
  if (num_blocks == 0) throw ConfigError("number of blocks must be positive");
  if (s == 0) throw ConfigError("sparsity must be at least 1");
  if (!(factor > 0.0)) throw ConfigError("block sparsity factor must be positive");
  const double raw = factor * static_cast<double>(s) / static_cast<double>(num_blocks);
  // Guard against 1.1 * 200 / 5 landing a hair above 44.
  const auto rounded = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::max<std::size_t>(rounded, 1);
}

std::size_t unequal_block_rows(double b1, std::size_t block_s, std::size_t d,
                               std::size_t num_blocks) {
  if (!(b1 > 0.0) || num_blocks == 0 || d < num_blocks) {
    throw ConfigError("unequal_block_rows: invalid arguments");
  }
  const double ratio = static_cast<double>(d) / static_cast<double>(num_blocks);
  return static_cast<std::size_t>(std::ceil(b1 * static_cast<double>(block_s) * std::log(ratio)));
}

SharedDirections::SharedDirections(std::size_t m_max, std::size_t d_max, Prng& rng)
    : master_(SampleEnsemble::rademacher(m_max, d_max, rng)) {}

SharedDirections::SharedDirections(SampleEnsemble master) : master_(std::move(master)) {
  if (master_.kind() != EnsembleKind::dense_rademacher) {
    throw ConfigError("shared directions need a dense Rademacher master");
  }
}

SampleEnsemble SharedDirections::for_block(std::size_t j, const BlockPartition& p,
                                           std::size_t rows, Prng& rng) const {
  const std::size_t dj = p.block_size(j);
  if (dj > master_.cols()) {
    throw ConfigError("block size " + std::to_string(dj) + " exceeds master direction length " +
                      std::to_string(master_.cols()));
  }
  if (rows == 0 || rows > master_.rows()) {
    throw ConfigError("requested rows must lie in [1, m_max]");
  }
  std::vector<std::size_t> pool(master_.rows());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < rows; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  pool.resize(rows);
  return master_.truncated(dj).select_rows(pool);
}

}  // namespace zobcd
