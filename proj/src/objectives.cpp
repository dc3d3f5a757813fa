#include "zobcd/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace zobcd {

void SyntheticObjective::check_dim(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw ContractError(std::string(name()) + ": expected dimension " + std::to_string(dim()) +
                        ", got " + std::to_string(x.size()));
  }
}

SparseQuadric::SparseQuadric(std::size_t d, std::vector<std::size_t> support,
                             std::vector<double> coeffs)
    : d_(d), support_(std::move(support)), coeffs_(std::move(coeffs)) {
  if (d_ == 0) throw ConfigError("sparse-quadric: dimension must be positive");
  if (support_.empty() || support_.size() > d_) {
    throw ConfigError("sparse-quadric: support size must lie in [1, d]");
  }
  if (coeffs_.size() != support_.size()) {
    throw ConfigError("sparse-quadric: one coefficient per support index");
  }
  for (double a : coeffs_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("sparse-quadric: coefficients must be > 0");
  }
  std::vector<std::size_t> order(support_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support_[a] < support_[b]; });
  std::vector<std::size_t> s_sorted;
  std::vector<double> c_sorted;
  for (auto o : order) {
    if (support_[o] >= d_) throw ConfigError("sparse-quadric: support index out of range");
    if (!s_sorted.empty() && s_sorted.back() == support_[o]) {
      throw ConfigError("sparse-quadric: duplicate support index");
    }
    s_sorted.push_back(support_[o]);
    c_sorted.push_back(coeffs_[o]);
  }
  support_ = std::move(s_sorted);
  coeffs_ = std::move(c_sorted);
}

SparseQuadric SparseQuadric::random(std::size_t d, std::size_t s, Prng& rng, double coeff) {
  if (s == 0 || s > d) throw ConfigError("sparse-quadric: sparsity must lie in [1, d]");
  std::vector<std::size_t> pool(d);
  for (std::size_t i = 0; i < d; ++i) pool[i] = i;
  for (std::size_t i = 0; i < s; ++i) std::swap(pool[i], pool[i + rng.below(d - i)]);
  pool.resize(s);
  return SparseQuadric(d, std::move(pool), std::vector<double>(s, coeff));
}

double SparseQuadric::value(std::span<const double> x) const {
  check_dim(x);
  double acc = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const double xi = x[support_[k]];
    acc += coeffs_[k] * xi * xi;
  }
  return 0.5 * acc;
}

SparseVector SparseQuadric::gradient(std::span<const double> x) const {
  check_dim(x);
  std::vector<SparseVector::Entry> entries;
  entries.reserve(support_.size());
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const double g = coeffs_[k] * x[support_[k]];
    if (g != 0.0) entries.push_back({support_[k], g});
  }
  return SparseVector(d_, std::move(entries));
}

double SparseQuadric::l_max() const noexcept {
  return *std::max_element(coeffs_.begin(), coeffs_.end());
}

double SparseQuadric::block_hessian_norm1(const BlockPartition& p, std::size_t j) const {
  if (p.dim() != d_) throw ContractError("sparse-quadric: partition dimension mismatch");
  if (j >= p.num_blocks()) throw ContractError("sparse-quadric: block index out of range");
  double best = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    if (p.owner(support_[k]) == j) best = std::max(best, coeffs_[k]);
  }
  return best;
}

MaxSSumSquared::MaxSSumSquared(std::size_t d, std::size_t s) : d_(d), s_(s) {
  if (d_ == 0 || s_ == 0 || s_ > d_) throw ConfigError("max-s-sum-squared: need 1 <= s <= d");
}

double MaxSSumSquared::value(std::span<const double> x) const {
  check_dim(x);
  thread_local Vector squares;
  squares.resize(d_);
  for (std::size_t i = 0; i < d_; ++i) squares[i] = x[i] * x[i];
  if (s_ < d_) {
    std::nth_element(squares.begin(), squares.begin() + static_cast<std::ptrdiff_t>(s_),
                     squares.end(), std::greater<>());
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < s_; ++i) acc += squares[i];
  return 0.5 * acc;
}

SparseVector MaxSSumSquared::gradient(std::span<const double> x) const {
  check_dim(x);
  std::vector<SparseVector::Entry> entries;
  for (auto i : top_k_magnitude(x, s_)) entries.push_back({i, x[i]});
  return SparseVector(d_, std::move(entries));
}

std::vector<std::string> objective_names() { return {"sparse-quadric", "max-s-sum-squared"}; }

std::unique_ptr<SyntheticObjective> make_objective(std::string_view name,
                                                   const ObjectiveParams& params, Prng& rng) {
  if (name == "sparse-quadric") {
    return std::make_unique<SparseQuadric>(
        SparseQuadric::random(params.d, params.s, rng, params.coeff));
  }
  if (name == "max-s-sum-squared") {
    return std::make_unique<MaxSSumSquared>(params.d, params.s);
  }
  throw ConfigError("unknown objective '" + std::string(name) + "'");
}

}  // namespace zobcd
