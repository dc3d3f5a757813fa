#include "zobcd/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zobcd {

SparseVector::SparseVector(std::size_t dim, std::vector<Entry> entries, std::size_t budget)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() > budget) {
    throw ContractError("sparse vector exceeds its sparsity budget");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].index >= dim_) throw ContractError("sparse vector index out of range");
    if (i > 0 && entries_[i].index <= entries_[i - 1].index) {
      throw ContractError("sparse vector indices must be strictly increasing");
    }
  }
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) entries.push_back({i, dense[i]});
  }
  return SparseVector(dense.size(), std::move(entries));
}

std::vector<std::size_t> SparseVector::support() const {
  std::vector<std::size_t> idx;
  idx.reserve(entries_.size());
  for (const auto& e : entries_) idx.push_back(e.index);
  return idx;
}

Vector SparseVector::to_dense() const {
  Vector out(dim_, 0.0);
  for (const auto& e : entries_) out[e.index] = e.value;
  return out;
}

double SparseVector::norm() const noexcept {
  double acc = 0.0;
  for (const auto& e : entries_) acc += e.value * e.value;
  return std::sqrt(acc);
}

void CosampConfig::validate() const {
  if (s == 0) throw ConfigError("CoSaMP sparsity must be at least 1");
  if (n_iters == 0) throw ConfigError("CoSaMP needs at least one iteration");
  if (lsq_max_iters == 0) throw ConfigError("least-squares solver needs at least one iteration");
  if (!(lsq_tol >= 0.0)) throw ConfigError("least-squares tolerance must be non-negative");
}

namespace {

template <class Magnitude>
std::vector<std::size_t> select_top(std::vector<std::size_t> candidates, std::size_t k,
                                    Magnitude mag) {
  auto larger = [&](std::size_t a, std::size_t b) {
    const double ma = mag(a);
    const double mb = mag(b);
    return ma > mb || (ma == mb && a < b);
  };
  if (candidates.size() > k) {
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                     candidates.end(), larger);
    candidates.resize(k);
  }
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

}  // namespace

std::vector<std::size_t> top_k_magnitude(std::span<const double> v, std::size_t k) {
  if (k == 0) return {};
  std::vector<std::size_t> nz;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) nz.push_back(i);
  }
  return select_top(std::move(nz), k, [&](std::size_t i) { return std::abs(v[i]); });
}

std::vector<std::size_t> top_k_magnitude(const SparseVector& v, std::size_t k) {
  if (k == 0) return {};
  std::vector<std::size_t> pos;
  for (std::size_t p = 0; p < v.entries().size(); ++p) {
    if (v.entries()[p].value != 0.0) pos.push_back(p);
  }
  // Positions are ordered like indices, so tie-breaking on position is tie-breaking on index.
  auto chosen = select_top(std::move(pos), k,
                           [&](std::size_t p) { return std::abs(v.entries()[p].value); });
  for (auto& p : chosen) p = v.entries()[p].index;
  return chosen;
}

LsqResult restricted_lsq(const SampleEnsemble& z, std::span<const double> y,
                         std::span<const std::size_t> support, std::size_t max_iters, double tol,
                         std::span<const double> initial, bool quiet) {
  if (y.size() != z.rows()) throw ContractError("restricted_lsq: measurement size mismatch");
  LsqResult result;
  const std::size_t k = support.size();
  if (k == 0) return result;
  if (!initial.empty() && initial.size() != k) {
    throw ContractError("restricted_lsq: warm start size mismatch");
  }
  if (k > z.rows() && !quiet) {
    warn("restricted least squares on " + std::to_string(k) + " columns with only " +
         std::to_string(z.rows()) + " rows");
  }

  const std::size_t m = z.rows();
  const Vector a = z.gather_columns(support);
  auto apply = [&](std::span<const double> w, Vector& out) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = a.data() + i * k;
      double acc = 0.0;
      for (std::size_t q = 0; q < k; ++q) acc += row[q] * w[q];
      out[i] = acc;
    }
  };
  auto adjoint = [&](std::span<const double> v, Vector& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = a.data() + i * k;
      const double vi = v[i];
      for (std::size_t q = 0; q < k; ++q) out[q] += row[q] * vi;
    }
  };

  Vector x(k, 0.0);
  if (!initial.empty()) std::copy(initial.begin(), initial.end(), x.begin());

  Vector s0(k);
  adjoint(y, s0);
  const double rhs_norm = norm2(s0);
  if (rhs_norm == 0.0) {
    result.values.assign(k, 0.0);
    return result;
  }

  Vector r(y.begin(), y.end());
  Vector q(m);
  if (!initial.empty()) {
    apply(x, q);
    for (std::size_t i = 0; i < m; ++i) r[i] -= q[i];
  }
  const double r_start = norm2(r);
  Vector s(k);
  adjoint(r, s);
  Vector p = s;
  double gamma = dot(s, s);

  std::size_t it = 0;
  double rel = std::sqrt(gamma) / rhs_norm;
  while (it < max_iters && rel > tol) {
    apply(p, q);
    const double qq = dot(q, q);
    if (qq == 0.0) break;
    const double step = gamma / qq;
    for (std::size_t i = 0; i < k; ++i) x[i] += step * p[i];
    for (std::size_t i = 0; i < m; ++i) r[i] -= step * q[i];
    ++it;

    const double r_norm = norm2(r);
    if (!std::isfinite(r_norm) || r_norm > 10.0 * r_start + 1e-300) {
      throw NumericalError("restricted least squares diverged at iteration " + std::to_string(it));
    }
    adjoint(r, s);
    const double gamma_next = dot(s, s);
    rel = std::sqrt(gamma_next) / rhs_norm;
    const double beta = gamma_next / gamma;
    gamma = gamma_next;
    for (std::size_t i = 0; i < k; ++i) p[i] = s[i] + beta * p[i];
  }
  result.values = std::move(x);
  result.iterations = it;
  result.relative_residual = rel;
  return result;
}

namespace {

SparseVector prune(const std::vector<std::size_t>& support, const Vector& values, std::size_t s,
                   std::size_t n) {
  Vector dense_on_support(values);
  auto keep = top_k_magnitude(dense_on_support, s);  // positions within support
  std::vector<SparseVector::Entry> entries;
  entries.reserve(keep.size());
  for (auto p : keep) entries.push_back({support[p], values[p]});
  return SparseVector(n, std::move(entries), s);
}

double residual_into(const SampleEnsemble& z, std::span<const double> y, const SparseVector& x,
                     Vector& r) {
  const auto supp = x.support();
  Vector vals;
  vals.reserve(x.nnz());
  for (const auto& e : x.entries()) vals.push_back(e.value);
  r.assign(y.begin(), y.end());
  if (!supp.empty()) {
    Vector zx(z.rows());
    z.apply_columns(supp, vals, zx);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= zx[i];
  }
  return norm2(r);
}

}  // namespace

SparseVector cosamp(const SampleEnsemble& z, std::span<const double> y, const CosampConfig& cfg,
                    const CosampObserver& observer) {
  cfg.validate();
  const std::size_t n = z.cols();
  if (y.size() != z.rows()) throw ContractError("cosamp: measurement size mismatch");
  if (cfg.s > n) throw ConfigError("cosamp: sparsity exceeds the number of columns");
  if (!all_finite(y)) throw NumericalError("cosamp: non-finite measurements");

  const double y_norm = norm2(y);
  if (y_norm == 0.0) return SparseVector(n);
  const double tol = cfg.residual_tol >= 0.0 ? cfg.residual_tol : 1e-12 * y_norm;

  if (2 * cfg.s >= n) {
    if (!cfg.quiet) warn("sparsity " + std::to_string(cfg.s) + " is at least half of " + std::to_string(n) +
         " columns; using full least squares");
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    auto full = restricted_lsq(z, y, all, std::max(cfg.lsq_max_iters, n), cfg.lsq_tol, {}, cfg.quiet);
    if (!all_finite(full.values)) throw NumericalError("cosamp: non-finite full least squares");
    auto x = prune(all, full.values, cfg.s, n);
    if (x.nnz() < n) {
      auto supp = x.support();
      Vector warm;
      for (const auto& e : x.entries()) warm.push_back(e.value);
      auto refit = restricted_lsq(z, y, supp, std::max(cfg.lsq_max_iters, supp.size()),
                                  cfg.lsq_tol, warm, cfg.quiet);
      std::vector<SparseVector::Entry> entries;
      for (std::size_t i = 0; i < supp.size(); ++i) entries.push_back({supp[i], refit.values[i]});
      x = SparseVector(n, std::move(entries), cfg.s);
    }
    Vector r;
    const double rn = residual_into(z, y, x, r);
    if (observer) observer({1, x, rn});
    return x;
  }

  SparseVector x(n);
  Vector r(y.begin(), y.end());
  Vector proxy(n);
  for (std::size_t it = 1; it <= cfg.n_iters; ++it) {
    z.adjoint(r, proxy);
    if (!all_finite(proxy)) {
      throw NumericalError("cosamp: non-finite proxy at iteration " + std::to_string(it));
    }
    auto identified = top_k_magnitude(proxy, 2 * cfg.s);
    if (identified.empty()) break;

    std::vector<std::size_t> merged;
    const auto current = x.support();
    merged.reserve(identified.size() + current.size());
    std::set_union(identified.begin(), identified.end(), current.begin(), current.end(),
                   std::back_inserter(merged));

    Vector warm(merged.size(), 0.0);
    {
      std::size_t p = 0;
      for (const auto& e : x.entries()) {
        while (merged[p] != e.index) ++p;
        warm[p] = e.value;
      }
    }
    auto fit = restricted_lsq(z, y, merged, cfg.lsq_max_iters, cfg.lsq_tol, warm, cfg.quiet);
    x = prune(merged, fit.values, cfg.s, n);

    const double r_norm = residual_into(z, y, x, r);
    if (!std::isfinite(r_norm)) {
      throw NumericalError("cosamp: non-finite residual at iteration " + std::to_string(it));
    }
    if (observer) observer({it, x, r_norm});
    if (r_norm <= tol) break;
  }
  return x;
}

}  // namespace zobcd
