#include "zobcd/sampling.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <string>

namespace zobcd {

namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwBuffer {
  explicit FftwBuffer(std::size_t count)
      : data(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1)))) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  T* data;
};

// Per-thread transform scratch, grown on demand. Buffers from fftw_malloc share
// the alignment the plans were made with, so new-array execution is valid.
struct FftwScratch {
  std::size_t capacity = 0;
  double* real = nullptr;
  fftw_complex* freq = nullptr;
  std::vector<double> in, out;

  void reserve(std::size_t n) {
    if (n <= capacity) return;
    release();
    real = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    freq = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    if (!real || !freq) {
      release();
      throw std::bad_alloc();
    }
    capacity = n;
  }
  void release() {
    fftw_free(real);
    fftw_free(freq);
    real = nullptr;
    freq = nullptr;
    capacity = 0;
  }
  ~FftwScratch() { release(); }
};

FftwScratch& scratch() {
  thread_local FftwScratch s;
  return s;
}

void check_omega(const std::vector<std::size_t>& omega, std::size_t n) {
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega[i] >= n) throw ConfigError("circulant row index out of range");
    if (i > 0 && omega[i] <= omega[i - 1]) {
      throw ConfigError("circulant row set must be sorted and distinct");
    }
  }
}

}  // namespace

struct SampleEnsemble::CirculantData {
  std::vector<double> generator;
  std::size_t spectrum_size = 0;
  fftw_complex* spectrum = nullptr;  // DFT of the generator
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit CirculantData(std::vector<double> gen) : generator(std::move(gen)) {
    const std::size_t n = generator.size();
    if (n < fft_threshold) return;
    spectrum_size = n / 2 + 1;
    spectrum = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * spectrum_size));
    FftwBuffer<double> real(n);
    const int len = static_cast<int>(n);
    {
      std::lock_guard lock(fftw_planner_mutex());
      forward = fftw_plan_dft_r2c_1d(len, real.data, spectrum, FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_1d(len, spectrum, real.data, FFTW_ESTIMATE);
    }
    std::copy(generator.begin(), generator.end(), real.data);
    fftw_execute_dft_r2c(forward, real.data, spectrum);
  }

  ~CirculantData() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (spectrum) fftw_free(spectrum);
  }

  CirculantData(const CirculantData&) = delete;
  CirculantData& operator=(const CirculantData&) = delete;
};

SampleEnsemble SampleEnsemble::rademacher(std::size_t m, std::size_t n, Prng& rng) {
  if (m == 0 || n == 0) throw ConfigError("Rademacher ensemble needs m >= 1 and n >= 1");
  std::vector<std::int8_t> signs(m * n);
  std::size_t k = 0;
  while (k < signs.size()) {
    std::uint64_t bits = rng();
    for (int b = 0; b < 64 && k < signs.size(); ++b, ++k) {
      signs[k] = (bits & 1u) ? std::int8_t{1} : std::int8_t{-1};
      bits >>= 1;
    }
  }
  return rademacher_from_signs(m, n, std::move(signs));
}

SampleEnsemble SampleEnsemble::rademacher_from_signs(std::size_t m, std::size_t n,
                                                     std::vector<std::int8_t> signs) {
  if (m == 0 || n == 0) throw ConfigError("Rademacher ensemble needs m >= 1 and n >= 1");
  if (signs.size() != m * n) throw ConfigError("sign table has the wrong size");
  for (auto s : signs) {
    if (s != 1 && s != -1) throw ConfigError("Rademacher entries must be +1 or -1");
  }
  SampleEnsemble z;
  z.kind_ = EnsembleKind::dense_rademacher;
  z.m_ = m;
  z.n_ = n;
  z.stride_ = n;
  z.signs_ = std::make_shared<const std::vector<std::int8_t>>(std::move(signs));
  return z;
}

SampleEnsemble SampleEnsemble::partial_circulant(std::size_t m, std::size_t n, Prng& generator_rng,
                                                 Prng& row_rng) {
  if (m == 0 || n == 0) throw ConfigError("circulant ensemble needs m >= 1 and n >= 1");
  if (m > n) {
    throw ConfigError("circulant ensemble cannot have more rows (" + std::to_string(m) +
                      ") than columns (" + std::to_string(n) + ")");
  }
  std::vector<double> generator(n);
  for (auto& g : generator) g = generator_rng.rademacher();

  return partial_circulant(std::move(generator), random_row_set(m, n, row_rng));
}

std::vector<std::size_t> random_row_set(std::size_t m, std::size_t n, Prng& rng) {
  if (m > n) throw ConfigError("cannot draw more distinct rows than available");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(pool[i], pool[i + rng.below(n - i)]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

SampleEnsemble SampleEnsemble::partial_circulant(std::vector<double> generator,
                                                 std::vector<std::size_t> omega) {
  const std::size_t n = generator.size();
  if (n == 0 || omega.empty()) throw ConfigError("circulant ensemble needs m >= 1 and n >= 1");
  if (omega.size() > n) throw ConfigError("circulant ensemble cannot have more rows than columns");
  if (!all_finite(generator)) throw ConfigError("circulant generator must be finite");
  check_omega(omega, n);
  SampleEnsemble z;
  z.kind_ = EnsembleKind::partial_circulant;
  z.m_ = omega.size();
  z.n_ = n;
  z.circulant_ = std::make_shared<const CirculantData>(std::move(generator));
  z.omega_ = std::move(omega);
  return z;
}

double SampleEnsemble::scale() const noexcept { return 1.0 / std::sqrt(static_cast<double>(m_)); }

std::span<const double> SampleEnsemble::generator() const noexcept {
  if (!circulant_) return {};
  return circulant_->generator;
}

std::size_t SampleEnsemble::storage_scalars() const noexcept {
  if (kind_ == EnsembleKind::dense_rademacher) return signs_->size();
  return circulant_->generator.size() + 2 * circulant_->spectrum_size + omega_.size();
}

void SampleEnsemble::check_apply(std::size_t in, std::size_t out) const {
  if (in != n_ || out != m_) {
    throw ContractError("apply: expected input " + std::to_string(n_) + " / output " +
                        std::to_string(m_) + ", got " + std::to_string(in) + " / " +
                        std::to_string(out));
  }
}

void SampleEnsemble::check_adjoint(std::size_t in, std::size_t out) const {
  if (in != m_ || out != n_) {
    throw ContractError("adjoint: expected input " + std::to_string(m_) + " / output " +
                        std::to_string(n_) + ", got " + std::to_string(in) + " / " +
                        std::to_string(out));
  }
}

void SampleEnsemble::correlate(std::span<const double> w, std::span<double> r) const {
  const auto& z = circulant_->generator;
  const std::size_t n = z.size();
  if (n < fft_threshold) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        std::size_t k = i + j;
        if (k >= n) k -= n;
        acc += w[j] * z[k];
      }
      r[i] = acc;
    }
    return;
  }
  // R_k = conj(W_k) * Z_k for real w.
  const std::size_t half = circulant_->spectrum_size;
  auto& ws = scratch();
  ws.reserve(n);
  double* real = ws.real;
  fftw_complex* freq = ws.freq;
  std::copy(w.begin(), w.end(), real);
  fftw_execute_dft_r2c(circulant_->forward, real, freq);
  const fftw_complex* gz = circulant_->spectrum;
  for (std::size_t k = 0; k < half; ++k) {
    const double wr = freq[k][0];
    const double wi = -freq[k][1];
    const double zr = gz[k][0];
    const double zi = gz[k][1];
    freq[k][0] = wr * zr - wi * zi;
    freq[k][1] = wr * zi + wi * zr;
  }
  fftw_execute_dft_c2r(circulant_->backward, freq, real);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = real[i] * inv_n;
}

void SampleEnsemble::apply(std::span<const double> v, std::span<double> out) const {
  check_apply(v.size(), out.size());
  const double c = scale();
  if (kind_ == EnsembleKind::dense_rademacher) {
    const std::int8_t* base = signs_->data();
    for (std::size_t i = 0; i < m_; ++i) {
      const std::int8_t* row = base + i * stride_;
      double acc = 0.0;
      for (std::size_t j = 0; j < n_; ++j) acc += row[j] * v[j];
      out[i] = c * acc;
    }
    return;
  }
  const std::size_t full = circulant_->generator.size();
  auto& ws = scratch();
  ws.in.assign(full, 0.0);
  std::copy(v.begin(), v.end(), ws.in.begin());
  ws.out.resize(full);
  correlate(ws.in, ws.out);
  for (std::size_t t = 0; t < m_; ++t) out[t] = c * ws.out[omega_[t]];
}

Vector SampleEnsemble::apply(std::span<const double> v) const {
  Vector out(m_);
  apply(v, out);
  return out;
}

void SampleEnsemble::adjoint(std::span<const double> y, std::span<double> out) const {
  check_adjoint(y.size(), out.size());
  const double c = scale();
  if (kind_ == EnsembleKind::dense_rademacher) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::int8_t* base = signs_->data();
    for (std::size_t i = 0; i < m_; ++i) {
      const std::int8_t* row = base + i * stride_;
      const double yi = c * y[i];
      for (std::size_t j = 0; j < n_; ++j) out[j] += yi * row[j];
    }
    return;
  }
  // The full circulant C_{ij} = z_{i+j} is symmetric, so C^T scatter(y) = C scatter(y).
  const std::size_t full = circulant_->generator.size();
  auto& ws = scratch();
  ws.in.assign(full, 0.0);
  for (std::size_t t = 0; t < m_; ++t) ws.in[omega_[t]] = y[t];
  ws.out.resize(full);
  correlate(ws.in, ws.out);
  for (std::size_t j = 0; j < n_; ++j) out[j] = c * ws.out[j];
}

Vector SampleEnsemble::adjoint(std::span<const double> y) const {
  Vector out(n_);
  adjoint(y, out);
  return out;
}

void SampleEnsemble::apply_columns(std::span<const std::size_t> support, std::span<const double> w,
                                   std::span<double> out) const {
  if (support.size() != w.size() || out.size() != m_) {
    throw ContractError("apply_columns: size mismatch");
  }
  for (auto col : support) {
    if (col >= n_) throw ContractError("apply_columns: column index out of range");
  }
  const double c = scale();
  if (kind_ == EnsembleKind::dense_rademacher) {
    const std::int8_t* base = signs_->data();
    for (std::size_t i = 0; i < m_; ++i) {
      const std::int8_t* row = base + i * stride_;
      double acc = 0.0;
      for (std::size_t k = 0; k < support.size(); ++k) acc += row[support[k]] * w[k];
      out[i] = c * acc;
    }
    return;
  }
  const auto& z = circulant_->generator;
  const std::size_t full = z.size();
  for (std::size_t t = 0; t < m_; ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      std::size_t idx = omega_[t] + support[k];
      if (idx >= full) idx -= full;
      acc += z[idx] * w[k];
    }
    out[t] = c * acc;
  }
}

void SampleEnsemble::adjoint_columns(std::span<const std::size_t> support,
                                     std::span<const double> y, std::span<double> out) const {
  if (support.size() != out.size() || y.size() != m_) {
    throw ContractError("adjoint_columns: size mismatch");
  }
  for (auto col : support) {
    if (col >= n_) throw ContractError("adjoint_columns: column index out of range");
  }
  const double c = scale();
  std::fill(out.begin(), out.end(), 0.0);
  if (kind_ == EnsembleKind::dense_rademacher) {
    const std::int8_t* base = signs_->data();
    for (std::size_t i = 0; i < m_; ++i) {
      const std::int8_t* row = base + i * stride_;
      for (std::size_t k = 0; k < support.size(); ++k) out[k] += row[support[k]] * y[i];
    }
  } else {
    const auto& z = circulant_->generator;
    const std::size_t full = z.size();
    for (std::size_t t = 0; t < m_; ++t) {
      for (std::size_t k = 0; k < support.size(); ++k) {
        std::size_t idx = omega_[t] + support[k];
        if (idx >= full) idx -= full;
        out[k] += z[idx] * y[t];
      }
    }
  }
  for (auto& o : out) o *= c;
}

Vector SampleEnsemble::gather_columns(std::span<const std::size_t> support) const {
  for (auto col : support) {
    if (col >= n_) throw ContractError("gather_columns: column index out of range");
  }
  const std::size_t k = support.size();
  const double c = scale();
  Vector out(m_ * k);
  if (kind_ == EnsembleKind::dense_rademacher) {
    const std::int8_t* base = signs_->data();
    for (std::size_t i = 0; i < m_; ++i) {
      const std::int8_t* row = base + i * stride_;
      double* dst = out.data() + i * k;
      for (std::size_t q = 0; q < k; ++q) dst[q] = c * row[support[q]];
    }
    return out;
  }
  const auto& z = circulant_->generator;
  const std::size_t full = z.size();
  for (std::size_t t = 0; t < m_; ++t) {
    double* dst = out.data() + t * k;
    for (std::size_t q = 0; q < k; ++q) {
      std::size_t idx = omega_[t] + support[q];
      if (idx >= full) idx -= full;
      dst[q] = c * z[idx];
    }
  }
  return out;
}

void SampleEnsemble::direction(std::size_t i, std::span<double> out) const {
  if (i >= m_ || out.size() != n_) throw ContractError("direction: bad row or output size");
  if (kind_ == EnsembleKind::dense_rademacher) {
    const std::int8_t* row = signs_->data() + i * stride_;
    for (std::size_t j = 0; j < n_; ++j) out[j] = row[j];
    return;
  }
  const auto& z = circulant_->generator;
  const std::size_t full = z.size();
  std::size_t idx = omega_[i];
  for (std::size_t j = 0; j < n_; ++j) {
    out[j] = z[idx];
    if (++idx == full) idx = 0;
  }
}

double SampleEnsemble::entry(std::size_t i, std::size_t j) const {
  if (i >= m_ || j >= n_) throw ContractError("entry: index out of range");
  if (kind_ == EnsembleKind::dense_rademacher) return (*signs_)[i * stride_ + j];
  const auto& z = circulant_->generator;
  return z[(omega_[i] + j) % z.size()];
}

SampleEnsemble SampleEnsemble::truncated(std::size_t n) const {
  if (n == 0 || n > n_) throw ConfigError("truncation must keep between 1 and cols() columns");
  SampleEnsemble z = *this;
  z.n_ = n;
  return z;
}

SampleEnsemble SampleEnsemble::with_rows(std::vector<std::size_t> omega) const {
  if (kind_ != EnsembleKind::partial_circulant) {
    throw ConfigError("with_rows applies to circulant ensembles only");
  }
  if (omega.empty()) throw ConfigError("circulant ensemble needs at least one row");
  check_omega(omega, circulant_->generator.size());
  SampleEnsemble z = *this;
  z.m_ = omega.size();
  z.omega_ = std::move(omega);
  return z;
}

SampleEnsemble SampleEnsemble::select_rows(std::span<const std::size_t> rows) const {
  if (rows.empty()) throw ConfigError("row selection must be non-empty");
  std::vector<std::int8_t> signs;
  signs.reserve(rows.size() * n_);
  for (auto i : rows) {
    if (i >= m_) throw ConfigError("row selection index out of range");
    for (std::size_t j = 0; j < n_; ++j) {
      const double e = entry(i, j);
      if (e != 1.0 && e != -1.0) throw ConfigError("row selection needs +-1 entries");
      signs.push_back(e > 0 ? 1 : -1);
    }
  }
  return rademacher_from_signs(rows.size(), n_, std::move(signs));
}

std::size_t required_rows(EnsembleKind kind, std::size_t s, std::size_t n, double b1, double b3) {
  if (s == 0 || n == 0) throw ConfigError("required_rows needs s >= 1 and n >= 1");
  if (s > n) {
    throw ConfigError("sparsity " + std::to_string(s) + " exceeds block dimension " +
                      std::to_string(n));
  }
  const double ln_n = std::log(static_cast<double>(n));
  const double sd = static_cast<double>(s);
  double raw = 0.0;
  if (kind == EnsembleKind::dense_rademacher) {
    if (!(b1 > 0.0)) throw ConfigError("b1 must be positive");
    raw = b1 * sd * ln_n;
  } else {
    if (!(b3 > 0.0)) throw ConfigError("b3 must be positive");
    const double ln_s = std::log(std::max(sd, 2.0));
    raw = b3 * sd * ln_s * ln_s * ln_n * ln_n;
  }
  auto m = static_cast<std::size_t>(std::ceil(raw));
  m = std::max(m, s + 1);
  return std::min(m, n);
}

}  // namespace zobcd
