#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zobcd {

/// Dense real vector used for decision variables and gradients.
using Vector = std::vector<double>;

enum class ErrorKind { config, contract, numerical, io };

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Invalid user configuration (bad sizes, negative noise level, unknown names).
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Caller broke a precondition (dimension mismatch, index out of range).
struct ContractError : Error {
  explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

/// Non-finite values or divergence inside a numerical routine.
struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

using WarningHandler = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink (default: stderr). Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

/// Stateless 64-bit finalizer (SplitMix64 output function).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// xoshiro256** generator. All derived draws (uniform, normal, bounded integers)
/// are implemented here rather than through <random> distributions so that
/// sequences are identical across standard libraries.
class Prng {
 public:
  using result_type = std::uint64_t;

  explicit Prng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (one value per call).
  double normal() noexcept;
  /// +1 or -1 with equal probability.
  int rademacher() noexcept;
  /// Unbiased integer in [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::array<std::uint64_t, 4> state_;
};

enum class Stream { partition, directions, omega, block_choice, noise, objective };

std::string_view stream_name(Stream stream) noexcept;
/// Throws ConfigError for names outside the six defined streams.
Stream parse_stream(std::string_view name);

/// Named, independent random substreams derived from one master seed.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t master_seed) noexcept : master_seed_(master_seed) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  /// 64-bit key identifying (master_seed, stream); also used for counter-based draws.
  std::uint64_t key(Stream stream) const noexcept;
  /// Fresh generator; repeated calls reproduce the same sequence.
  Prng substream(Stream stream) const noexcept { return Prng(key(stream)); }
  Prng substream(std::string_view name) const { return substream(parse_stream(name)); }

 private:
  std::uint64_t master_seed_;
};

/// Counter-based draws: a pure function of (key, index).
double counter_uniform(std::uint64_t key, std::uint64_t index) noexcept;
double counter_normal(std::uint64_t key, std::uint64_t index) noexcept;

// ---------------------------------------------------------------------------
// Noise and oracles
// ---------------------------------------------------------------------------

struct NoiseModel {
  enum class Kind { none, bounded, gaussian };

  Kind kind = Kind::none;
  /// sigma for `bounded` (|xi| <= sigma), variance for `gaussian`.
  double level = 0.0;

  static NoiseModel noiseless() noexcept { return {}; }
  /// Uniform on [-sigma, sigma]. Default model for the bounded-noise analysis.
  static NoiseModel bounded(double sigma) { return {Kind::bounded, sigma}; }
  /// Unbounded Gaussian noise; this falls outside the |xi| <= sigma assumption.
  static NoiseModel gaussian(double variance) { return {Kind::gaussian, variance}; }

  void validate() const;
  /// Noise value for query `index`; pure in (key, index).
  double draw(std::uint64_t key, std::uint64_t index) const noexcept;
};

/// Zeroth-order oracle. `eval` counts every call; noise is assigned by query
/// index, so concurrent callers that reserve index ranges up front see values
/// independent of completion order.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual std::size_t dim() const noexcept = 0;

  double eval(std::span<const double> x);

  /// Claims `count` consecutive query indices and returns the first one.
  std::uint64_t reserve(std::uint64_t count) noexcept { return count_.fetch_add(count); }
  /// Evaluates with an index previously obtained from `reserve`. Does not count.
  double eval_at(std::span<const double> x, std::uint64_t query_index) const;

  std::uint64_t query_count() const noexcept { return count_.load(); }

 protected:
  virtual double evaluate(std::span<const double> x, std::uint64_t query_index) const = 0;

 private:
  std::atomic<std::uint64_t> count_{0};
};

using Objective = std::function<double(std::span<const double>)>;

/// Oracle returning f(x) + xi with xi drawn from the `noise` substream.
std::unique_ptr<Oracle> make_noisy_oracle(Objective f, std::size_t dim, NoiseModel noise,
                                          const RngStreams& streams);

// ---------------------------------------------------------------------------
// Traces and timing
// ---------------------------------------------------------------------------

struct TraceRecord {
  std::uint64_t iteration = 0;
  std::uint64_t cumulative_queries = 0;
  double f_value = 0.0;
  std::int64_t compute_nanos = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Per-iteration history. Queries are strictly increasing and values finite.
class ConvergenceTrace {
 public:
  void append(const TraceRecord& record);

  const std::vector<TraceRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const TraceRecord& back() const { return records_.back(); }

 private:
  std::vector<TraceRecord> records_;
};

/// Accumulating monotonic stopwatch. A disabled clock always reads zero.
class ComputeClock {
 public:
  explicit ComputeClock(bool enabled = true) noexcept : enabled_(enabled) {}

  void start() noexcept;
  void stop() noexcept;
  std::int64_t nanos() const noexcept { return total_; }
  void reset() noexcept { total_ = 0; running_ = false; }

 private:
  using clock = std::chrono::steady_clock;
  bool enabled_;
  bool running_ = false;
  clock::time_point started_{};
  std::int64_t total_ = 0;
};

/// Pauses a running clock for the lifetime of the guard (used around oracle calls).
class PauseClock {
 public:
  explicit PauseClock(ComputeClock* clock) noexcept : clock_(clock) {
    if (clock_) clock_->stop();
  }
  ~PauseClock() {
    if (clock_) clock_->start();
  }
  PauseClock(const PauseClock&) = delete;
  PauseClock& operator=(const PauseClock&) = delete;

 private:
  ComputeClock* clock_;
};

double norm2(std::span<const double> v) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;
bool all_finite(std::span<const double> v) noexcept;

}  // namespace zobcd
