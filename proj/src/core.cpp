#include "zobcd/core.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <numeric>

namespace zobcd {

namespace {

std::mutex warning_mutex;
WarningHandler warning_handler = [](std::string_view msg) {
  std::cerr << "zobcd warning: " << msg << '\n';
};

constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double box_muller(double u1, double u2) noexcept {
  // u1 in (0, 1]
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

class FunctionOracle final : public Oracle {
 public:
  FunctionOracle(Objective f, std::size_t dim, NoiseModel noise, std::uint64_t key)
      : f_(std::move(f)), dim_(dim), noise_(noise), key_(key) {}

  std::size_t dim() const noexcept override { return dim_; }

 protected:
  double evaluate(std::span<const double> x, std::uint64_t query_index) const override {
    return f_(x) + noise_.draw(key_, query_index);
  }

 private:
  Objective f_;
  std::size_t dim_;
  NoiseModel noise_;
  std::uint64_t key_;
};

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warning_mutex);
  std::swap(handler, warning_handler);
  return handler;
}

void warn(std::string_view message) {
  std::lock_guard lock(warning_mutex);
  if (warning_handler) warning_handler(message);
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += golden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Prng::Prng(std::uint64_t seed) noexcept {
  std::uint64_t s = seed;
  for (auto& word : state_) {
    word = mix64(s);
    s += golden;
  }
}

Prng::result_type Prng::operator()() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Prng::uniform() noexcept { return to_unit((*this)()); }

double Prng::normal() noexcept {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return box_muller(u1, u2);
}

int Prng::rademacher() noexcept { return ((*this)() >> 63) ? 1 : -1; }

std::uint64_t Prng::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::string_view stream_name(Stream stream) noexcept {
  switch (stream) {
    case Stream::partition: return "partition";
    case Stream::directions: return "directions";
    case Stream::omega: return "omega";
    case Stream::block_choice: return "block_choice";
    case Stream::noise: return "noise";
    case Stream::objective: return "objective";
  }
  return "unknown";
}

Stream parse_stream(std::string_view name) {
  for (Stream s : {Stream::partition, Stream::directions, Stream::omega, Stream::block_choice,
                   Stream::noise, Stream::objective}) {
    if (stream_name(s) == name) return s;
  }
  throw ConfigError("unknown random stream '" + std::string(name) + "'");
}

std::uint64_t RngStreams::key(Stream stream) const noexcept {
  return mix64(mix64(master_seed_) ^ fnv1a(stream_name(stream)));
}

double counter_uniform(std::uint64_t key, std::uint64_t index) noexcept {
  return to_unit(mix64(mix64(key) ^ (index * golden + 0x632BE59BD9B4E019ULL)));
}

double counter_normal(std::uint64_t key, std::uint64_t index) noexcept {
  const double u1 = 1.0 - counter_uniform(key, 2 * index);
  const double u2 = counter_uniform(key, 2 * index + 1);
  return box_muller(u1, u2);
}

void NoiseModel::validate() const {
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw ConfigError("noise level must be finite and non-negative, got " + std::to_string(level));
  }
}

double NoiseModel::draw(std::uint64_t key, std::uint64_t index) const noexcept {
  switch (kind) {
    case Kind::none: return 0.0;
    case Kind::bounded: return level * (2.0 * counter_uniform(key, index) - 1.0);
    case Kind::gaussian: return std::sqrt(level) * counter_normal(key, index);
  }
  return 0.0;
}

double Oracle::eval(std::span<const double> x) { return eval_at(x, reserve(1)); }

double Oracle::eval_at(std::span<const double> x, std::uint64_t query_index) const {
  if (x.size() != dim()) {
    throw ContractError("oracle expects dimension " + std::to_string(dim()) + ", got " +
                        std::to_string(x.size()));
  }
  return evaluate(x, query_index);
}

std::unique_ptr<Oracle> make_noisy_oracle(Objective f, std::size_t dim, NoiseModel noise,
                                          const RngStreams& streams) {
  noise.validate();
  if (dim == 0) throw ConfigError("oracle dimension must be positive");
  if (!f) throw ConfigError("oracle requires a callable objective");
  return std::make_unique<FunctionOracle>(std::move(f), dim, noise, streams.key(Stream::noise));
}

void ConvergenceTrace::append(const TraceRecord& record) {
  if (!std::isfinite(record.f_value)) {
    throw ContractError("trace values must be finite");
  }
  if (!records_.empty() && record.cumulative_queries <= records_.back().cumulative_queries) {
    throw ContractError("trace query counts must be strictly increasing");
  }
  records_.push_back(record);
}

void ComputeClock::start() noexcept {
  if (!enabled_ || running_) return;
  running_ = true;
  started_ = clock::now();
}

void ComputeClock::stop() noexcept {
  if (!enabled_ || !running_) return;
  running_ = false;
  total_ += std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - started_).count();
}

double norm2(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

bool all_finite(std::span<const double> v) noexcept {
  for (double e : v) {
    if (!std::isfinite(e)) return false;
  }
  return true;
}

}  // namespace zobcd
