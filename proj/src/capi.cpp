#include "zobcd/zobcd.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "zobcd/baselines.hpp"
#include "zobcd/harness.hpp"
#include "zobcd/objectives.hpp"
#include "zobcd/optimizer.hpp"

struct zobcd_objective {
  std::shared_ptr<zobcd::SyntheticObjective> impl;
};

struct zobcd_oracle {
  std::shared_ptr<zobcd::SyntheticObjective> keep_alive;
  std::unique_ptr<zobcd::Oracle> impl;
};

struct zobcd_result {
  zobcd::RunResult impl;
};

namespace {

thread_local std::string last_error;

zobcd_status fail(zobcd_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

zobcd_status status_of(zobcd::ErrorKind kind) {
  switch (kind) {
    case zobcd::ErrorKind::config: return ZOBCD_ERR_CONFIG;
    case zobcd::ErrorKind::contract: return ZOBCD_ERR_CONTRACT;
    case zobcd::ErrorKind::numerical: return ZOBCD_ERR_NUMERICAL;
    case zobcd::ErrorKind::io: return ZOBCD_ERR_IO;
  }
  return ZOBCD_ERR_INTERNAL;
}

template <class F>
zobcd_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const zobcd::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ZOBCD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ZOBCD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ZOBCD_ERR_INTERNAL, "unknown exception");
  }
}

zobcd::NoiseModel noise_model(zobcd_noise_kind kind, double level) {
  zobcd::NoiseModel noise;
  switch (kind) {
    case ZOBCD_NOISE_NONE: noise = zobcd::NoiseModel::noiseless(); break;
    case ZOBCD_NOISE_BOUNDED: noise = zobcd::NoiseModel::bounded(level); break;
    case ZOBCD_NOISE_GAUSSIAN: noise = zobcd::NoiseModel::gaussian(level); break;
    default: throw zobcd::ConfigError("unknown noise kind");
  }
  noise.validate();
  return noise;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const std::vector<std::string>& objective_names() {
  static const auto names = zobcd::objective_names();
  return names;
}

const std::vector<std::string>& method_names() {
  static const auto names = zobcd::method_names();
  return names;
}

#define ZOBCD_REQUIRE(cond, msg) \
  if (!(cond)) return fail(ZOBCD_ERR_CONTRACT, msg)

}  // namespace

extern "C" {

const char* zobcd_version(void) { return "0.1.0"; }

const char* zobcd_last_error(void) { return last_error.c_str(); }

const char* zobcd_status_name(zobcd_status status) {
  switch (status) {
    case ZOBCD_OK: return "ok";
    case ZOBCD_ERR_CONFIG: return "config error";
    case ZOBCD_ERR_CONTRACT: return "contract violation";
    case ZOBCD_ERR_NUMERICAL: return "numerical failure";
    case ZOBCD_ERR_IO: return "i/o error";
    case ZOBCD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

size_t zobcd_objective_count(void) { return objective_names().size(); }

const char* zobcd_objective_name(size_t index) {
  return index < objective_names().size() ? objective_names()[index].c_str() : nullptr;
}

size_t zobcd_method_count(void) { return method_names().size(); }

const char* zobcd_method_name(size_t index) {
  return index < method_names().size() ? method_names()[index].c_str() : nullptr;
}

zobcd_status zobcd_objective_create(const char* name, size_t d, size_t s, double coeff,
                                    uint64_t seed, zobcd_objective** out) {
  ZOBCD_REQUIRE(name && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    zobcd::Prng rng = zobcd::RngStreams(seed).substream(zobcd::Stream::objective);
    auto obj = zobcd::make_objective(name, {d, s, coeff}, rng);
    *out = new zobcd_objective{std::shared_ptr<zobcd::SyntheticObjective>(std::move(obj))};
    return ZOBCD_OK;
  });
}

void zobcd_objective_destroy(zobcd_objective* objective) { delete objective; }

size_t zobcd_objective_dim(const zobcd_objective* objective) {
  return objective ? objective->impl->dim() : 0;
}

zobcd_status zobcd_objective_value(const zobcd_objective* objective, const double* x, size_t n,
                                   double* out) {
  ZOBCD_REQUIRE(objective && x && out, "null argument");
  return guarded([&] {
    *out = objective->impl->value({x, n});
    return ZOBCD_OK;
  });
}

zobcd_status zobcd_oracle_from_objective(const zobcd_objective* objective,
                                         zobcd_noise_kind noise, double level, uint64_t seed,
                                         zobcd_oracle** out) {
  ZOBCD_REQUIRE(objective && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto keep = objective->impl;
    auto oracle = zobcd::make_noisy_oracle(keep->as_function(), keep->dim(),
                                           noise_model(noise, level), zobcd::RngStreams(seed));
    *out = new zobcd_oracle{std::move(keep), std::move(oracle)};
    return ZOBCD_OK;
  });
}

zobcd_status zobcd_oracle_from_callback(zobcd_function f, void* user_data, size_t d,
                                        zobcd_noise_kind noise, double level, uint64_t seed,
                                        zobcd_oracle** out) {
  ZOBCD_REQUIRE(f && out, "null argument");
  *out = nullptr;
  if (d == 0) return fail(ZOBCD_ERR_CONFIG, "dimension must be positive");
  return guarded([&] {
    auto fn = [f, user_data](std::span<const double> x) { return f(x.data(), x.size(), user_data); };
    auto oracle = zobcd::make_noisy_oracle(fn, d, noise_model(noise, level), zobcd::RngStreams(seed));
    *out = new zobcd_oracle{nullptr, std::move(oracle)};
    return ZOBCD_OK;
  });
}

void zobcd_oracle_destroy(zobcd_oracle* oracle) { delete oracle; }

size_t zobcd_oracle_dim(const zobcd_oracle* oracle) { return oracle ? oracle->impl->dim() : 0; }

uint64_t zobcd_oracle_queries(const zobcd_oracle* oracle) {
  return oracle ? oracle->impl->query_count() : 0;
}

zobcd_status zobcd_oracle_eval(zobcd_oracle* oracle, const double* x, size_t n, double* out) {
  ZOBCD_REQUIRE(oracle && x && out, "null argument");
  return guarded([&] {
    *out = oracle->impl->eval({x, n});
    return ZOBCD_OK;
  });
}

zobcd_status zobcd_options_default(zobcd_method method, zobcd_options* out) {
  ZOBCD_REQUIRE(out, "null argument");
  const zobcd::ZobcdConfig z;
  const zobcd::BaselineConfig b;
  zobcd_options o{};
  o.method = method;
  o.budget = 100000;
  o.has_target = 0;
  o.target = 0.0;
  o.seed = 0;
  o.record_timing = 1;
  o.num_blocks = z.num_blocks;
  o.sparsity = z.s;
  o.b1 = z.b1;
  o.b3 = z.b3;
  o.sparsity_factor = z.sparsity_factor;
  o.n_cosamp = z.n_cosamp;
  o.reshuffle_period = 0;
  switch (method) {
    case ZOBCD_METHOD_ZOBCD_R:
    case ZOBCD_METHOD_ZOBCD_RC:
      o.alpha = z.alpha;
      o.delta = z.delta;
      break;
    case ZOBCD_METHOD_FDSA:
    case ZOBCD_METHOD_SPSA:
    case ZOBCD_METHOD_ZOSCD:
      o.alpha = b.alpha;
      o.delta = b.delta;
      break;
    default: return fail(ZOBCD_ERR_CONFIG, "unknown method");
  }
  *out = o;
  return ZOBCD_OK;
}

zobcd_status zobcd_minimize(zobcd_oracle* oracle, const double* x0, size_t n,
                            const zobcd_options* options, const zobcd_objective* reporter,
                            zobcd_result** out) {
  ZOBCD_REQUIRE(oracle && x0 && options && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const zobcd_options& o = *options;
    zobcd::Reporter report;
    if (reporter) {
      auto obj = reporter->impl;
      report = [obj](std::span<const double> x) { return obj->value(x); };
    }
    std::optional<double> target;
    if (o.has_target) target = o.target;
    const std::span<const double> start(x0, n);

    auto result = std::make_unique<zobcd_result>();
    switch (o.method) {
      case ZOBCD_METHOD_ZOBCD_R:
      case ZOBCD_METHOD_ZOBCD_RC: {
        zobcd::ZobcdConfig cfg;
        cfg.variant = o.method == ZOBCD_METHOD_ZOBCD_R ? zobcd::Variant::r : zobcd::Variant::rc;
        cfg.d = n;
        cfg.num_blocks = o.num_blocks;
        cfg.s = o.sparsity;
        cfg.alpha = o.alpha;
        cfg.delta = o.delta;
        cfg.b1 = o.b1;
        cfg.b3 = o.b3;
        cfg.sparsity_factor = o.sparsity_factor;
        cfg.n_cosamp = o.n_cosamp;
        cfg.budget = o.budget;
        cfg.target = target;
        if (o.reshuffle_period > 0) cfg.reshuffle_period = o.reshuffle_period;
        cfg.seed = o.seed;
        cfg.record_timing = o.record_timing != 0;
        result->impl = zobcd::run_zobcd(*oracle->impl, start, cfg, report);
        break;
      }
      case ZOBCD_METHOD_FDSA:
      case ZOBCD_METHOD_SPSA:
      case ZOBCD_METHOD_ZOSCD: {
        zobcd::BaselineConfig cfg;
        cfg.method = o.method == ZOBCD_METHOD_FDSA   ? zobcd::BaselineMethod::fdsa
                     : o.method == ZOBCD_METHOD_SPSA ? zobcd::BaselineMethod::spsa
                                                     : zobcd::BaselineMethod::zoscd;
        cfg.alpha = o.alpha;
        cfg.delta = o.delta;
        cfg.budget = o.budget;
        cfg.target = target;
        cfg.seed = o.seed;
        cfg.record_timing = o.record_timing != 0;
        result->impl = zobcd::run_baseline(*oracle->impl, start, cfg, report);
        break;
      }
      default: return fail(ZOBCD_ERR_CONFIG, "unknown method");
    }
    *out = result.release();
    return ZOBCD_OK;
  });
}

void zobcd_result_destroy(zobcd_result* result) { delete result; }

zobcd_termination zobcd_result_termination(const zobcd_result* result) {
  if (!result) return ZOBCD_TERM_NUMERICAL_FAILURE;
  switch (result->impl.termination) {
    case zobcd::Termination::budget_exhausted: return ZOBCD_TERM_BUDGET_EXHAUSTED;
    case zobcd::Termination::target_reached: return ZOBCD_TERM_TARGET_REACHED;
    case zobcd::Termination::numerical_failure: return ZOBCD_TERM_NUMERICAL_FAILURE;
  }
  return ZOBCD_TERM_NUMERICAL_FAILURE;
}

const char* zobcd_result_message(const zobcd_result* result) {
  return result ? result->impl.message.c_str() : "";
}

size_t zobcd_result_iterations(const zobcd_result* result) {
  return result ? result->impl.iterations : 0;
}

size_t zobcd_result_rows(const zobcd_result* result) {
  return result ? result->impl.rows_per_iteration : 0;
}

const double* zobcd_result_x(const zobcd_result* result, size_t* n) {
  if (!result) {
    if (n) *n = 0;
    return nullptr;
  }
  if (n) *n = result->impl.x_final.size();
  return result->impl.x_final.data();
}

size_t zobcd_result_trace_length(const zobcd_result* result) {
  return result ? result->impl.trace.size() : 0;
}

zobcd_status zobcd_result_trace_record(const zobcd_result* result, size_t index,
                                       uint64_t* iteration, uint64_t* queries, double* f_value,
                                       int64_t* compute_nanos) {
  ZOBCD_REQUIRE(result, "null result");
  if (index >= result->impl.trace.size()) {
    return fail(ZOBCD_ERR_CONTRACT, "trace index out of range");
  }
  const auto& r = result->impl.trace.records()[index];
  if (iteration) *iteration = r.iteration;
  if (queries) *queries = r.cumulative_queries;
  if (f_value) *f_value = r.f_value;
  if (compute_nanos) *compute_nanos = r.compute_nanos;
  return ZOBCD_OK;
}

zobcd_status zobcd_run_experiment(const char* config_path, const zobcd_run_overrides* overrides,
                                  char** table) {
  ZOBCD_REQUIRE(config_path, "null config path");
  if (table) *table = nullptr;
  return guarded([&] {
    zobcd::RunOverrides ov;
    if (overrides) {
      if (overrides->has_seed) ov.seed = overrides->seed;
      if (overrides->output_dir) ov.output_dir = std::filesystem::path(overrides->output_dir);
      if (overrides->format == ZOBCD_FORMAT_CSV) ov.format = zobcd::TraceFormat::csv;
      if (overrides->format == ZOBCD_FORMAT_JSON) ov.format = zobcd::TraceFormat::json;
    }
    const auto plan = zobcd::load_experiment(config_path, ov);
    const auto summary = zobcd::run_experiment(plan);
    if (table) *table = dup_string(zobcd::summary_table(summary));
    if (summary.any_numerical_failure) {
      return fail(ZOBCD_ERR_NUMERICAL, "at least one run ended in numerical failure");
    }
    return ZOBCD_OK;
  });
}

zobcd_status zobcd_summarize(const char* dir, char** table, char** json) {
  ZOBCD_REQUIRE(dir, "null directory");
  if (table) *table = nullptr;
  if (json) *json = nullptr;
  return guarded([&] {
    const auto summary = zobcd::summarize(dir);
    if (table) *table = dup_string(zobcd::summary_table(summary));
    if (json) *json = dup_string(zobcd::summary_json(summary));
    return ZOBCD_OK;
  });
}

void zobcd_string_free(char* s) { std::free(s); }

}  // extern "C"
