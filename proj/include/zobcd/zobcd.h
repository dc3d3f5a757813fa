/* C interface to the zobcd optimizer library.
 *
 * Handles are opaque and owned by the caller; each *_create has a matching
 * *_destroy. Functions return a zobcd_status, and on failure the message is
 * available from zobcd_last_error() on the same thread until the next call. */
#ifndef ZOBCD_ZOBCD_H
#define ZOBCD_ZOBCD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef ZOBCD_BUILDING_LIBRARY
#    define ZOBCD_API __declspec(dllexport)
#  else
#    define ZOBCD_API __declspec(dllimport)
#  endif
#else
#  define ZOBCD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zobcd_status {
  ZOBCD_OK = 0,
  ZOBCD_ERR_CONFIG = 1,    /* invalid configuration or argument */
  ZOBCD_ERR_CONTRACT = 2,  /* API misuse: wrong dimensions, null handles */
  ZOBCD_ERR_NUMERICAL = 3,
  ZOBCD_ERR_IO = 4,
  ZOBCD_ERR_INTERNAL = 5
} zobcd_status;

typedef enum zobcd_method {
  ZOBCD_METHOD_ZOBCD_R = 0,
  ZOBCD_METHOD_ZOBCD_RC = 1,
  ZOBCD_METHOD_FDSA = 2,
  ZOBCD_METHOD_SPSA = 3,
  ZOBCD_METHOD_ZOSCD = 4
} zobcd_method;

typedef enum zobcd_noise_kind {
  ZOBCD_NOISE_NONE = 0,
  ZOBCD_NOISE_BOUNDED = 1,  /* uniform on [-level, level] */
  ZOBCD_NOISE_GAUSSIAN = 2  /* level is the variance */
} zobcd_noise_kind;

typedef enum zobcd_termination {
  ZOBCD_TERM_BUDGET_EXHAUSTED = 0,
  ZOBCD_TERM_TARGET_REACHED = 1,
  ZOBCD_TERM_NUMERICAL_FAILURE = 2
} zobcd_termination;

typedef enum zobcd_format {
  ZOBCD_FORMAT_DEFAULT = 0, /* whatever the experiment file says */
  ZOBCD_FORMAT_CSV = 1,
  ZOBCD_FORMAT_JSON = 2
} zobcd_format;

typedef struct zobcd_objective zobcd_objective;
typedef struct zobcd_oracle zobcd_oracle;
typedef struct zobcd_result zobcd_result;

/* Black-box function for callback oracles. Must not throw across the boundary. */
typedef double (*zobcd_function)(const double* x, size_t n, void* user_data);

ZOBCD_API const char* zobcd_version(void);
ZOBCD_API const char* zobcd_last_error(void);
ZOBCD_API const char* zobcd_status_name(zobcd_status status);

/* ---- registry ---------------------------------------------------------- */

ZOBCD_API size_t zobcd_objective_count(void);
ZOBCD_API const char* zobcd_objective_name(size_t index); /* NULL when out of range */
ZOBCD_API size_t zobcd_method_count(void);
ZOBCD_API const char* zobcd_method_name(size_t index);

/* ---- objectives -------------------------------------------------------- */

/* Random parts (e.g. the sparse-quadric support) are drawn from `seed`. */
ZOBCD_API zobcd_status zobcd_objective_create(const char* name, size_t d, size_t s, double coeff,
                                              uint64_t seed, zobcd_objective** out);
ZOBCD_API void zobcd_objective_destroy(zobcd_objective* objective);
ZOBCD_API size_t zobcd_objective_dim(const zobcd_objective* objective);
ZOBCD_API zobcd_status zobcd_objective_value(const zobcd_objective* objective, const double* x,
                                             size_t n, double* out);

/* ---- oracles ----------------------------------------------------------- */

/* The oracle keeps its own reference to the objective. */
ZOBCD_API zobcd_status zobcd_oracle_from_objective(const zobcd_objective* objective,
                                                   zobcd_noise_kind noise, double level,
                                                   uint64_t seed, zobcd_oracle** out);
ZOBCD_API zobcd_status zobcd_oracle_from_callback(zobcd_function f, void* user_data, size_t d,
                                                  zobcd_noise_kind noise, double level,
                                                  uint64_t seed, zobcd_oracle** out);
ZOBCD_API void zobcd_oracle_destroy(zobcd_oracle* oracle);
ZOBCD_API size_t zobcd_oracle_dim(const zobcd_oracle* oracle);
ZOBCD_API uint64_t zobcd_oracle_queries(const zobcd_oracle* oracle);
ZOBCD_API zobcd_status zobcd_oracle_eval(zobcd_oracle* oracle, const double* x, size_t n,
                                         double* out);

/* ---- optimization ------------------------------------------------------ */

typedef struct zobcd_options {
  zobcd_method method;
  uint64_t budget;
  int has_target;
  double target;
  uint64_t seed;
  int record_timing;
  double alpha;
  double delta;
  /* block methods only */
  size_t num_blocks;
  size_t sparsity; /* upper estimate of gradient sparsity */
  double b1;
  double b3;
  double sparsity_factor;
  size_t n_cosamp;
  size_t reshuffle_period; /* 0 = never */
} zobcd_options;

/* Fills `out` with the defaults for `method`. */
ZOBCD_API zobcd_status zobcd_options_default(zobcd_method method, zobcd_options* out);

/* Minimizes through `oracle` from x0. When `reporter` is non-null its exact
 * value is recorded in the trace instead of noisy base queries.
 * A run ending in numerical failure still returns ZOBCD_OK with a result whose
 * termination says so. */
ZOBCD_API zobcd_status zobcd_minimize(zobcd_oracle* oracle, const double* x0, size_t n,
                                      const zobcd_options* options,
                                      const zobcd_objective* reporter, zobcd_result** out);

ZOBCD_API void zobcd_result_destroy(zobcd_result* result);
ZOBCD_API zobcd_termination zobcd_result_termination(const zobcd_result* result);
ZOBCD_API const char* zobcd_result_message(const zobcd_result* result);
ZOBCD_API size_t zobcd_result_iterations(const zobcd_result* result);
ZOBCD_API size_t zobcd_result_rows(const zobcd_result* result);
ZOBCD_API const double* zobcd_result_x(const zobcd_result* result, size_t* n);
ZOBCD_API size_t zobcd_result_trace_length(const zobcd_result* result);
ZOBCD_API zobcd_status zobcd_result_trace_record(const zobcd_result* result, size_t index,
                                                 uint64_t* iteration, uint64_t* queries,
                                                 double* f_value, int64_t* compute_nanos);

/* ---- experiments ------------------------------------------------------- */

typedef struct zobcd_run_overrides {
  int has_seed;
  uint64_t seed;
  const char* output_dir; /* NULL keeps the configured path */
  zobcd_format format;
} zobcd_run_overrides;

/* Runs an experiment file. `table` (optional) receives a printable summary to
 * release with zobcd_string_free. Returns ZOBCD_ERR_NUMERICAL after writing
 * all files if any run ended in numerical failure. */
ZOBCD_API zobcd_status zobcd_run_experiment(const char* config_path,
                                            const zobcd_run_overrides* overrides, char** table);

/* Summarizes the traces under `dir`; either output pointer may be NULL. */
ZOBCD_API zobcd_status zobcd_summarize(const char* dir, char** table, char** json);

ZOBCD_API void zobcd_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
