#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zobcd/baselines.hpp"
#include "zobcd/core.hpp"
#include "zobcd/objectives.hpp"
#include "zobcd/optimizer.hpp"

namespace zobcd {

enum class TraceFormat { csv, json };

/// Method names accepted in experiment files.
std::vector<std::string> method_names();

/// One fully resolved experiment configuration (a single sweep point).
struct ExperimentSpec {
  std::string objective = "sparse-quadric";
  ObjectiveParams objective_params;
  /// x0 = init_scale * u / ||u|| with u standard normal.
  double init_scale = 100.0;
  NoiseModel noise = NoiseModel::noiseless();
  std::string method = "zobcd-r";
  ZobcdConfig zobcd;        // used by zobcd-r / zobcd-rc
  BaselineConfig baseline;  // used by fdsa / spsa / zoscd
  std::uint64_t budget = 100000;
  std::optional<double> target;
  std::vector<std::uint64_t> seeds;  // one run per seed
  TraceFormat format = TraceFormat::csv;
  bool timing = true;
  /// Report noiseless f(x_k) in traces (otherwise the noisy base query).
  bool exact_report = true;
};

struct ExperimentPlan {
  std::string name;
  std::filesystem::path output_dir;
  /// (variant label, spec). A single unlabeled variant when there is no sweep.
  std::vector<std::pair<std::string, ExperimentSpec>> variants;
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<TraceFormat> format;
};

/// Parses an experiment document (JSON). Precedence for seed and output
/// directory: `overrides` > ZOBCD_SEED / ZOBCD_OUT environment > document.
ExperimentPlan parse_experiment(std::string_view json_text, const RunOverrides& overrides = {},
                                bool read_environment = true);
ExperimentPlan load_experiment(const std::filesystem::path& config,
                               const RunOverrides& overrides = {});

/// Runs one seed of a spec: builds the objective and x0 from the `objective`
/// stream, the oracle noise from the `noise` stream, then the chosen method.
RunResult run_single(const ExperimentSpec& spec, std::uint64_t seed);

struct RunSummary {
  std::uint64_t seed = 0;
  Termination termination = Termination::budget_exhausted;
  std::size_t iterations = 0;
  std::uint64_t queries = 0;
  double final_f = 0.0;
  std::optional<std::size_t> iterations_to_target;
  std::optional<std::uint64_t> queries_to_target;
  double mean_compute_nanos = 0.0;  // per iteration, oracle time excluded
};

/// Median and interquartile range; nullopt marks "unreached" (an infinite order statistic).
struct Spread {
  std::optional<double> median;
  std::optional<double> iqr;
};

struct VariantSummary {
  std::string label;
  std::optional<double> target;
  std::vector<RunSummary> runs;
  Spread iterations_to_target;
  Spread queries_to_target;
  Spread mean_compute_nanos;
};

struct ExperimentSummary {
  std::string name;
  std::vector<VariantSummary> variants;
  bool any_numerical_failure = false;
};

/// Executes every variant and seed, writing per-run traces, a manifest per
/// variant directory and summary.json at the output root.
ExperimentSummary run_experiment(const ExperimentPlan& plan);

/// Rebuilds a summary from trace files under `dir` (each directory holding a
/// manifest.json is one variant).
ExperimentSummary summarize(const std::filesystem::path& dir);

/// Median/IQR with unreached values treated as +infinity.
Spread spread(std::vector<std::optional<double>> values);
RunSummary summarize_trace(const ConvergenceTrace& trace, std::optional<double> target);

std::string summary_json(const ExperimentSummary& summary);
std::string summary_table(const ExperimentSummary& summary);

void write_trace(const std::filesystem::path& path, const ConvergenceTrace& trace,
                 TraceFormat format);
ConvergenceTrace read_trace(const std::filesystem::path& path);

}  // namespace zobcd
