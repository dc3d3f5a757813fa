#include "zobcd/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace zobcd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* csv_header = "iteration,cumulative_queries,f_value,compute_nanos";

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void config_fail(const std::string& what) { throw ConfigError("experiment: " + what); }

void check_keys(const json& obj, std::string_view where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_fail(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) config_fail("unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    config_fail(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::uint64_t get_count(const json& obj, const char* key, std::uint64_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer() && it->get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(it->get<std::int64_t>());
  }
  if (it->is_number_float()) {
    const double v = it->get<double>();
    if (v >= 0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
  }
  config_fail(std::string("'") + key + "' must be a non-negative integer");
}

TraceFormat parse_format(const std::string& s) {
  if (s == "csv") return TraceFormat::csv;
  if (s == "json") return TraceFormat::json;
  config_fail("format must be 'csv' or 'json', got '" + s + "'");
}

NoiseModel parse_noise(const json& j) {
  if (j.is_null()) return NoiseModel::bounded(0.0);
  check_keys(j, "noise", {"kind", "level"});
  const auto kind = get_or<std::string>(j, "kind", "bounded");
  const double level = get_or<double>(j, "level", 0.0);
  NoiseModel noise;
  if (kind == "none") {
    noise = NoiseModel::noiseless();
  } else if (kind == "bounded") {
    noise = NoiseModel::bounded(level);
  } else if (kind == "gaussian") {
    noise = NoiseModel::gaussian(level);
  } else {
    config_fail("noise kind must be none, bounded or gaussian");
  }
  noise.validate();
  return noise;
}

ExperimentSpec parse_spec(const json& doc) {
  ExperimentSpec spec;
  const json empty = json::object();

  const json& obj = doc.contains("objective") ? doc["objective"] : empty;
  check_keys(obj, "objective", {"name", "d", "s", "coeff"});
  spec.objective = get_or<std::string>(obj, "name", "sparse-quadric");
  {
    const auto names = objective_names();
    if (std::find(names.begin(), names.end(), spec.objective) == names.end()) {
      config_fail("unknown objective '" + spec.objective + "'");
    }
  }
  spec.objective_params.d = get_count(obj, "d", 0);
  spec.objective_params.s = get_count(obj, "s", 0);
  spec.objective_params.coeff = get_or<double>(obj, "coeff", 1.0);
  if (spec.objective_params.d == 0) config_fail("objective.d must be positive");
  if (spec.objective_params.s == 0 || spec.objective_params.s > spec.objective_params.d) {
    config_fail("objective.s must lie in [1, d]");
  }

  if (doc.contains("init")) {
    check_keys(doc["init"], "init", {"scale"});
    spec.init_scale = get_or<double>(doc["init"], "scale", 100.0);
  }
  if (!(spec.init_scale >= 0.0) || !std::isfinite(spec.init_scale)) {
    config_fail("init.scale must be finite and non-negative");
  }
  spec.noise = parse_noise(doc.contains("noise") ? doc["noise"] : json());

  spec.method = get_or<std::string>(doc, "method", "zobcd-r");
  {
    const auto names = method_names();
    if (std::find(names.begin(), names.end(), spec.method) == names.end()) {
      config_fail("unknown method '" + spec.method + "'");
    }
  }
  spec.budget = get_count(doc, "budget", 100000);
  if (doc.contains("target") && !doc["target"].is_null()) {
    spec.target = get_or<double>(doc, "target", 0.0);
  }
  spec.format = parse_format(get_or<std::string>(doc, "format", "csv"));
  spec.timing = get_or<bool>(doc, "timing", true);
  const auto report = get_or<std::string>(doc, "report", "exact");
  if (report != "exact" && report != "noisy") config_fail("report must be 'exact' or 'noisy'");
  spec.exact_report = report == "exact";

  const json& params = doc.contains("params") ? doc["params"] : empty;
  const bool is_zobcd = spec.method == "zobcd-r" || spec.method == "zobcd-rc";
  if (is_zobcd) {
    check_keys(params, "params",
               {"J", "s", "alpha", "delta", "b1", "b3", "sparsity_factor", "n_cosamp",
                "lsq_max_iters", "lsq_tol", "reshuffle_period"});
    ZobcdConfig& z = spec.zobcd;
    z.variant = spec.method == "zobcd-r" ? Variant::r : Variant::rc;
    z.d = spec.objective_params.d;
    z.num_blocks = get_count(params, "J", 1);
    z.s = get_count(params, "s", spec.objective_params.s);
    z.alpha = get_or<double>(params, "alpha", z.alpha);
    z.delta = get_or<double>(params, "delta", z.delta);
    z.b1 = get_or<double>(params, "b1", z.b1);
    z.b3 = get_or<double>(params, "b3", z.b3);
    z.sparsity_factor = get_or<double>(params, "sparsity_factor", z.sparsity_factor);
    z.n_cosamp = get_count(params, "n_cosamp", z.n_cosamp);
    z.lsq_max_iters = get_count(params, "lsq_max_iters", z.lsq_max_iters);
    z.lsq_tol = get_or<double>(params, "lsq_tol", z.lsq_tol);
    if (params.contains("reshuffle_period") && !params["reshuffle_period"].is_null()) {
      const auto& rp = params["reshuffle_period"];
      if (rp.is_string()) {
        if (rp.get<std::string>() != "J") config_fail("reshuffle_period must be an integer or \"J\"");
        z.reshuffle_period = z.num_blocks;
      } else {
        const auto period = get_count(params, "reshuffle_period", 0);
        if (period > 0) z.reshuffle_period = period;
      }
    }
    z.budget = spec.budget;
    z.target = spec.target;
    z.record_timing = spec.timing;
    z.validate();
  } else {
    check_keys(params, "params", {"alpha", "delta"});
    BaselineConfig& b = spec.baseline;
    b.method = spec.method == "fdsa"   ? BaselineMethod::fdsa
               : spec.method == "spsa" ? BaselineMethod::spsa
                                       : BaselineMethod::zoscd;
    b.alpha = get_or<double>(params, "alpha", b.alpha);
    b.delta = get_or<double>(params, "delta", b.delta);
    b.budget = spec.budget;
    b.target = spec.target;
    b.record_timing = spec.timing;
    b.validate();
  }
  return spec;
}

void set_path(json& doc, const std::string& dotted, const json& value) {
  json* cur = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot - start);
    if (part.empty()) config_fail("bad sweep key '" + dotted + "'");
    if (dot == std::string::npos) {
      (*cur)[part] = value;
      return;
    }
    if (!cur->contains(part)) (*cur)[part] = json::object();
    cur = &(*cur)[part];
    if (!cur->is_object()) config_fail("sweep key '" + dotted + "' crosses a non-object");
    start = dot + 1;
  }
}

std::string label_value(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("ZOBCD_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (*end != '\0') config_fail("ZOBCD_SEED must be an unsigned integer");
  return v;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json("unreached"); }

json spread_json(const Spread& s) {
  return {{"median", optional_number(s.median)}, {"iqr", optional_number(s.iqr)}};
}

json run_json(const RunSummary& r, bool has_target) {
  json j = {{"seed", r.seed},
            {"termination", std::string(termination_name(r.termination))},
            {"iterations", r.iterations},
            {"queries", r.queries},
            {"final_f", r.final_f},
            {"mean_compute_nanos", r.mean_compute_nanos}};
  if (!has_target) {
    j["iterations_to_target"] = nullptr;
    j["queries_to_target"] = nullptr;
  } else {
    j["iterations_to_target"] =
        r.iterations_to_target ? json(*r.iterations_to_target) : json("unreached");
    j["queries_to_target"] = r.queries_to_target ? json(*r.queries_to_target) : json("unreached");
  }
  return j;
}

json variant_json(const VariantSummary& v) {
  json runs = json::array();
  for (const auto& r : v.runs) runs.push_back(run_json(r, v.target.has_value()));
  return {{"label", v.label},
          {"target", v.target ? json(*v.target) : json(nullptr)},
          {"runs", runs},
          {"iterations_to_target", spread_json(v.iterations_to_target)},
          {"queries_to_target", spread_json(v.queries_to_target)},
          {"mean_compute_nanos", spread_json(v.mean_compute_nanos)}};
}

void aggregate(VariantSummary& v) {
  std::vector<std::optional<double>> its, qs, ns;
  for (const auto& r : v.runs) {
    its.push_back(r.iterations_to_target ? std::optional<double>(*r.iterations_to_target)
                                         : std::nullopt);
    qs.push_back(r.queries_to_target ? std::optional<double>(static_cast<double>(*r.queries_to_target))
                                     : std::nullopt);
    ns.push_back(r.mean_compute_nanos);
  }
  if (v.target) {
    v.iterations_to_target = spread(its);
    v.queries_to_target = spread(qs);
  }
  v.mean_compute_nanos = spread(ns);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

std::string trace_filename(std::uint64_t seed, TraceFormat format) {
  return "trace_seed" + std::to_string(seed) + (format == TraceFormat::csv ? ".csv" : ".json");
}

}  // namespace

std::vector<std::string> method_names() { return {"zobcd-r", "zobcd-rc", "fdsa", "spsa", "zoscd"}; }

ExperimentPlan parse_experiment(std::string_view json_text, const RunOverrides& overrides,
                                bool read_environment) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_fail(std::string("invalid JSON: ") + e.what());
  }
  check_keys(doc, "experiment",
             {"name", "objective", "init", "noise", "method", "params", "budget", "target",
              "repeats", "seed", "seeds", "sweep", "format", "timing", "report", "output"});

  ExperimentPlan plan;
  plan.name = get_or<std::string>(doc, "name", "experiment");

  std::optional<std::uint64_t> seed_override = overrides.seed;
  std::optional<fs::path> out_override = overrides.output_dir;
  if (read_environment) {
    if (!seed_override) seed_override = env_seed();
    if (!out_override) {
      if (const char* o = std::getenv("ZOBCD_OUT"); o && *o) out_override = fs::path(o);
    }
  }
  plan.output_dir = out_override ? *out_override
                                 : fs::path(get_or<std::string>(doc, "output", "results/" + plan.name));
  if (overrides.format) doc["format"] = *overrides.format == TraceFormat::csv ? "csv" : "json";

  const std::uint64_t repeats = get_count(doc, "repeats", 1);
  if (repeats == 0) config_fail("repeats must be at least 1");
  std::vector<std::uint64_t> seeds;
  if (doc.contains("seeds") && !seed_override) {
    if (!doc["seeds"].is_array() || doc["seeds"].empty()) config_fail("seeds must be a non-empty array");
    for (const auto& s : doc["seeds"]) {
      if (!s.is_number_unsigned()) config_fail("seeds must be unsigned integers");
      seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    const std::uint64_t base = seed_override ? *seed_override : get_count(doc, "seed", 0);
    for (std::uint64_t r = 0; r < repeats; ++r) seeds.push_back(base + r);
  }

  // Expand the cartesian product of sweep axes.
  std::vector<std::pair<std::string, json>> points{{"", doc}};
  if (doc.contains("sweep")) {
    const auto& sweep = doc["sweep"];
    if (!sweep.is_array()) config_fail("sweep must be an array of {key, values}");
    for (const auto& axis : sweep) {
      check_keys(axis, "sweep axis", {"key", "values", "labels"});
      const auto key = get_or<std::string>(axis, "key", "");
      if (key.empty() || !axis.contains("values") || !axis["values"].is_array() ||
          axis["values"].empty()) {
        config_fail("each sweep axis needs a key and a non-empty values array");
      }
      const auto& values = axis["values"];
      // Optional labels replace the dumped value, useful when values are objects.
      std::vector<std::string> labels;
      if (axis.contains("labels")) {
        if (!axis["labels"].is_array() || axis["labels"].size() != values.size()) {
          config_fail("sweep labels must be an array as long as values");
        }
        for (const auto& l : axis["labels"]) {
          if (!l.is_string()) config_fail("sweep labels must be strings");
          labels.push_back(l.get<std::string>());
        }
      }
      if (key == "." && labels.empty()) config_fail("a '.' sweep axis needs labels");
      const std::string short_key = key.substr(key.rfind('.') + 1);
      std::vector<std::pair<std::string, json>> next;
      for (const auto& [label, point] : points) {
        for (std::size_t v = 0; v < values.size(); ++v) {
          const auto& value = values[v];
          json p = point;
          if (key == ".") {
            if (!value.is_object()) config_fail("values of a '.' sweep axis must be objects");
            for (const auto& [k, member] : value.items()) p[k] = member;
          } else {
            set_path(p, key, value);
          }
          std::string l = labels.empty() ? short_key + "=" + label_value(value) : labels[v];
          next.emplace_back(label.empty() ? l : label + "_" + l, std::move(p));
        }
      }
      points = std::move(next);
    }
  }
  for (auto& [label, point] : points) {
    point.erase("sweep");
    ExperimentSpec spec = parse_spec(point);
    spec.seeds = seeds;
    plan.variants.emplace_back(label, std::move(spec));
  }
  return plan;
}

ExperimentPlan load_experiment(const fs::path& config, const RunOverrides& overrides) {
  std::string text;
  try {
    text = read_text(config);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_experiment(text, overrides);
}

RunResult run_single(const ExperimentSpec& spec, std::uint64_t seed) {
  const RngStreams streams(seed);
  Prng rng = streams.substream(Stream::objective);
  auto objective = make_objective(spec.objective, spec.objective_params, rng);
  const std::size_t d = objective->dim();

  Vector x0(d);
  for (auto& v : x0) v = rng.normal();
  const double n0 = norm2(x0);
  for (auto& v : x0) v *= spec.init_scale / n0;

  auto oracle = make_noisy_oracle(objective->as_function(), d, spec.noise, streams);
  Reporter report;
  if (spec.exact_report) report = [&](std::span<const double> x) { return objective->value(x); };

  if (spec.method == "zobcd-r" || spec.method == "zobcd-rc") {
    ZobcdConfig cfg = spec.zobcd;
    cfg.d = d;
    cfg.seed = seed;
    return run_zobcd(*oracle, x0, cfg, report);
  }
  BaselineConfig cfg = spec.baseline;
  cfg.seed = seed;
  return run_baseline(*oracle, x0, cfg, report);
}

Spread spread(std::vector<std::optional<double>> values) {
  if (values.empty()) throw ContractError("spread of an empty sample");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> v;
  for (const auto& x : values) v.push_back(x ? *x : inf);
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return v[lo];
    if (std::isinf(v[hi])) return inf;
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  auto finite = [](double x) { return std::isinf(x) ? std::nullopt : std::optional<double>(x); };
  Spread s;
  s.median = finite(quantile(0.5));
  const double q3 = quantile(0.75);
  const double q1 = quantile(0.25);
  s.iqr = (std::isinf(q3) || std::isinf(q1)) ? std::nullopt : std::optional<double>(q3 - q1);
  return s;
}

RunSummary summarize_trace(const ConvergenceTrace& trace, std::optional<double> target) {
  if (trace.empty()) throw ContractError("cannot summarize an empty trace");
  RunSummary r;
  const auto& recs = trace.records();
  r.iterations = recs.back().iteration;
  r.queries = recs.back().cumulative_queries;
  r.final_f = recs.back().f_value;
  double nanos = 0.0;
  std::size_t counted = 0;
  for (const auto& rec : recs) {
    if (rec.iteration > 0) {
      nanos += static_cast<double>(rec.compute_nanos);
      ++counted;
    }
    if (target && !r.iterations_to_target && rec.f_value <= *target) {
      r.iterations_to_target = rec.iteration;
      r.queries_to_target = rec.cumulative_queries;
    }
  }
  r.mean_compute_nanos = counted ? nanos / static_cast<double>(counted) : 0.0;
  if (target && r.iterations_to_target) r.termination = Termination::target_reached;
  return r;
}

void write_trace(const fs::path& path, const ConvergenceTrace& trace, TraceFormat format) {
  std::string text;
  if (format == TraceFormat::csv) {
    text = std::string(csv_header) + "\n";
    for (const auto& r : trace.records()) {
      text += std::to_string(r.iteration) + "," + std::to_string(r.cumulative_queries) + "," +
              format_double(r.f_value) + "," + std::to_string(r.compute_nanos) + "\n";
    }
  } else {
    json recs = json::array();
    for (const auto& r : trace.records()) {
      recs.push_back({{"iteration", r.iteration},
                      {"cumulative_queries", r.cumulative_queries},
                      {"f_value", r.f_value},
                      {"compute_nanos", r.compute_nanos}});
    }
    text = json{{"records", recs}}.dump(1) + "\n";
  }
  write_text(path, text);
}

ConvergenceTrace read_trace(const fs::path& path) {
  const std::string text = read_text(path);
  ConvergenceTrace trace;
  try {
    if (path.extension() == ".json") {
      const json doc = json::parse(text);
      for (const auto& r : doc.at("records")) {
        trace.append({r.at("iteration").get<std::uint64_t>(),
                      r.at("cumulative_queries").get<std::uint64_t>(),
                      r.at("f_value").get<double>(), r.at("compute_nanos").get<std::int64_t>()});
      }
      return trace;
    }
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != csv_header) {
      throw IoError("unexpected trace header in " + path.string());
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      TraceRecord r;
      char comma1, comma2, comma3;
      std::istringstream row(line);
      row >> r.iteration >> comma1 >> r.cumulative_queries >> comma2 >> r.f_value >> comma3 >>
          r.compute_nanos;
      if (!row || comma1 != ',' || comma2 != ',' || comma3 != ',') {
        throw IoError("malformed trace row in " + path.string() + ": " + line);
      }
      trace.append(r);
    }
  } catch (const json::exception& e) {
    throw IoError("malformed trace " + path.string() + ": " + e.what());
  } catch (const ContractError& e) {
    throw IoError("invalid trace " + path.string() + ": " + e.what());
  }
  return trace;
}

ExperimentSummary run_experiment(const ExperimentPlan& plan) {
  ExperimentSummary summary;
  summary.name = plan.name;
  make_dirs(plan.output_dir);
  for (const auto& [label, spec] : plan.variants) {
    const fs::path dir = label.empty() ? plan.output_dir : plan.output_dir / label;
    make_dirs(dir);
    VariantSummary v;
    v.label = label;
    v.target = spec.target;
    for (auto seed : spec.seeds) {
      RunResult result = run_single(spec, seed);
      write_trace(dir / trace_filename(seed, spec.format), result.trace, spec.format);
      RunSummary r = summarize_trace(result.trace, spec.target);
      r.seed = seed;
      r.termination = result.termination;
      if (result.termination == Termination::numerical_failure) {
        summary.any_numerical_failure = true;
        warn(plan.name + (label.empty() ? "" : "/" + label) + " seed " + std::to_string(seed) +
             ": " + result.message);
      }
      v.runs.push_back(r);
    }
    aggregate(v);
    json manifest = {{"experiment", plan.name},
                     {"label", label},
                     {"method", spec.method},
                     {"objective", spec.objective},
                     {"target", spec.target ? json(*spec.target) : json(nullptr)},
                     {"format", spec.format == TraceFormat::csv ? "csv" : "json"},
                     {"runs", json::array()}};
    for (const auto& r : v.runs) {
      manifest["runs"].push_back(
          {{"seed", r.seed}, {"termination", std::string(termination_name(r.termination))}});
    }
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    summary.variants.push_back(std::move(v));
  }
  write_text(plan.output_dir / "summary.json", summary_json(summary));
  return summary;
}

ExperimentSummary summarize(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "manifest.json") {
      manifests.push_back(entry.path());
    }
  }
  std::sort(manifests.begin(), manifests.end());
  if (manifests.empty()) throw IoError("no experiment manifests under " + dir.string());

  ExperimentSummary summary;
  for (const auto& mpath : manifests) {
    json manifest;
    try {
      manifest = json::parse(read_text(mpath));
    } catch (const json::exception& e) {
      throw IoError("malformed manifest " + mpath.string() + ": " + e.what());
    }
    if (summary.name.empty()) summary.name = manifest.value("experiment", "");
    VariantSummary v;
    v.label = manifest.value("label", "");
    if (manifest.contains("target") && manifest["target"].is_number()) {
      v.target = manifest["target"].get<double>();
    }
    std::vector<fs::path> traces;
    for (const auto& entry : fs::directory_iterator(mpath.parent_path())) {
      const auto name = entry.path().filename().string();
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && name.rfind("trace_", 0) == 0 &&
          (ext == ".csv" || ext == ".json")) {
        traces.push_back(entry.path());
      }
    }
    std::sort(traces.begin(), traces.end());
    if (traces.empty()) throw IoError("no trace files next to " + mpath.string());
    for (const auto& t : traces) {
      RunSummary r = summarize_trace(read_trace(t), v.target);
      const auto stem = t.stem().string();
      if (const auto pos = stem.find("seed"); pos != std::string::npos) {
        r.seed = std::strtoull(stem.c_str() + pos + 4, nullptr, 10);
      }
      if (manifest.contains("runs")) {
        for (const auto& run : manifest["runs"]) {
          if (run.value("seed", std::uint64_t{0}) != r.seed) continue;
          const auto term = run.value("termination", "");
          if (term == "numerical_failure") {
            r.termination = Termination::numerical_failure;
            summary.any_numerical_failure = true;
          } else if (term == "target_reached") {
            r.termination = Termination::target_reached;
          } else if (term == "budget_exhausted") {
            r.termination = Termination::budget_exhausted;
          }
        }
      }
      v.runs.push_back(r);
    }
    aggregate(v);
    summary.variants.push_back(std::move(v));
  }
  return summary;
}

std::string summary_json(const ExperimentSummary& summary) {
  json variants = json::array();
  for (const auto& v : summary.variants) variants.push_back(variant_json(v));
  return json{{"experiment", summary.name}, {"variants", variants}}.dump(2) + "\n";
}

std::string summary_table(const ExperimentSummary& summary) {
  auto cell = [](const std::optional<double>& v, bool has_target) -> std::string {
    if (!has_target) return "-";
    if (!v) return "unreached";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return buf;
  };
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %5s %8s %12s %10s %14s %12s %14s\n", "variant", "runs",
                "reached", "itr(median)", "itr(IQR)", "queries(med)", "queries(IQR)",
                "ns/itr(median)");
  out << line;
  for (const auto& v : summary.variants) {
    std::size_t reached = 0;
    for (const auto& r : v.runs) reached += r.iterations_to_target ? 1 : 0;
    const bool t = v.target.has_value();
    std::snprintf(line, sizeof line, "%-28s %5zu %8zu %12s %10s %14s %12s %14s\n",
                  v.label.empty() ? "(default)" : v.label.c_str(), v.runs.size(), reached,
                  cell(v.iterations_to_target.median, t).c_str(),
                  cell(v.iterations_to_target.iqr, t).c_str(),
                  cell(v.queries_to_target.median, t).c_str(),
                  cell(v.queries_to_target.iqr, t).c_str(),
                  cell(v.mean_compute_nanos.median, true).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace zobcd
