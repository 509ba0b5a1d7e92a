#include "npn/harness/commands.hpp"

#include "npn/global_inference.hpp"
#include "npn/harness/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>

namespace npn::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

std::uint64_t require_seed(const RunConfig& cfg) {
  require(cfg.seed.has_value(), cfg.command + " needs --seed");
  return *cfg.seed;
}

double single_alpha(const RunConfig& cfg) {
  require(cfg.alphas.size() <= 1, cfg.command + " takes a single --alpha");
  return cfg.alphas.empty() ? 0.05 : cfg.alphas.front();
}

void check_common(const RunConfig& cfg) {
  for (double a : cfg.alphas) require(a > 0.0 && a < 1.0, "--alpha must lie in (0, 1)");
  for (double l : cfg.lambda_grid) require(l > 0.0 && std::isfinite(l), "--lambda-grid values must be positive");
  require(cfg.cv_folds >= 2, "--cv-folds must be at least 2");
  require(cfg.bootstrap >= 1, "--bootstrap must be positive");
  require(cfg.threads >= 1, "--threads must be positive");
  if (cfg.reps) require(*cfg.reps >= 1, "--reps must be positive");
  if (cfg.d) require(*cfg.d >= 1, "--d must be positive");
  if (cfg.n) require(*cfg.n >= 1, "--n must be positive");
  if (cfg.edge) require(cfg.edge->j != cfg.edge->k, "--edge endpoints must differ");
}

SampleMatrix load_input(const RunConfig& cfg) {
  require(!cfg.input.empty(), cfg.command + " needs --input");
  return read_samples_csv(cfg.input);
}

void require_output(const RunConfig& cfg) { require(!cfg.output.empty(), cfg.command + " needs --output"); }

/// Fitted (or loaded) estimate plus the context edge inference reads.
struct Prepared {
  InferenceContext ctx;
  Json fit_summary;
};

Prepared prepare(const RunConfig& cfg, const SampleMatrix& x) {
  Prepared p;
  if (!cfg.estimate.empty()) {
    PrecisionEstimate est = precision_from_json(read_json(cfg.estimate));
    if (est.theta.rows() != x.d()) throw DataError("estimate in '" + cfg.estimate + "' does not match the data dimension");
    p.fit_summary = {{"source", "file"}, {"lambda", est.lambda}};
    p.ctx = make_context(x, std::move(est));
    return p;
  }
  const ClimeConfig clime = clime_config(cfg);
  const std::uint64_t seed = clime.lambda_grid.size() == 1 ? cfg.seed.value_or(0) : require_seed(cfg);
  FitOutcome fit = fit_samples(x, clime, seed, cfg.threads);
  p.fit_summary = {{"source", "fit"}, {"lambda", fit.estimate.lambda}, {"cross_validated", fit.cross_validated}};
  p.ctx = make_context(x, std::move(fit.correlation.sigma_hat), std::move(fit.estimate));
  return p;
}

Edge checked_edge(const RunConfig& cfg, Eigen::Index d) {
  require(cfg.edge.has_value(), cfg.command + " needs --edge j,k");
  Edge e = *cfg.edge;
  if (e.j > e.k) std::swap(e.j, e.k);
  require(e.j >= 0 && e.k < d, "--edge index out of range for d = " + std::to_string(d));
  return e;
}

}  // namespace

Json config_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["input"] = cfg.input.empty() ? Json(nullptr) : Json(cfg.input);
  j["estimate"] = cfg.estimate.empty() ? Json(nullptr) : Json(cfg.estimate);
  j["d"] = optional_json(cfg.d);
  j["n"] = optional_json(cfg.n);
  Json graphs = Json::array();
  for (auto g : cfg.graphs) graphs.push_back(to_string(g));
  j["graph"] = std::move(graphs);
  Json transforms = Json::array();
  for (auto t : cfg.transforms) transforms.push_back(to_string(t));
  j["transform"] = std::move(transforms);
  j["alpha"] = cfg.alphas;
  j["lambda_grid"] = cfg.lambda_grid;
  j["cv_folds"] = cfg.cv_folds;
  j["bootstrap"] = cfg.bootstrap;
  j["reps"] = optional_json(cfg.reps);
  j["seed"] = optional_json(cfg.seed);
  j["edge"] = cfg.edge ? edge_json(*cfg.edge) : Json(nullptr);
  j["weights"] = cfg.weights;
  j["edge_weight"] = cfg.edge_weight;
  j["diag_shift"] = cfg.diag_shift;
  j["scale_free_extra_edge"] = cfg.scale_free_extra_edge;
  return j;
}

std::string config_comment(const RunConfig& cfg) { return "config " + config_json(cfg).dump(); }

ClimeConfig clime_config(const RunConfig& cfg) {
  ClimeConfig c;
  c.lambda_grid = cfg.lambda_grid;
  std::sort(c.lambda_grid.begin(), c.lambda_grid.end());
  c.cv_folds = cfg.cv_folds;
  return c;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

std::string format_short(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json cmd_simulate(const RunConfig& cfg) {
  const auto start = Clock::now();
  check_common(cfg);
  require_output(cfg);
  require(cfg.d.has_value() && cfg.n.has_value(), "simulate needs --d and --n");
  require(cfg.graphs.size() == 1, "simulate needs exactly one --graph");
  require(cfg.transforms.size() <= 1, "simulate takes a single --transform");
  const std::uint64_t seed = require_seed(cfg);

  GraphModelSpec spec;
  spec.kind = cfg.graphs.front();
  spec.d = *cfg.d;
  spec.edge_weight = cfg.edge_weight;
  spec.diag_shift = cfg.diag_shift;
  spec.seed = mix_seed(seed, 0);
  spec.scale_free_extra_edge = cfg.scale_free_extra_edge;
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const TransformKind transform = cfg.transforms.empty() ? TransformKind::Identity : cfg.transforms.front();
  const GroundTruth truth = make_truth(spec);
  const SampleMatrix x = simulate_samples(truth, *cfg.n, transform, mix_seed(seed, 1));

  write_samples_csv(cfg.output, x, config_comment(cfg));
  Json payload;
  payload["samples"] = cfg.output;
  payload["graph"] = to_string(spec.kind);
  payload["transform"] = to_string(transform);
  payload["seed"] = seed;
  payload["n"] = *cfg.n;
  payload["truth"] = to_json(truth);
  Json env = envelope(cfg.command, config_json(cfg), std::move(payload), cfg.threads, seconds_since(start));
  write_json(sibling_path(cfg.output, ".truth.json"), env);
  return env;
}

Json cmd_fit(const RunConfig& cfg) {
  const auto start = Clock::now();
  check_common(cfg);
  require_output(cfg);
  const ClimeConfig clime = clime_config(cfg);
  const std::uint64_t seed = clime.lambda_grid.size() == 1 ? cfg.seed.value_or(0) : require_seed(cfg);
  const SampleMatrix x = load_input(cfg);
  const FitOutcome fit = fit_samples(x, clime, seed, cfg.threads);

  Json payload;
  payload["n"] = x.n();
  payload["d"] = x.d();
  payload["cross_validated"] = fit.cross_validated;
  payload["cross_validation"] = to_json(fit.cv);
  payload["tau"] = matrix_json(fit.correlation.tau);
  payload["sigma_hat"] = matrix_json(fit.correlation.sigma_hat);
  payload["estimate"] = to_json(fit.estimate);
  Json env = envelope(cfg.command, config_json(cfg), std::move(payload), cfg.threads, seconds_since(start));
  write_json(cfg.output, env);
  return env;
}

Json cmd_test_edge(const RunConfig& cfg) {
  const auto start = Clock::now();
  check_common(cfg);
  require_output(cfg);
  const double alpha = single_alpha(cfg);
  const SampleMatrix x = load_input(cfg);
  const Edge e = checked_edge(cfg, x.d());
  const Prepared p = prepare(cfg, x);
  const EdgeTestReport report = test_edge(p.ctx, e.j, e.k, alpha);
  validate_report(report);

  Json payload;
  payload["fit"] = p.fit_summary;
  payload["report"] = to_json(report);
  Json env = envelope(cfg.command, config_json(cfg), std::move(payload), cfg.threads, seconds_since(start));
  write_json(cfg.output, env);
  return env;
}

Json cmd_subgraph(const RunConfig& cfg) {
  const auto start = Clock::now();
  check_common(cfg);
  require_output(cfg);
  const double alpha = single_alpha(cfg);
  require(cfg.bootstrap >= 100, "--bootstrap must be at least 100");
  const std::uint64_t seed = require_seed(cfg);
  const SampleMatrix x = load_input(cfg);
  const Prepared p = prepare(cfg, x);
  const SubgraphReport report = confidence_subgraph(p.ctx, alpha, cfg.bootstrap, mix_seed(seed, 2));

  Json payload;
  payload["fit"] = p.fit_summary;
  payload["subgraph"] = to_json(report);
  const std::string dot_path = sibling_path(cfg.output, ".dot");
  payload["dot"] = dot_path;
  write_text(dot_path, subgraph_dot(report, static_cast<int>(x.d()), config_json(cfg)));
  Json env = envelope(cfg.command, config_json(cfg), std::move(payload), cfg.threads, seconds_since(start));
  write_json(cfg.output, env);
  return env;
}

Json run_command(const RunConfig& cfg) {
  if (cfg.command == "simulate") return cmd_simulate(cfg);
  if (cfg.command == "fit") return cmd_fit(cfg);
  if (cfg.command == "test-edge") return cmd_test_edge(cfg);
  if (cfg.command == "subgraph") return cmd_subgraph(cfg);
  if (cfg.command == "bench-type1") return cmd_benchmark_type1(cfg);
  if (cfg.command == "bench-power") return cmd_benchmark_power(cfg);
  throw UsageError("unknown command '" + cfg.command + "'");
}

}  // namespace npn::harness
