// Monte Carlo benchmark tables. Every replicate draws from its own seed
// stream, derived from the master seed and the cell it belongs to, so the
// tables do not depend on how replicates are scheduled across threads.

#include "npn/harness/commands.hpp"
#include "npn/harness/pipeline.hpp"
#include "npn/local_inference.hpp"
#include "npn/parallel.hpp"

#include <chrono>
#include <cmath>

namespace npn::harness {

namespace {

constexpr std::uint64_t kGraphStream = 1000;
constexpr std::uint64_t kCellStream = 2000;
constexpr std::uint64_t kEdgeStream = 3000;
constexpr std::uint64_t kStepStream = 4000;

struct Tally {
  int reps = 0;
  int failures = 0;
  int rejections = 0;

  double rate() const { return ok() > 0 ? static_cast<double>(rejections) / ok() : std::nan(""); }
  double se() const {
    const double p = rate();
    return ok() > 0 ? std::sqrt(p * (1.0 - p) / ok()) : std::nan("");
  }
  int ok() const { return reps - failures; }
};

Tally tally(const std::vector<ReplicateOutcome>& outcomes, bool score, double alpha) {
  Tally t;
  for (const auto& o : outcomes) {
    ++t.reps;
    if (!o.ok) {
      ++t.failures;
      continue;
    }
    if (rejects(score ? o.score_stat : o.wald_stat, alpha)) ++t.rejections;
  }
  return t;
}

void require_usage(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void check_run(const RunConfig& cfg) {
  require_usage(cfg.reps.has_value(), cfg.command + " needs --reps");
  require_usage(*cfg.reps >= 1, "--reps must be positive");
  require_usage(cfg.seed.has_value(), cfg.command + " needs --seed");
  require_usage(cfg.threads >= 1, "--threads must be positive");
  require_usage(cfg.cv_folds >= 2, "--cv-folds must be at least 2");
  for (double a : cfg.alphas) require_usage(a > 0.0 && a < 1.0, "--alpha must lie in (0, 1)");
  for (double l : cfg.lambda_grid) require_usage(l > 0.0 && std::isfinite(l), "--lambda-grid values must be positive");
  if (cfg.d) require_usage(*cfg.d >= 4, "--d must be at least 4");
  if (cfg.n) require_usage(*cfg.n >= 2 * cfg.cv_folds, "--n must be at least twice --cv-folds");
}

GraphModelSpec model_spec(const RunConfig& cfg, GraphKind kind, int d, std::uint64_t seed) {
  GraphModelSpec spec;
  spec.kind = kind;
  spec.d = d;
  spec.edge_weight = cfg.edge_weight;
  spec.diag_shift = cfg.diag_shift;
  spec.seed = mix_seed(seed, kGraphStream + static_cast<std::uint64_t>(kind));
  spec.scale_free_extra_edge = cfg.scale_free_extra_edge;
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

std::string edge_label(Edge e) { return std::to_string(e.j + 1) + "-" + std::to_string(e.k + 1); }

Json table_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r;
    for (std::size_t c = 0; c < t.columns.size(); ++c) r[t.columns[c]] = row[c];
    rows.push_back(std::move(r));
  }
  return rows;
}

Json write_benchmark(const RunConfig& cfg, const Table& table, double wall) {
  require_usage(!cfg.output.empty(), cfg.command + " needs --output");
  write_table_csv(cfg.output, table, config_comment(cfg));
  Json payload;
  payload["table"] = cfg.output;
  payload["rows"] = table_json(table);
  Json env = envelope(cfg.command, config_json(cfg), std::move(payload), cfg.threads, wall);
  write_json(sibling_path(cfg.output, ".json"), env);
  return env;
}

}  // namespace

Table benchmark_type1_table(const RunConfig& cfg) {
  check_run(cfg);
  const std::uint64_t seed = *cfg.seed;
  const int d = cfg.d.value_or(50);
  const int n = cfg.n.value_or(100);
  const int reps = *cfg.reps;
  const auto graphs = cfg.graphs.empty() ? std::vector{GraphKind::ScaleFree, GraphKind::Band3} : cfg.graphs;
  const auto transforms =
      cfg.transforms.empty() ? std::vector{TransformKind::ExtendedSqrt, TransformKind::Cubic} : cfg.transforms;
  const auto alphas = cfg.alphas.empty() ? std::vector{0.05, 0.10} : cfg.alphas;
  const ClimeConfig clime = clime_config(cfg);

  struct Cell {
    GraphKind graph;
    TransformKind transform;
    GroundTruth truth;
    Edge null_edge;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (GraphKind g : graphs) {
    const GroundTruth truth = make_truth(model_spec(cfg, g, d, seed));
    const Edge null_edge = first_absent_edge(truth.adjacency);
    for (TransformKind t : transforms) {
      const auto cell_id = kCellStream + 16 * static_cast<std::uint64_t>(g) + static_cast<std::uint64_t>(t);
      cells.push_back({g, t, truth, null_edge, mix_seed(seed, cell_id)});
    }
  }

  const int total = static_cast<int>(cells.size()) * reps;
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(total, cfg.threads, [&](int idx) {
    const Cell& c = cells[static_cast<std::size_t>(idx / reps)];
    const auto r = static_cast<std::uint64_t>(idx % reps);
    outcomes[static_cast<std::size_t>(idx)] = run_replicate(c.truth, n, c.transform, clime, c.null_edge, mix_seed(c.seed, r));
  });

  Table table;
  table.columns = {"graph", "transform", "d", "n", "null_edge", "test", "alpha",
                   "reps", "failures", "rejections", "rate", "mc_se"};
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& c = cells[ci];
    const std::vector<ReplicateOutcome> slice(outcomes.begin() + static_cast<std::ptrdiff_t>(ci) * reps,
                                              outcomes.begin() + static_cast<std::ptrdiff_t>(ci + 1) * reps);
    for (const bool score : {true, false}) {
      for (double alpha : alphas) {
        const Tally t = tally(slice, score, alpha);
        table.rows.push_back({to_string(c.graph), to_string(c.transform), std::to_string(d), std::to_string(n),
                              edge_label(c.null_edge), score ? "score" : "wald", format_short(alpha),
                              std::to_string(t.reps), std::to_string(t.failures), std::to_string(t.rejections),
                              format_short(t.rate()), format_short(t.se())});
      }
    }
  }
  return table;
}

Table benchmark_power_table(const RunConfig& cfg) {
  check_run(cfg);
  require_usage(cfg.graphs.size() <= 1, "bench-power takes a single --graph");
  require_usage(cfg.transforms.size() <= 1, "bench-power takes a single --transform");
  const std::uint64_t seed = *cfg.seed;
  const int d = cfg.d.value_or(30);
  const int n = cfg.n.value_or(200);
  const int reps = *cfg.reps;
  const GraphKind graph = cfg.graphs.empty() ? GraphKind::ScaleFree : cfg.graphs.front();
  const TransformKind transform = cfg.transforms.empty() ? TransformKind::ExtendedSqrt : cfg.transforms.front();
  const auto alphas = cfg.alphas.empty() ? std::vector{0.05} : cfg.alphas;
  std::vector<double> weights = cfg.weights;
  if (weights.empty())
    for (int s = 0; s <= 8; ++s) weights.push_back(0.1 * s);
  const ClimeConfig clime = clime_config(cfg);

  // The swept edge is drawn once from the existing edges of the graph.
  const IndexMatrix base = generate_graph(model_spec(cfg, graph, d, seed));
  const std::vector<Edge> edges = edge_list(base);
  require_usage(!edges.empty(), "graph has no edges to sweep");
  const Edge edge = edges[mix_seed(seed, kEdgeStream) % edges.size()];

  std::vector<GroundTruth> truths;
  for (double w : weights) {
    IndexMatrix adjacency = base;
    Matrix weight_matrix = Matrix::Constant(d, d, cfg.edge_weight);
    weight_matrix(edge.j, edge.k) = weight_matrix(edge.k, edge.j) = w;
    if (w == 0.0) adjacency(edge.j, edge.k) = adjacency(edge.k, edge.j) = 0;
    truths.push_back(weighted_to_truth(adjacency, weight_matrix, cfg.diag_shift));
  }

  const int steps = static_cast<int>(weights.size());
  const int total = steps * reps;
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(total, cfg.threads, [&](int idx) {
    const int s = idx / reps;
    const auto r = static_cast<std::uint64_t>(idx % reps);
    const std::uint64_t step_seed = mix_seed(seed, kStepStream + static_cast<std::uint64_t>(s));
    outcomes[static_cast<std::size_t>(idx)] =
        run_replicate(truths[static_cast<std::size_t>(s)], n, transform, clime, edge, mix_seed(step_seed, r));
  });

  Table table;
  table.columns = {"graph", "transform", "d",    "n",          "edge", "weight", "theta_star", "test",
                   "alpha", "reps",      "failures", "rejections", "rate", "mc_se", "K",         "psi"};
  for (int s = 0; s < steps; ++s) {
    const std::vector<ReplicateOutcome> slice(outcomes.begin() + static_cast<std::ptrdiff_t>(s) * reps,
                                              outcomes.begin() + static_cast<std::ptrdiff_t>(s + 1) * reps);
    // Noncentrality √n Θ*_jk / L with L averaged over successful replicates.
    double l_sum = 0.0;
    int l_count = 0;
    for (const auto& o : slice)
      if (o.ok) {
        l_sum += o.L;
        ++l_count;
      }
    const double theta_jk = truths[static_cast<std::size_t>(s)].theta_star(edge.j, edge.k);
    const double k_value = l_count > 0 ? std::sqrt(static_cast<double>(n)) * theta_jk / (l_sum / l_count) : std::nan("");
    for (const bool score : {true, false}) {
      for (double alpha : alphas) {
        const Tally t = tally(slice, score, alpha);
        table.rows.push_back({to_string(graph), to_string(transform), std::to_string(d), std::to_string(n),
                              edge_label(edge), format_short(weights[static_cast<std::size_t>(s)]),
                              format_short(theta_jk), score ? "score" : "wald", format_short(alpha),
                              std::to_string(t.reps), std::to_string(t.failures), std::to_string(t.rejections),
                              format_short(t.rate()), format_short(t.se()), format_short(k_value),
                              format_short(std::isfinite(k_value) ? local_power_curve(k_value, alpha) : std::nan(""))});
      }
    }
  }
  return table;
}

Json cmd_benchmark_type1(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Table table = benchmark_type1_table(cfg);
  return write_benchmark(cfg, table, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

Json cmd_benchmark_power(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Table table = benchmark_power_table(cfg);
  return write_benchmark(cfg, table, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

}  // namespace npn::harness
