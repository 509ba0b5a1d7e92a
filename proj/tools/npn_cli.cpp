// Command-line front end. Exit codes: 0 success, 2 usage error, 3 data error,
// 4 solver non-convergence.

#include "npn/harness/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kUsage = 2;
constexpr int kData = 3;
constexpr int kSolver = 4;

npn::Edge parse_edge(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw npn::harness::UsageError("--edge expects j,k");
  try {
    std::size_t used = 0;
    const int j = std::stoi(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("j");
    const std::string rest = text.substr(comma + 1);
    const int k = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("k");
    if (j < 1 || k < 1) throw npn::harness::UsageError("--edge indices are 1-based");
    if (j == k) throw npn::harness::UsageError("--edge endpoints must differ");
    return {j - 1, k - 1};
  } catch (const std::logic_error&) {
    throw npn::harness::UsageError("--edge expects two integers j,k");
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace npn::harness;

  CLI::App app{"Inference for nonparanormal graphical models"};
  app.require_subcommand(1, 1);

  RunConfig cfg;
  std::vector<std::string> graphs, transforms;
  std::string edge_text;
  int d = 0, n = 0, reps = 0;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "Simulate a nonparanormal sample and its ground truth"},
      {"fit", "Cross-validated CLIME precision estimate"},
      {"test-edge", "Score and Wald tests plus a confidence interval for one edge"},
      {"subgraph", "Multiplier-bootstrap confidence subgraph"},
      {"bench-type1", "Type-I error table over graph and transform cells"},
      {"bench-power", "Power curve along an edge-weight sweep"}};

  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--input", cfg.input, "Sample CSV");
    sub->add_option("--output", cfg.output, "Output path");
    sub->add_option("--estimate", cfg.estimate, "Precision JSON from 'fit' (skips refitting)");
    sub->add_option("--d", d, "Dimension");
    sub->add_option("--n", n, "Sample size");
    sub->add_option("--graph", graphs, "scale-free | hub | band3 (comma list for bench-type1)")->delimiter(',');
    sub->add_option("--transform", transforms, "identity | sqrt | cubic")->delimiter(',');
    sub->add_option("--alpha", cfg.alphas, "Significance level(s)")->delimiter(',');
    sub->add_option("--lambda-grid", cfg.lambda_grid, "Comma list of λ values; one value skips CV")->delimiter(',');
    sub->add_option("--cv-folds", cfg.cv_folds, "Cross-validation folds")->capture_default_str();
    sub->add_option("--bootstrap", cfg.bootstrap, "Bootstrap replicates")->capture_default_str();
    sub->add_option("--reps", reps, "Monte Carlo replications");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();
    sub->add_option("--edge", edge_text, "Edge j,k (1-based)");
    sub->add_option("--weights", cfg.weights, "bench-power weight grid")->delimiter(',');
    sub->add_option("--edge-weight", cfg.edge_weight, "Off-diagonal weight of true edges")->capture_default_str();
    sub->add_option("--diag-shift", cfg.diag_shift, "Diagonal shift above |λ_min|")->capture_default_str();
    sub->add_flag("--scale-free-extra-edge", cfg.scale_free_extra_edge, "Add one preferential edge (d edges)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (sub->count("--d")) cfg.d = d;
    if (sub->count("--n")) cfg.n = n;
    if (sub->count("--reps")) cfg.reps = reps;
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--edge")) cfg.edge = parse_edge(edge_text);
    for (const auto& g : graphs) cfg.graphs.push_back(npn::parse_graph_kind(g));
    for (const auto& t : transforms) cfg.transforms.push_back(npn::parse_transform_kind(t));
    run_command(cfg);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const npn::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const npn::NonConvergence& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return kSolver;
  } catch (const npn::Infeasible& e) {
    std::cerr << "solver failed: " << e.what() << "\n";
    return kSolver;
  } catch (const npn::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
}
