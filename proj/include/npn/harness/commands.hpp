#pragma once

#include "npn/harness/csv.hpp"
#include "npn/harness/records.hpp"
#include "npn/synthetic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace npn::harness {

/// Bad command-line usage; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::string estimate;  ///< optional precision JSON reused by test-edge / subgraph
  std::optional<int> d;
  std::optional<int> n;
  std::vector<GraphKind> graphs;
  std::vector<TransformKind> transforms;
  std::vector<double> alphas;
  std::vector<double> lambda_grid;
  int cv_folds = 5;
  int bootstrap = 1000;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::optional<Edge> edge;      ///< 0-based
  std::vector<double> weights;   ///< bench-power sweep
  double edge_weight = 0.3;
  double diag_shift = 0.2;
  bool scale_free_extra_edge = false;
};

/// Config echo embedded in every output. Thread count and output paths are
/// left out so that reruns at other thread counts produce identical files.
Json config_json(const RunConfig& cfg);
std::string config_comment(const RunConfig& cfg);

ClimeConfig clime_config(const RunConfig& cfg);

/// Each command validates `cfg` (UsageError), writes its files, and returns
/// the JSON envelope it wrote.
Json cmd_simulate(const RunConfig& cfg);
Json cmd_fit(const RunConfig& cfg);
Json cmd_test_edge(const RunConfig& cfg);
Json cmd_subgraph(const RunConfig& cfg);
Json cmd_benchmark_type1(const RunConfig& cfg);
Json cmd_benchmark_power(const RunConfig& cfg);

Json run_command(const RunConfig& cfg);

/// Benchmark tables without any file I/O.
Table benchmark_type1_table(const RunConfig& cfg);
Table benchmark_power_table(const RunConfig& cfg);

/// `path` with its extension replaced (or `suffix` appended when it has none).
std::string sibling_path(const std::string& path, const std::string& suffix);

/// Shortest decimal that round-trips, for human-facing table cells.
std::string format_short(double v);

}  // namespace npn::harness
