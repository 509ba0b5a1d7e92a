#pragma once

#include "npn/common.hpp"
#include "npn/local_inference.hpp"

#include <string>
#include <vector>

namespace npn {

/// All pairs (j, k) with j < k.
std::vector<Edge> all_edges(int d);

/// Per-sample, per-edge multiplier weights
/// z_ijk = −b̂_(jk)^T vec(F̂ ⊙ Ĝ^i) / (2σ̂_jk).
///
/// Edges whose variance hits the floor (or whose diagonal is degenerate) are
/// listed in `degenerate` with a reason and have no column in `z`.
struct MultiplierWeights {
  Matrix z;  ///< n × |edges|
  std::vector<Edge> edges;
  Vector per_edge_sigma;
  Vector per_edge_L;  ///< 2 σ̂_jk Θ̂_jj Θ̂_kk
  std::vector<Edge> degenerate;
  std::vector<std::string> warnings;
};

MultiplierWeights multiplier_weights(const InferenceContext& ctx, const std::vector<Edge>& edges);

/// n_bootstrap realizations of W = max_edges n^{-1/2} Σ_i z_ijk e_i. Replicate b
/// draws its multipliers e_1..e_n from a stream seeded by (seed, b); one vector
/// is shared across all edges of that replicate.
std::vector<double> bootstrap_sup_draws(const MultiplierWeights& w, int n_bootstrap, std::uint64_t seed);

/// Order statistic at 1-based index ceil(level · m) of the draws.
double empirical_quantile(std::vector<double> draws, double level);

/// c_W(1 − α/2) from bootstrap_sup_draws. Requires n_bootstrap >= 100.
double bootstrap_sup_quantile(const MultiplierWeights& w, int n_bootstrap, double alpha, std::uint64_t seed);

struct EdgeInterval {
  Edge edge;
  double theta_w = 0.0;
  double L = 0.0;
  double low = 0.0;
  double high = 0.0;
  bool degenerate = false;
  bool retained = false;
};

struct SubgraphReport {
  double alpha = 0.05;
  /// c_W(1 − α/2), the raw bootstrap quantile of W.
  double c_w = 0.0;
  /// Multiplier applied to L_jk / √n. W's coordinates have variance 1/4
  /// while the pivot max √n |Θ̂^W − Θ*| / L has unit-variance coordinates,
  /// so the critical value is 2 · c_W.
  double critical = 0.0;
  int n_bootstrap = 0;
  std::uint64_t seed = 0;
  int n = 0;
  std::vector<EdgeInterval> intervals;
  std::vector<Edge> retained_edges;
  /// critical >= Φ^{-1}(1 − α/2), i.e. every uniform interval contains its
  /// pointwise counterpart.
  bool contains_pointwise = false;
  std::vector<std::string> warnings;
};

/// Uniform intervals and the confidence subgraph. An edge is retained iff its
/// interval excludes 0; degenerate edges get (−∞, ∞) and are never retained.
/// An empty `edges` means all pairs.
SubgraphReport confidence_subgraph(const InferenceContext& ctx, double alpha, int n_bootstrap, std::uint64_t seed,
                                   const std::vector<Edge>& edges = {});

/// Same construction from precomputed weights and draws, so several α levels
/// can share one set of bootstrap replicates.
SubgraphReport subgraph_from_draws(const InferenceContext& ctx, const MultiplierWeights& w,
                                   const std::vector<double>& draws, double alpha, std::uint64_t seed,
                                   const std::vector<Edge>& edges);

}  // namespace npn
