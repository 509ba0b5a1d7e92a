#pragma once

#include "npn/common.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace npn {

enum class GraphKind { ScaleFree, Hub, Band3 };
enum class TransformKind { Identity, ExtendedSqrt, Cubic };

std::string to_string(GraphKind kind);
std::string to_string(TransformKind kind);
GraphKind parse_graph_kind(std::string_view name);          // scale-free | hub | band3
TransformKind parse_transform_kind(std::string_view name);  // identity | sqrt | cubic

struct GraphModelSpec {
  GraphKind kind = GraphKind::ScaleFree;
  int d = 0;
  double edge_weight = 0.3;
  double diag_shift = 0.2;
  std::uint64_t seed = 0;
  int hub_group_size = 20;
  /// Scale-free only: add one more preferential edge so the graph has d edges.
  bool scale_free_extra_edge = false;

  void validate() const;
};

struct GroundTruth {
  IndexMatrix adjacency;
  Matrix theta_star;  ///< rescaled so that its inverse has unit diagonal
  Matrix sigma_star;  ///< correlation matrix
  std::vector<Edge> edge_set;
};

/// Preferential attachment tree grown from the chain 0 – 1. Node m attaches to
/// an existing node i with probability deg(i) / Σ deg. With `extra_edge` one
/// further edge is drawn between a uniform node and a degree-weighted
/// non-neighbor.
IndexMatrix gen_scale_free(int d, std::uint64_t seed, bool extra_edge = false);

/// d / group_size disjoint stars; the first node of each group is its hub.
IndexMatrix gen_hub(int d, int group_size = 20);

/// A_jk = 1 iff 1 <= |j − k| <= 3.
IndexMatrix gen_band3(int d);

IndexMatrix generate_graph(const GraphModelSpec& spec);

std::vector<Edge> edge_list(const IndexMatrix& adjacency);

/// Θ = W + (|λ_min(W)| + diag_shift) I for the weighted adjacency W, then
/// Σ* = D^{-1/2} Θ^{-1} D^{-1/2} and Θ* = D^{1/2} Θ D^{1/2}, D = diag(Θ^{-1}).
GroundTruth weighted_to_truth(const IndexMatrix& adjacency, const Matrix& weights, double diag_shift);

/// weighted_to_truth with every edge weighted by edge_weight.
GroundTruth adjacency_to_truth(const IndexMatrix& adjacency, double edge_weight, double diag_shift);

GroundTruth make_truth(const GraphModelSpec& spec);

/// n draws of N(0, Σ*) through the lower Cholesky factor. Throws
/// FactorizationFailure when Σ* is not positive definite.
SampleMatrix sample_gaussian(const Matrix& sigma_star, int n, std::uint64_t seed);

// E|Z| for Z ~ N(0,1): √(2/π) = 0.797884560803
inline constexpr double kAbsMomentNormal = 0.79788456080286535588;
// E Z⁶ = 15.0000000000
inline constexpr double kSixthMomentNormal = 15.0;

/// Entrywise f^{-1}: sqrt gives sign(z)|z|^{1/2} / (E|Z|)^{1/2},
/// cubic gives z³ / (E Z⁶)^{1/2}.
SampleMatrix apply_npn_transform(const SampleMatrix& x, TransformKind kind);

}  // namespace npn
