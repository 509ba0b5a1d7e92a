#pragma once

#include "npn/local_inference.hpp"
#include "npn/precision.hpp"
#include "npn/rank_correlation.hpp"
#include "npn/synthetic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace npn::harness {

struct FitOutcome {
  CorrelationEstimate correlation;
  CrossValidationResult cv;
  PrecisionEstimate estimate;
  bool cross_validated = false;
};

/// τ̂ and Σ̂, λ by cross-validation (skipped when the grid has one value),
/// then CLIME at the chosen λ.
FitOutcome fit_samples(const SampleMatrix& x, const ClimeConfig& cfg, std::uint64_t seed, int threads = 1);

/// Draws n Gaussian samples from the truth and applies the marginal transform.
SampleMatrix simulate_samples(const GroundTruth& truth, int n, TransformKind transform, std::uint64_t seed);

/// One Monte Carlo replicate: simulate, fit, test `edge`.
struct ReplicateOutcome {
  bool ok = false;
  std::string failure;
  double score_stat = 0.0;
  double wald_stat = 0.0;
  double L = 0.0;  ///< 2 σ̂ Θ̂_jj Θ̂_kk
  double lambda = 0.0;
};

ReplicateOutcome run_replicate(const GroundTruth& truth, int n, TransformKind transform, const ClimeConfig& cfg,
                               Edge edge, std::uint64_t seed);

/// Reject at level α iff stat² > Φ^{-1}(1 − α/2)².
bool rejects(double stat, double alpha);

/// Lowest-index (j, k) with no edge in the adjacency.
Edge first_absent_edge(const IndexMatrix& adjacency);

}  // namespace npn::harness
