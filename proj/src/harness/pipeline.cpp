#include "npn/harness/pipeline.hpp"

#include "npn/normal.hpp"

#include <cmath>

namespace npn::harness {

FitOutcome fit_samples(const SampleMatrix& x, const ClimeConfig& cfg, std::uint64_t seed, int threads) {
  cfg.validate();
  FitOutcome out;
  out.correlation = estimate_correlation(x);
  double lambda = 0.0;
  if (cfg.lambda_grid.size() == 1) {
    lambda = cfg.lambda_grid.front();
    out.cv.lambda = lambda;
    out.cv.grid = cfg.lambda_grid;
  } else {
    out.cv = cross_validate(x, cfg, seed, threads);
    out.cross_validated = true;
    lambda = out.cv.lambda;
  }
  out.estimate = fit_precision(out.correlation.sigma_hat, lambda, cfg);
  return out;
}

SampleMatrix simulate_samples(const GroundTruth& truth, int n, TransformKind transform, std::uint64_t seed) {
  return apply_npn_transform(sample_gaussian(truth.sigma_star, n, seed), transform);
}

ReplicateOutcome run_replicate(const GroundTruth& truth, int n, TransformKind transform, const ClimeConfig& cfg,
                               Edge edge, std::uint64_t seed) {
  ReplicateOutcome out;
  try {
    const SampleMatrix x = simulate_samples(truth, n, transform, mix_seed(seed, 0));
    FitOutcome fit = fit_samples(x, cfg, mix_seed(seed, 1));
    out.lambda = fit.estimate.lambda;
    const InferenceContext ctx = make_context(x, std::move(fit.correlation.sigma_hat), std::move(fit.estimate));
    const EdgeTestReport r = test_edge(ctx, edge.j, edge.k, 0.05);
    out.score_stat = r.score_stat;
    out.wald_stat = r.wald_stat;
    out.L = 2.0 * std::sqrt(r.sigma2_hat) / r.h_partial;
    out.ok = std::isfinite(out.score_stat) && std::isfinite(out.wald_stat);
    if (!out.ok) out.failure = "non-finite statistic";
  } catch (const Error& e) {
    out.ok = false;
    out.failure = e.what();
  }
  return out;
}

bool rejects(double stat, double alpha) {
  const double q = -normal_quantile(alpha / 2.0);
  return stat * stat > q * q;
}

Edge first_absent_edge(const IndexMatrix& adjacency) {
  for (int j = 0; j < adjacency.rows(); ++j)
    for (int k = j + 1; k < adjacency.cols(); ++k)
      if (adjacency(j, k) == 0) return {j, k};
  throw InvalidArgument("graph is complete; no null edge available");
}

}  // namespace npn::harness
