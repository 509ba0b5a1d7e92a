#include "npn/global_inference.hpp"

#include "npn/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace npn {

std::vector<Edge> all_edges(int d) {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) out.push_back({j, k});
  return out;
}

namespace {

std::string edge_name(const Edge& e) {
  std::ostringstream s;
  s << "(" << e.j << "," << e.k << ")";
  return s.str();
}

Edge normalized(Edge e, int d) {
  if (e.j > e.k) std::swap(e.j, e.k);
  if (e.j < 0 || e.k >= d) throw InvalidArgument("edge " + edge_name(e) + " out of range");
  if (e.j == e.k) throw InvalidArgument("edge endpoints must differ");
  return e;
}

}  // namespace

MultiplierWeights multiplier_weights(const InferenceContext& ctx, const std::vector<Edge>& edges) {
  if (edges.empty()) throw InvalidArgument("multiplier weights need at least one edge");
  const int d = static_cast<int>(ctx.sigma_hat.rows());
  const auto& theta = ctx.estimate.theta;

  MultiplierWeights w;
  std::vector<Vector> columns;
  std::vector<double> sigmas, ls;
  for (Edge e : edges) {
    e = normalized(e, d);
    Vector contractions;
    try {
      contractions = hajek_contractions(ctx.signs, ctx.sigma_hat, theta, ctx.estimate.theta_inv, e.j, e.k);
    } catch (const DegenerateDiagonal& err) {
      w.degenerate.push_back(e);
      w.warnings.push_back("edge " + edge_name(e) + " excluded: " + err.what());
      continue;
    }
    const VarianceEstimate var = estimate_variance(contractions);
    if (var.floored) {
      w.degenerate.push_back(e);
      w.warnings.push_back("edge " + edge_name(e) + " excluded: variance estimate at floor");
      continue;
    }
    const double sd = std::sqrt(var.sigma2);
    columns.push_back(-contractions / (2.0 * sd));
    sigmas.push_back(sd);
    ls.push_back(2.0 * sd * theta(e.j, e.j) * theta(e.k, e.k));
    w.edges.push_back(e);
  }

  const auto m = static_cast<Eigen::Index>(columns.size());
  w.z.resize(ctx.n, m);
  w.per_edge_sigma.resize(m);
  w.per_edge_L.resize(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    w.z.col(c) = columns[static_cast<std::size_t>(c)];
    w.per_edge_sigma(c) = sigmas[static_cast<std::size_t>(c)];
    w.per_edge_L(c) = ls[static_cast<std::size_t>(c)];
  }
  return w;
}

std::vector<double> bootstrap_sup_draws(const MultiplierWeights& w, int n_bootstrap, std::uint64_t seed) {
  if (n_bootstrap < 1) throw InvalidArgument("bootstrap needs at least one replicate");
  const Eigen::Index n = w.z.rows();
  const Eigen::Index m = w.z.cols();
  std::vector<double> draws(static_cast<std::size_t>(n_bootstrap), 0.0);
  if (m == 0) return draws;

  constexpr int kChunk = 256;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix multipliers(n, kChunk);
  for (int start = 0; start < n_bootstrap; start += kChunk) {
    const int cols = std::min(kChunk, n_bootstrap - start);
    for (int b = 0; b < cols; ++b) {
      std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(start + b)));
      std::normal_distribution<double> normal;
      for (Eigen::Index i = 0; i < n; ++i) multipliers(i, b) = normal(rng);
    }
    const Matrix sums = w.z.transpose() * multipliers.leftCols(cols);
    for (int b = 0; b < cols; ++b) draws[static_cast<std::size_t>(start + b)] = sums.col(b).maxCoeff() * inv_sqrt_n;
  }
  return draws;
}

double empirical_quantile(std::vector<double> draws, double level) {
  if (draws.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(level > 0.0 && level <= 1.0)) throw InvalidArgument("quantile level must lie in (0, 1]");
  const auto m = draws.size();
  auto index = static_cast<std::size_t>(std::ceil(level * static_cast<double>(m)));
  index = std::clamp<std::size_t>(index, 1, m);
  std::nth_element(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(index - 1), draws.end());
  return draws[index - 1];
}

double bootstrap_sup_quantile(const MultiplierWeights& w, int n_bootstrap, double alpha, std::uint64_t seed) {
  if (n_bootstrap < 100) throw InvalidArgument("bootstrap needs at least 100 replicates");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  return empirical_quantile(bootstrap_sup_draws(w, n_bootstrap, seed), 1.0 - alpha / 2.0);
}

SubgraphReport subgraph_from_draws(const InferenceContext& ctx, const MultiplierWeights& w,
                                   const std::vector<double>& draws, double alpha, std::uint64_t seed,
                                   const std::vector<Edge>& edges) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const int d = static_cast<int>(ctx.sigma_hat.rows());
  SubgraphReport report;
  report.alpha = alpha;
  report.n = ctx.n;
  report.n_bootstrap = static_cast<int>(draws.size());
  report.seed = seed;
  report.warnings = w.warnings;
  report.c_w = empirical_quantile(draws, 1.0 - alpha / 2.0);
  report.critical = 2.0 * report.c_w;
  report.contains_pointwise = report.critical >= normal_quantile(1.0 - alpha / 2.0);

  const double root_n = std::sqrt(static_cast<double>(ctx.n));
  const double inf = std::numeric_limits<double>::infinity();
  std::size_t col = 0;
  for (Edge e : edges) {
    e = normalized(e, d);
    EdgeInterval iv;
    iv.edge = e;
    const bool has_weights = col < w.edges.size() && w.edges[col] == e;
    if (has_weights) {
      iv.L = w.per_edge_L(static_cast<Eigen::Index>(col));
      ++col;
      try {
        iv.theta_w = wald_estimate(ctx.sigma_hat, ctx.estimate.theta, e.j, e.k);
        const double half = std::abs(report.critical * iv.L) / root_n;
        iv.low = iv.theta_w - half;
        iv.high = iv.theta_w + half;
        iv.retained = iv.low > 0.0 || iv.high < 0.0;
      } catch (const DegenerateDenominator& err) {
        iv.degenerate = true;
        report.warnings.push_back("edge " + edge_name(e) + " removed: " + err.what());
      }
    } else {
      iv.degenerate = true;
    }
    if (iv.degenerate) {
      iv.theta_w = std::numeric_limits<double>::quiet_NaN();
      iv.low = -inf;
      iv.high = inf;
      iv.retained = false;
    }
    if (iv.retained) report.retained_edges.push_back(e);
    report.intervals.push_back(iv);
  }
  if (col != w.edges.size()) throw InvalidArgument("multiplier weights do not match the edge list");
  return report;
}

SubgraphReport confidence_subgraph(const InferenceContext& ctx, double alpha, int n_bootstrap, std::uint64_t seed,
                                   const std::vector<Edge>& edges) {
  if (n_bootstrap < 100) throw InvalidArgument("bootstrap needs at least 100 replicates");
  const int d = static_cast<int>(ctx.sigma_hat.rows());
  std::vector<Edge> list = edges.empty() ? all_edges(d) : edges;
  for (auto& e : list) e = normalized(e, d);
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());

  const MultiplierWeights w = multiplier_weights(ctx, list);
  const std::vector<double> draws = bootstrap_sup_draws(w, n_bootstrap, seed);
  return subgraph_from_draws(ctx, w, draws, alpha, seed, list);
}

}  // namespace npn
