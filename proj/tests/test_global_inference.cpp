#include "npn/global_inference.hpp"
#include "npn/normal.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace npn;

namespace {

struct Fixture {
  Matrix x;
  InferenceContext ctx;
};

Fixture random_fixture(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Fixture f;
  f.x = oracle::random_normal(n, d, rng);
  PrecisionEstimate est;
  est.theta = oracle::random_precision(d, rng);
  est.theta_inv = est.theta.inverse();
  f.ctx = make_context(SampleMatrix(f.x), est);
  return f;
}

}  // namespace

TEST_CASE("all_edges enumerates j < k") {
  const auto e = all_edges(4);
  REQUIRE(e.size() == 6);
  CHECK(e.front() == Edge{0, 1});
  CHECK(e.back() == Edge{2, 3});
}

TEST_CASE("multiplier weights agree with the explicit decorrelation vector") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const int d = 3 + static_cast<int>(seed % 3);
    const Fixture f = random_fixture(6 + static_cast<int>(seed), d, seed);
    const MultiplierWeights w = multiplier_weights(f.ctx, all_edges(d));
    REQUIRE(w.degenerate.empty());
    const Matrix rows = oracle::hajek_rows_brute(f.x, f.ctx.sigma_hat, f.ctx.estimate.theta_inv);
    const double n = static_cast<double>(f.x.rows());
    for (std::size_t c = 0; c < w.edges.size(); ++c) {
      const Edge e = w.edges[c];
      const Vector b = oracle::decorrelation_vector(f.ctx.estimate.theta, e.j, e.k);
      const Vector proj = rows * b;
      const double sigma = std::sqrt(proj.squaredNorm() / n);
      const auto col = static_cast<Eigen::Index>(c);
      CHECK(std::abs(w.per_edge_sigma(col) - sigma) < 1e-10);
      CHECK((w.z.col(col) + proj / (2.0 * sigma)).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(std::abs(w.z.col(col).squaredNorm() / n - 0.25) < 1e-10);
      const Matrix& th = f.ctx.estimate.theta;
      CHECK(w.per_edge_L(col) == doctest::Approx(2.0 * sigma * th(e.j, e.j) * th(e.k, e.k)));
    }
  }
}

TEST_CASE("empirical quantile is the ceil(level m) order statistic") {
  std::vector<double> draws = {5, 1, 4, 2, 3};
  CHECK(empirical_quantile(draws, 0.5) == 3.0);
  CHECK(empirical_quantile(draws, 0.2) == 1.0);
  CHECK(empirical_quantile(draws, 0.21) == 2.0);
  CHECK(empirical_quantile(draws, 1.0) == 5.0);
}

TEST_CASE("bootstrap quantile: degenerate and single-edge cases") {
  MultiplierWeights zero;
  zero.z = Matrix::Zero(50, 3);
  zero.edges = {{0, 1}, {0, 2}, {1, 2}};
  CHECK(bootstrap_sup_quantile(zero, 200, 0.05, 1) == 0.0);

  // One edge with z_i = 1: W = n^{-1/2} Σ e_i is exactly N(0, 1).
  MultiplierWeights one;
  one.z = Matrix::Ones(200, 1);
  one.edges = {{0, 1}};
  const double c = bootstrap_sup_quantile(one, 100000, 0.05, 3);
  CHECK(std::abs(c - normal_quantile(0.975)) < 0.03);
  const std::vector<double> draws = bootstrap_sup_draws(one, 2000, 5);
  double last = -1e300;
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.975, 0.995}) {
    const double q = empirical_quantile(draws, level);
    CHECK(q >= last);
    last = q;
  }
  CHECK_THROWS_AS(bootstrap_sup_quantile(one, 50, 0.05, 3), InvalidArgument);
}

TEST_CASE("bootstrap draws are reproducible and seed dependent") {
  const Fixture f = random_fixture(30, 5, 8);
  const MultiplierWeights w = multiplier_weights(f.ctx, all_edges(5));
  const auto a = bootstrap_sup_draws(w, 300, 11);
  CHECK(a == bootstrap_sup_draws(w, 300, 11));
  CHECK(a != bootstrap_sup_draws(w, 300, 12));
  CHECK(std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); }));
}

TEST_CASE("confidence subgraph") {
  const Fixture f = random_fixture(60, 6, 4);
  const SubgraphReport loose = confidence_subgraph(f.ctx, 0.2, 500, 9);
  const SubgraphReport tight = confidence_subgraph(f.ctx, 0.01, 500, 9);
  CHECK(loose.critical == doctest::Approx(2.0 * loose.c_w));
  CHECK(tight.critical >= loose.critical);
  // Smaller α widens every interval, so the retained set can only shrink.
  for (const Edge& e : tight.retained_edges)
    CHECK(std::find(loose.retained_edges.begin(), loose.retained_edges.end(), e) != loose.retained_edges.end());
  REQUIRE(loose.intervals.size() == 15);
  for (const EdgeInterval& iv : loose.intervals) {
    CHECK(iv.low <= iv.theta_w);
    CHECK(iv.theta_w <= iv.high);
    CHECK(iv.retained == (iv.low > 0.0 || iv.high < 0.0));
    CHECK(iv.high - iv.low == doctest::Approx(2.0 * loose.critical * iv.L / std::sqrt(60.0)));
  }
  CHECK(loose.contains_pointwise == (loose.critical >= normal_quantile(0.9)));

  const std::vector<Edge> subset = {{0, 1}, {2, 5}};
  const SubgraphReport part = confidence_subgraph(f.ctx, 0.2, 500, 9, subset);
  CHECK(part.intervals.size() == 2);
}

TEST_CASE("edges with vanishing projections are flagged degenerate") {
  PrecisionEstimate est;
  est.theta = Matrix::Identity(3, 3);
  est.theta_inv = Matrix::Identity(3, 3);
  const InferenceContext ctx = make_context(SampleMatrix(Matrix::Ones(6, 3)), est);
  const MultiplierWeights w = multiplier_weights(ctx, {{0, 1}});
  REQUIRE(w.degenerate.size() == 1);
  CHECK(w.degenerate.front() == Edge{0, 1});
  CHECK(w.z.cols() == 0);
  const SubgraphReport r = confidence_subgraph(ctx, 0.05, 200, 1, {{0, 1}});
  REQUIRE(r.intervals.size() == 1);
  CHECK(r.intervals.front().degenerate);
  CHECK(r.retained_edges.empty());
}
