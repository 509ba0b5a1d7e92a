#include "npn/precision.hpp"
#include "npn/rank_correlation.hpp"
#include "npn/synthetic.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace npn;

namespace {

ClimeConfig tight() {
  ClimeConfig cfg;
  cfg.solver_tol = 1e-9;
  return cfg;
}

}  // namespace

TEST_CASE("clime: identity system") {
  const Matrix eye = Matrix::Identity(4, 4);
  const Vector exact = clime_column(eye, 0, 0.0, tight());
  CHECK((exact - Vector::Unit(4, 0)).cwiseAbs().maxCoeff() < 1e-12);
  const Vector soft = clime_column(eye, 0, 0.3, tight());
  CHECK((soft - 0.7 * Vector::Unit(4, 0)).cwiseAbs().maxCoeff() < 1e-12);
  ClimeSolver solver(eye, tight());
  CHECK((solver.solve(0.3) - 0.7 * eye).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("clime: two-variable case matches the exhaustive LP") {
  Matrix s(2, 2);
  s << 1.0, 0.5, 0.5, 1.0;
  const Vector beta = clime_column(s, 0, 0.1, tight());
  const oracle::LpSolution lp = oracle::clime_lp_brute(s, 0, 0.1);
  REQUIRE(lp.feasible);
  CHECK(std::abs(beta.lpNorm<1>() - lp.objective) < 1e-9);
  CHECK((beta - lp.beta).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("clime: random small instances against the exhaustive LP") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> lam(0.02, 0.6);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 2 + rep % 4;
    const Matrix s = oracle::random_correlation(d, rng);
    const double lambda = lam(rng);
    for (int m = 0; m < d; ++m) {
      const Vector beta = clime_column(s, m, lambda, ClimeConfig{});
      const oracle::LpSolution lp = oracle::clime_lp_brute(s, m, lambda);
      REQUIRE(lp.feasible);
      CHECK(std::abs(beta.lpNorm<1>() - lp.objective) < 1e-6);
      CHECK((s * beta - Vector::Unit(d, m)).cwiseAbs().maxCoeff() <= lambda + 1e-6);
    }
  }
}

TEST_CASE("clime: warm-started path equals cold solves and is monotone in lambda") {
  std::mt19937_64 rng(7);
  const Matrix s = estimate_correlation(SampleMatrix(oracle::random_normal(60, 12, rng))).sigma_hat;
  const std::vector<double> grid = default_lambda_grid(s, 12);
  ClimeSolver solver(s, ClimeConfig{});
  for (std::size_t i = grid.size(); i-- > 0;) {
    const Matrix warm = solver.solve(grid[i]);
    for (int m = 0; m < 12; ++m) {
      const Vector cold = clime_column(s, m, grid[i], ClimeConfig{});
      CHECK(std::abs(warm.col(m).lpNorm<1>() - cold.lpNorm<1>()) < 1e-6);
      CHECK((s * warm.col(m) - Vector::Unit(12, m)).cwiseAbs().maxCoeff() <= grid[i] + 1e-6);
    }
  }
  // ‖Θ̂(λ)‖_{1,1} non-increasing as λ grows.
  double last = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double norm = fit_precision(s, grid[i], ClimeConfig{}).theta.cwiseAbs().sum();
    if (i > 0) CHECK(norm <= last + 1e-6);
    last = norm;
  }
}

TEST_CASE("default lambda grid") {
  Matrix s = Matrix::Identity(3, 3);
  s(0, 1) = s(1, 0) = -0.5;
  const auto grid = default_lambda_grid(s, 20);
  REQUIRE(grid.size() == 20);
  CHECK(grid.front() == doctest::Approx(0.005));
  CHECK(grid.back() == doctest::Approx(0.5));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("symmetrization keeps the smaller magnitude") {
  Matrix raw(2, 2);
  raw << 1.0, 0.3, -0.1, 1.0;
  Matrix out = clime_symmetrize(raw);
  CHECK(out(0, 1) == -0.1);
  CHECK(out(1, 0) == -0.1);
  raw << 1.0, 0.2, -0.2, 1.0;
  out = clime_symmetrize(raw);
  CHECK(out(0, 1) == 0.2);
  CHECK(out(1, 0) == 0.2);
  const Matrix sym = Matrix::Identity(3, 3) * 2.0;
  CHECK(clime_symmetrize(sym) == sym);
}

TEST_CASE("precision inverse") {
  CHECK((invert_precision(2.0 * Matrix::Identity(3, 3)).inverse - 0.5 * Matrix::Identity(3, 3)).norm() < 1e-15);
  Matrix t(2, 2);
  t << 2, 1, 1, 2;
  Matrix expected(2, 2);
  expected << 2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0;
  const InverseResult r = invert_precision(t);
  CHECK(!r.ridged);
  CHECK((r.inverse - expected).cwiseAbs().maxCoeff() < 1e-14);

  std::mt19937_64 rng(3);
  const Matrix theta = oracle::random_precision(10, rng);
  CHECK((theta * invert_precision(theta).inverse - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-8);

  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  const InverseResult ridged = invert_precision(indefinite);
  CHECK(ridged.ridged);
  CHECK(ridged.ridge == doctest::Approx(1.0 + 1e-6));
}

TEST_CASE("cross-validation") {
  const SampleMatrix x = sample_gaussian(Matrix::Identity(5, 5), 1000, 12);
  ClimeConfig cfg;
  SUBCASE("identity truth is recovered at the selected lambda") {
    const CrossValidationResult cv = cross_validate(x, cfg, 3);
    const Matrix theta = fit_precision(estimate_correlation(x).sigma_hat, cv.lambda, cfg).theta;
    Matrix off = theta;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 0.2);
  }
  SUBCASE("single lambda and duplicate lambdas") {
    cfg.lambda_grid = {0.2};
    CHECK(cross_validate_lambda(x, cfg, 1) == 0.2);
    cfg.lambda_grid = {0.1, 0.1};
    const CrossValidationResult a = cross_validate(x, cfg, 9);
    CHECK(a.lambda == 0.1);
    CHECK(a.mean_loss[0] == a.mean_loss[1]);
  }
  SUBCASE("deterministic for a seed and independent of threads") {
    const CrossValidationResult a = cross_validate(x, cfg, 5, 1);
    const CrossValidationResult b = cross_validate(x, cfg, 5, 4);
    CHECK(a.lambda == b.lambda);
    CHECK(a.mean_loss == b.mean_loss);
  }
  SUBCASE("too few rows") {
    CHECK_THROWS_AS(cross_validate(SampleMatrix(Matrix::Random(6, 3)), cfg, 1), InvalidArgument);
  }
}

TEST_CASE("config validation") {
  ClimeConfig cfg;
  cfg.lambda_grid = {0.3, 0.1};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.lambda_grid = {0.0};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.lambda_grid = {};
  cfg.cv_folds = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
