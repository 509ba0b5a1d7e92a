#include "npn/rank_correlation.hpp"
#include "npn/synthetic.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <queue>

using namespace npn;

namespace {

bool connected(const IndexMatrix& a) {
  const auto d = a.rows();
  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  std::queue<Eigen::Index> q;
  q.push(0);
  seen[0] = true;
  Eigen::Index count = 1;
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (Eigen::Index u = 0; u < d; ++u)
      if (a(v, u) && !seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = true;
        ++count;
        q.push(u);
      }
  }
  return count == d;
}

}  // namespace

TEST_CASE("edge counts: hub and band3") {
  CHECK(edge_list(gen_hub(200)).size() == 190);
  CHECK(edge_list(gen_hub(400)).size() == 380);
  CHECK(edge_list(gen_hub(20)).size() == 19);
  CHECK(edge_list(gen_band3(100)).size() == 294);
  CHECK(edge_list(gen_band3(400)).size() == 1194);
  CHECK(edge_list(gen_band3(4)).size() == 6);
  CHECK_THROWS_AS(gen_hub(30), InvalidArgument);
}

TEST_CASE("scale-free graphs are connected trees with heavy-tailed degrees") {
  CHECK(edge_list(gen_scale_free(3, 1)).size() == 2);
  int heavy = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const IndexMatrix a = gen_scale_free(100, seed);
    CHECK(edge_list(a).size() == 99);
    CHECK(connected(a));
    CHECK(a == a.transpose());
    if (a.colwise().sum().maxCoeff() >= 5) ++heavy;
  }
  CHECK(heavy >= 95);
  const IndexMatrix extra = gen_scale_free(50, 4, true);
  CHECK(edge_list(extra).size() == 50);
}

TEST_CASE("truth construction: two-node closed form") {
  IndexMatrix a = IndexMatrix::Zero(2, 2);
  a(0, 1) = a(1, 0) = 1;
  const GroundTruth t = adjacency_to_truth(a, 0.3, 0.2);
  // Θ = [[0.5, 0.3], [0.3, 0.5]] before rescaling; Σ* is its correlation.
  CHECK(t.sigma_star(0, 0) == 1.0);
  CHECK(t.sigma_star(0, 1) == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK((t.sigma_star * t.theta_star - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  Matrix theta(2, 2);
  theta << 0.5, 0.3, 0.3, 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(theta);
  CHECK(eig.eigenvalues().minCoeff() == doctest::Approx(0.2).epsilon(1e-14));
  const Vector dsqrt = theta.inverse().diagonal().cwiseSqrt();
  CHECK((dsqrt.asDiagonal() * theta * dsqrt.asDiagonal() - t.theta_star).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("truth construction: empty graph gives identity correlation") {
  const GroundTruth t = adjacency_to_truth(IndexMatrix::Zero(5, 5), 0.3, 0.2);
  CHECK((t.sigma_star - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(t.edge_set.empty());
}

TEST_CASE("truth construction: unscaled precision has the requested spectral floor") {
  std::mt19937_64 rng(8);
  std::bernoulli_distribution coin(0.3);
  IndexMatrix a = IndexMatrix::Zero(10, 10);
  for (int j = 0; j < 10; ++j)
    for (int k = j + 1; k < 10; ++k)
      if (coin(rng)) a(j, k) = a(k, j) = 1;
  const GroundTruth t = adjacency_to_truth(a, 0.3, 0.2);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(t.theta_star);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  CHECK(t.sigma_star.diagonal().isOnes(0.0));
  for (int j = 0; j < 10; ++j)
    for (int k = 0; k < 10; ++k)
      if (j != k) CHECK((t.theta_star(j, k) != 0.0) == (a(j, k) == 1));

  // The unscaled construction itself.
  const Matrix w = 0.3 * a.cast<double>();
  Eigen::SelfAdjointEigenSolver<Matrix> ew(w);
  const Matrix theta = w + (std::abs(ew.eigenvalues().minCoeff()) + 0.2) * Matrix::Identity(10, 10);
  Eigen::SelfAdjointEigenSolver<Matrix> et(theta);
  CHECK(et.eigenvalues().minCoeff() >= 0.2 - 1e-10);
  const Vector dsqrt = theta.inverse().diagonal().cwiseSqrt();
  const Matrix rescaled = dsqrt.asDiagonal() * theta * dsqrt.asDiagonal();
  CHECK((rescaled - t.theta_star).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gaussian sampling") {
  SUBCASE("identity covariance") {
    const SampleMatrix x = sample_gaussian(Matrix::Identity(4, 4), 10000, 3);
    const Matrix c = (x.data().transpose() * x.data()) / 10000.0;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        if (j != k) CHECK(std::abs(c(j, k)) < 4.0 / 100.0);
  }
  SUBCASE("strong correlation") {
    Matrix s = Matrix::Identity(2, 2);
    s(0, 1) = s(1, 0) = 0.9;
    const Matrix x = sample_gaussian(s, 10000, 4).data();
    const Matrix c = x.transpose() * x / 10000.0;
    CHECK(std::abs(c(0, 1) / std::sqrt(c(0, 0) * c(1, 1)) - 0.9) < 0.02);
  }
  SUBCASE("single draw is reproducible") {
    CHECK(sample_gaussian(Matrix::Identity(3, 3), 1, 9).data() == sample_gaussian(Matrix::Identity(3, 3), 1, 9).data());
  }
  SUBCASE("non-SPD input") {
    Matrix s = Matrix::Identity(2, 2);
    s(0, 1) = s(1, 0) = 1.5;
    CHECK_THROWS_AS(sample_gaussian(s, 5, 1), FactorizationFailure);
  }
}

TEST_CASE("transform constants match quadrature over the normal density") {
  auto phi = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
  const double abs_moment = 2.0 * oracle::simpson([&](double t) { return t * phi(t); }, 0.0, 40.0, 1e-14);
  const double sixth = 2.0 * oracle::simpson([&](double t) { return std::pow(t, 6) * phi(t); }, 0.0, 40.0, 1e-13);
  CHECK(std::abs(abs_moment - kAbsMomentNormal) < 1e-12);
  CHECK(std::abs(sixth - kSixthMomentNormal) < 1e-10);
}

TEST_CASE("transforms") {
  Matrix z(2, 2);
  z << 4.0, -1.0, -0.25, 2.0;
  const SampleMatrix x(z);
  CHECK(apply_npn_transform(x, TransformKind::Identity).data() == z);
  const Matrix s = apply_npn_transform(x, TransformKind::ExtendedSqrt).data();
  CHECK(s(0, 0) == doctest::Approx(2.0 / std::sqrt(kAbsMomentNormal)));
  CHECK(s(1, 0) == doctest::Approx(-0.5 / std::sqrt(kAbsMomentNormal)));
  const Matrix c = apply_npn_transform(x, TransformKind::Cubic).data();
  CHECK(c(1, 1) == doctest::Approx(8.0 / std::sqrt(15.0)));
}

TEST_CASE("large-n rank correlation recovers the truth") {
  const GroundTruth t = make_truth({GraphKind::Band3, 5, 0.3, 0.2, 1});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SampleMatrix x = apply_npn_transform(sample_gaussian(t.sigma_star, 10000, seed), TransformKind::Identity);
    CHECK((estimate_correlation(x).sigma_hat - t.sigma_star).cwiseAbs().maxCoeff() < 0.05);
  }
}

TEST_CASE("names parse and print") {
  for (auto g : {GraphKind::ScaleFree, GraphKind::Hub, GraphKind::Band3}) CHECK(parse_graph_kind(to_string(g)) == g);
  for (auto t : {TransformKind::Identity, TransformKind::ExtendedSqrt, TransformKind::Cubic})
    CHECK(parse_transform_kind(to_string(t)) == t);
  CHECK_THROWS_AS(parse_graph_kind("ring"), InvalidArgument);
}
