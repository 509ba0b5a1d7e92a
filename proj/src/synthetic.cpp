#include "npn/synthetic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace npn {

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::ScaleFree: return "scale-free";
    case GraphKind::Hub: return "hub";
    case GraphKind::Band3: return "band3";
  }
  return "unknown";
}

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Identity: return "identity";
    case TransformKind::ExtendedSqrt: return "sqrt";
    case TransformKind::Cubic: return "cubic";
  }
  return "unknown";
}

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "scale-free") return GraphKind::ScaleFree;
  if (name == "hub") return GraphKind::Hub;
  if (name == "band3") return GraphKind::Band3;
  throw InvalidArgument("unknown graph kind '" + std::string(name) + "'");
}

TransformKind parse_transform_kind(std::string_view name) {
  if (name == "identity") return TransformKind::Identity;
  if (name == "sqrt") return TransformKind::ExtendedSqrt;
  if (name == "cubic") return TransformKind::Cubic;
  throw InvalidArgument("unknown transform '" + std::string(name) + "'");
}

void GraphModelSpec::validate() const {
  if (d < 4) throw InvalidArgument("graph dimension must be at least 4");
  if (edge_weight == 0.0 || !std::isfinite(edge_weight)) throw InvalidArgument("edge weight must be finite and nonzero");
  if (!(diag_shift > 0.0) || !std::isfinite(diag_shift)) throw InvalidArgument("diagonal shift must be positive");
  if (kind == GraphKind::Hub) {
    if (hub_group_size < 2) throw InvalidArgument("hub group size must be at least 2");
    if (d % hub_group_size != 0) throw InvalidArgument("hub graph needs d divisible by the group size");
  }
}

IndexMatrix gen_scale_free(int d, std::uint64_t seed, bool extra_edge) {
  if (d < 3) throw InvalidArgument("scale-free graph needs d >= 3");
  IndexMatrix a = IndexMatrix::Zero(d, d);
  std::vector<int> degree(static_cast<std::size_t>(d), 0);
  std::mt19937_64 rng(seed);

  auto connect = [&](int u, int v) {
    a(u, v) = a(v, u) = 1;
    ++degree[static_cast<std::size_t>(u)];
    ++degree[static_cast<std::size_t>(v)];
  };
  // Degree-proportional choice among nodes [0, limit) accepted by `allowed`.
  auto pick = [&](int limit, auto allowed) {
    long total = 0;
    for (int i = 0; i < limit; ++i)
      if (allowed(i)) total += degree[static_cast<std::size_t>(i)];
    if (total == 0) return -1;
    long r = std::uniform_int_distribution<long>(0, total - 1)(rng);
    for (int i = 0; i < limit; ++i) {
      if (!allowed(i)) continue;
      r -= degree[static_cast<std::size_t>(i)];
      if (r < 0) return i;
    }
    return -1;
  };

  connect(0, 1);
  for (int m = 2; m < d; ++m) connect(m, pick(m, [](int) { return true; }));

  if (extra_edge) {
    std::vector<int> order(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (int u : order) {
      const int v = pick(d, [&](int i) { return i != u && a(u, i) == 0; });
      if (v >= 0) {
        connect(u, v);
        break;
      }
    }
  }
  return a;
}

IndexMatrix gen_hub(int d, int group_size) {
  if (group_size < 2) throw InvalidArgument("hub group size must be at least 2");
  if (d < group_size || d % group_size != 0) throw InvalidArgument("hub graph needs d divisible by the group size");
  IndexMatrix a = IndexMatrix::Zero(d, d);
  for (int hub = 0; hub < d; hub += group_size)
    for (int i = hub + 1; i < hub + group_size; ++i) a(hub, i) = a(i, hub) = 1;
  return a;
}

IndexMatrix gen_band3(int d) {
  if (d < 4) throw InvalidArgument("band graph needs d >= 4");
  IndexMatrix a = IndexMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d && k <= j + 3; ++k) a(j, k) = a(k, j) = 1;
  return a;
}

IndexMatrix generate_graph(const GraphModelSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case GraphKind::ScaleFree: return gen_scale_free(spec.d, spec.seed, spec.scale_free_extra_edge);
    case GraphKind::Hub: return gen_hub(spec.d, spec.hub_group_size);
    case GraphKind::Band3: return gen_band3(spec.d);
  }
  throw InvalidArgument("unknown graph kind");
}

std::vector<Edge> edge_list(const IndexMatrix& adjacency) {
  std::vector<Edge> edges;
  for (int j = 0; j < adjacency.rows(); ++j)
    for (int k = j + 1; k < adjacency.cols(); ++k)
      if (adjacency(j, k) != 0) edges.push_back({j, k});
  return edges;
}

namespace {

void check_adjacency(const IndexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() < 2) throw InvalidArgument("adjacency must be square with d >= 2");
  for (int j = 0; j < a.rows(); ++j) {
    if (a(j, j) != 0) throw InvalidArgument("adjacency must have a zero diagonal");
    for (int k = 0; k < a.cols(); ++k) {
      if (a(j, k) != a(k, j)) throw InvalidArgument("adjacency must be symmetric");
      if (a(j, k) != 0 && a(j, k) != 1) throw InvalidArgument("adjacency entries must be 0 or 1");
    }
  }
}

}  // namespace

GroundTruth weighted_to_truth(const IndexMatrix& adjacency, const Matrix& weights, double diag_shift) {
  check_adjacency(adjacency);
  const auto d = adjacency.rows();
  if (weights.rows() != d || weights.cols() != d) throw InvalidArgument("weight matrix shape mismatch");
  if (!(diag_shift > 0.0)) throw InvalidArgument("diagonal shift must be positive");

  Matrix w = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = j + 1; k < d; ++k)
      if (adjacency(j, k) != 0) w(j, k) = w(k, j) = weights(j, k);

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(w, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues()(0);
  Matrix theta = w;
  theta.diagonal().array() += std::abs(lambda_min) + diag_shift;

  const Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) throw FactorizationFailure("precision construction is not positive definite");
  const Matrix sigma = llt.solve(Matrix::Identity(d, d));
  const Vector scale = sigma.diagonal().array().sqrt();

  GroundTruth truth;
  truth.adjacency = adjacency;
  truth.sigma_star = scale.cwiseInverse().asDiagonal() * sigma * scale.cwiseInverse().asDiagonal();
  truth.sigma_star = 0.5 * (truth.sigma_star + truth.sigma_star.transpose()).eval();
  truth.sigma_star.diagonal().setOnes();
  truth.theta_star = scale.asDiagonal() * theta * scale.asDiagonal();
  truth.edge_set = edge_list(adjacency);
  return truth;
}

GroundTruth adjacency_to_truth(const IndexMatrix& adjacency, double edge_weight, double diag_shift) {
  const auto d = adjacency.rows();
  return weighted_to_truth(adjacency, Matrix::Constant(d, d, edge_weight), diag_shift);
}

GroundTruth make_truth(const GraphModelSpec& spec) {
  return adjacency_to_truth(generate_graph(spec), spec.edge_weight, spec.diag_shift);
}

SampleMatrix sample_gaussian(const Matrix& sigma_star, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample size must be positive");
  if (sigma_star.rows() != sigma_star.cols()) throw InvalidArgument("covariance must be square");
  const Eigen::LLT<Matrix> llt(sigma_star);
  if (llt.info() != Eigen::Success) throw FactorizationFailure("covariance is not positive definite");
  const auto d = sigma_star.rows();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix z(n, d);
  for (int i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = normal(rng);
  const Matrix lower = llt.matrixL();
  return SampleMatrix(z * lower.transpose());
}

SampleMatrix apply_npn_transform(const SampleMatrix& x, TransformKind kind) {
  static const double sqrt_scale = std::sqrt(kAbsMomentNormal);
  switch (kind) {
    case TransformKind::Identity: return x;
    case TransformKind::ExtendedSqrt:
      return SampleMatrix(x.data().unaryExpr([](double v) {
        return std::copysign(std::sqrt(std::abs(v)), v) / sqrt_scale;
      }));
    case TransformKind::Cubic: {
      const double c = std::sqrt(kSixthMomentNormal);
      return SampleMatrix(x.data().unaryExpr([c](double v) { return v * v * v / c; }));
    }
  }
  throw InvalidArgument("unknown transform");
}

}  // namespace npn
