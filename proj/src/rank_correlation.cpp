#include "npn/rank_correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace npn {
namespace {

using SignBlock = Eigen::MatrixXf;

// Products of ±1/0 summed in float are exact while the count stays below 2^24.
constexpr std::int64_t kMaxExactTerms = std::int64_t{1} << 23;
constexpr std::int64_t kMaxBlockBytes = std::int64_t{128} << 20;

void require_rank_input(const SampleMatrix& x) {
  if (x.n() < 2) throw InvalidArgument("rank correlation needs n >= 2 samples");
  if (x.d() < 2) throw InvalidArgument("rank correlation needs d >= 2 variables");
}

// Writes sign(x_i - x_c) for every column into out.col(offset + c), c = 0..n-1.
void fill_row_signs(const Matrix& xt, int i, SignBlock& out, Eigen::Index offset) {
  const Eigen::Index d = xt.rows();
  const Eigen::Index n = xt.cols();
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      const double diff = xt(r, i) - xt(r, c);
      out(r, offset + c) = static_cast<float>((diff > 0.0) - (diff < 0.0));
    }
  }
}

}  // namespace

SignAverageTensor::SignAverageTensor(int n, int d)
    : n_(n), d_(d), values_(static_cast<std::size_t>(n) * d * d, 0.0) {}

Matrix kendall_tau_matrix(const SampleMatrix& x) {
  require_rank_input(x);
  const Eigen::Index n = x.n();
  const Eigen::Index d = x.d();
  const Matrix xt = x.data().transpose();

  const std::int64_t by_exact = std::max<std::int64_t>(1, kMaxExactTerms / n);
  const std::int64_t by_memory = std::max<std::int64_t>(1, kMaxBlockBytes / (4 * d * n));
  const Eigen::Index rows_per_block = static_cast<Eigen::Index>(std::min<std::int64_t>({n, by_exact, by_memory}));

  // Ordered-pair sums: each unordered pair counted twice, diagonal pairs add 0.
  Matrix pair_sum = Matrix::Zero(d, d);
  SignBlock block(d, rows_per_block * n);
  for (Eigen::Index start = 0; start < n; start += rows_per_block) {
    const Eigen::Index rows = std::min(rows_per_block, n - start);
    for (Eigen::Index r = 0; r < rows; ++r) fill_row_signs(xt, static_cast<int>(start + r), block, r * n);
    const auto used = block.leftCols(rows * n);
    Eigen::MatrixXf gram = used * used.transpose();
    pair_sum += gram.cast<double>();
  }

  const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
  Matrix tau = pair_sum / denom;
  tau.diagonal().setOnes();
  return tau;
}

Matrix sine_transform(const Matrix& tau) {
  if (tau.rows() != tau.cols()) throw InvalidArgument("tau must be square");
  constexpr double kTol = 1e-12;
  const Eigen::Index d = tau.rows();
  Matrix sigma(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == k) {
        sigma(j, k) = 1.0;
        continue;
      }
      double t = tau(j, k);
      if (!std::isfinite(t) || std::abs(t) > 1.0 + kTol)
        throw InvalidArgument("tau entry outside [-1, 1]: " + std::to_string(t));
      t = std::clamp(t, -1.0, 1.0);
      sigma(j, k) = std::sin(std::numbers::pi / 2.0 * t);
    }
  }
  return sigma;
}

SignAverageTensor sign_average_tensor(const SampleMatrix& x) {
  require_rank_input(x);
  const int n = static_cast<int>(x.n());
  const int d = static_cast<int>(x.d());
  const Matrix xt = x.data().transpose();

  SignAverageTensor s(n, d);
  SignBlock row(d, n);
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) {
    fill_row_signs(xt, i, row, 0);
    const Eigen::MatrixXf counts = row * row.transpose();
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) s.pair(j, k)[i] = static_cast<double>(counts(j, k)) * scale;
    }
  }
  return s;
}

CorrelationEstimate estimate_correlation(const SampleMatrix& x) {
  CorrelationEstimate est;
  est.tau = kendall_tau_matrix(x);
  est.sigma_hat = sine_transform(est.tau);
  return est;
}

}  // namespace npn
