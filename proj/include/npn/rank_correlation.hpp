#pragma once

#include "npn/common.hpp"

#include <span>
#include <vector>

namespace npn {

/// Kendall's tau matrix together with its sine-transformed correlation.
struct CorrelationEstimate {
  Matrix tau;
  Matrix sigma_hat;
};

/// Per-sample sign averages s[i][j][k] = 1/(n-1) Σ_{i'≠i} sign[(X_ij - X_i'j)(X_ik - X_i'k)].
///
/// Storage is (j, k)-major with the sample index contiguous, so the n values
/// for one pair can be read as a span. Both (j,k) and (k,j) are stored.
class SignAverageTensor {
 public:
  SignAverageTensor() = default;
  SignAverageTensor(int n, int d);

  int n() const { return n_; }
  int d() const { return d_; }

  double operator()(int i, int j, int k) const { return values_[offset(j, k) + i]; }
  std::span<const double> pair(int j, int k) const { return {values_.data() + offset(j, k), static_cast<std::size_t>(n_)}; }
  std::span<double> pair(int j, int k) { return {values_.data() + offset(j, k), static_cast<std::size_t>(n_)}; }

 private:
  std::size_t offset(int j, int k) const {
    return (static_cast<std::size_t>(j) * d_ + k) * n_;
  }

  int n_ = 0;
  int d_ = 0;
  std::vector<double> values_;
};

/// τ̂_jk = 2/(n(n-1)) Σ_{i<i'} sign[(X_ij - X_i'j)(X_ik - X_i'k)], unit diagonal.
/// Ties contribute sign(0) = 0. Throws InvalidArgument when n < 2.
Matrix kendall_tau_matrix(const SampleMatrix& x);

/// Σ̂_jk = sin(π τ̂_jk / 2) off the diagonal, exactly 1 on it.
/// Entries outside [-1, 1] by more than 1e-12 are rejected; smaller excursions are clamped.
Matrix sine_transform(const Matrix& tau);

SignAverageTensor sign_average_tensor(const SampleMatrix& x);

CorrelationEstimate estimate_correlation(const SampleMatrix& x);

}  // namespace npn
