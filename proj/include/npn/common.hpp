#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace npn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexMatrix = Eigen::MatrixXi;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an argument outside an operation's contract.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed (non-finite entries, bad CSV, inconsistent sizes).
class DataError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

/// |Θ̂_jj Θ̂_kk| too small to normalize an edge statistic.
class DegenerateDiagonal : public Error {
 public:
  using Error::Error;
};

/// Wald estimator denominator numerically zero.
class DegenerateDenominator : public Error {
 public:
  DegenerateDenominator(const std::string& what, double value)
      : Error(what), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

/// Unordered variable pair, stored 0-based with j < k.
struct Edge {
  int j = 0;
  int k = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// n×d matrix of raw observations, rows are samples.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  explicit SampleMatrix(Matrix data);

  const Matrix& data() const { return data_; }
  Eigen::Index n() const { return data_.rows(); }
  Eigen::Index d() const { return data_.cols(); }

  /// Rows selected by index, in the given order.
  SampleMatrix rows(const std::vector<int>& idx) const;

 private:
  Matrix data_;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace npn
