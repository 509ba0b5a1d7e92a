#pragma once

#include "npn/common.hpp"
#include "npn/precision.hpp"
#include "npn/rank_correlation.hpp"

#include <limits>

namespace npn {

/// Which entries of Θ̂ are zeroed to form the null-restricted Θ̌.
enum class ZeroingConvention {
  Symmetric,    ///< zero both (j,k) and (k,j); score(j,k) == score(k,j)
  SingleEntry,  ///< zero only (j,k) of the vectorized parameter
};

inline constexpr double kDiagonalFloor = 1e-12;
inline constexpr double kVarianceFloor = 1e-12;
inline constexpr double kArcsinClamp = 1.0 - 1e-10;

/// Everything edge-level inference reads: Σ̂, the sign tensor, and Θ̂ with its
/// inverse. Built once per data set and shared read-only across edges.
struct InferenceContext {
  int n = 0;
  Matrix sigma_hat;
  SignAverageTensor signs;
  PrecisionEstimate estimate;
};

InferenceContext make_context(const SampleMatrix& x, PrecisionEstimate estimate);
/// Reuses a Σ̂ already computed from the same x.
InferenceContext make_context(const SampleMatrix& x, Matrix sigma_hat, PrecisionEstimate estimate);

/// b̂^T vec(M) for the decorrelation vector of edge (j,k), computed as
/// (Θ̂_·j^T M Θ̂_·k) / (Θ̂_jj Θ̂_kk) without forming the d²-vector ŵ.
double b_contract(const Matrix& m, const Matrix& theta, int j, int k);

/// Ŝ_n(0, Θ̂_(jk)^c) = e_j^T Θ̌^T Σ̂ Θ̌ e_k / (Θ̂_jj Θ̂_kk).
double decorrelated_score(const Matrix& sigma_hat, const Matrix& theta, int j, int k,
                          ZeroingConvention convention = ZeroingConvention::Symmetric);

/// Per-sample projections Ĝ^i_jk = −(π/2) s[i][j][k] + arcsin([Θ̂^{-1}]_jk)
/// and the scale F̂_jk = sqrt(max(0, 1 − Σ̂_jk²)).
struct HajekKernel {
  Vector g_hat;
  double f_hat = 0.0;
};

HajekKernel hajek_kernel(const SignAverageTensor& s, const Matrix& sigma_hat, const Matrix& theta_inv, int j, int k);

/// The n values b_contract(F̂ ⊙ Ĝ^i, Θ̂, j, k). Only entries in the supports of
/// Θ̂_·j and Θ̂_·k are visited.
Vector hajek_contractions(const SignAverageTensor& s, const Matrix& sigma_hat, const Matrix& theta,
                          const Matrix& theta_inv, int j, int k);

struct VarianceEstimate {
  double sigma2 = kVarianceFloor;
  bool floored = false;
};

VarianceEstimate estimate_variance(const Vector& contractions);

/// σ̂² = (1/n) Σ_i b_contract(F̂ ⊙ Ĝ^i)², floored at 1e-12.
double variance_estimate(const SignAverageTensor& s, const Matrix& sigma_hat, const Matrix& theta,
                         const Matrix& theta_inv, int j, int k);

/// How the derivative of the score in Θ_jk is evaluated for the one-step
/// estimator Θ̂^W_jk = (Θ̂_jk D − c) / (D − 1), with c = (Θ̂^TΣ̂Θ̂)_jk.
enum class WaldStep {
  /// D = 2, the probability limit of the exact derivative: Θ̂^W = 2Θ̂_jk − c.
  Limit,
  /// D = (Θ̂Σ̂)_jj + (Σ̂Θ̂)_kk, the derivative along a symmetric perturbation.
  Exact,
  /// D = (Θ̂Σ̂)_jk + (Σ̂Θ̂)_jk. Tends to c itself and so inherits the
  /// first-order bias of Θ̂; kept for comparison only.
  OffDiagonal,
};

/// Throws DegenerateDenominator when |D − 1| < 1e-10.
double wald_estimate(const Matrix& sigma_hat, const Matrix& theta, int j, int k, WaldStep step = WaldStep::Limit);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// θ_w ± Φ^{-1}(1 − α/2) · L / √n with L = 2 σ̂ Θ̂_jj Θ̂_kk.
Interval confidence_interval(double theta_w, double sigma_hat_sd, double theta_jj, double theta_kk, int n,
                             double alpha);

/// Asymptotic power 1 − Φ(q + K) + Φ(−q + K), q = Φ^{-1}(1 − α/2).
double local_power_curve(double k, double alpha);

struct EdgeTestReport {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  int j = 0;
  int k = 0;
  int n = 0;
  double alpha = 0.05;

  double score = kUnset;       ///< Ŝ_n(0, Θ̂_(jk)^c)
  double score_stat = kUnset;  ///< ST_n
  double p_score = kUnset;
  bool reject_score = false;

  double theta_w = kUnset;
  double wald_stat = kUnset;  ///< W_n
  double p_wald = kUnset;
  bool reject_wald = false;
  double ci_low = kUnset;
  double ci_high = kUnset;

  double sigma2_hat = kUnset;
  double h_partial = kUnset;  ///< 1 / (Θ̂_jj Θ̂_kk)
  bool variance_floored = false;

  bool has_score() const { return score_stat == score_stat; }
  bool has_wald() const { return wald_stat == wald_stat; }
};

EdgeTestReport score_test(const InferenceContext& ctx, int j, int k, double alpha,
                          ZeroingConvention convention = ZeroingConvention::Symmetric);
EdgeTestReport score_test(const SampleMatrix& x, const PrecisionEstimate& est, int j, int k, double alpha);

EdgeTestReport wald_test(const InferenceContext& ctx, int j, int k, double alpha);
EdgeTestReport wald_test(const SampleMatrix& x, const PrecisionEstimate& est, int j, int k, double alpha);

/// Score and Wald statistics plus the confidence interval, sharing σ̂².
EdgeTestReport test_edge(const InferenceContext& ctx, int j, int k, double alpha,
                         ZeroingConvention convention = ZeroingConvention::Symmetric);

/// Throws Error describing the first violated report invariant.
void validate_report(const EdgeTestReport& report);

}  // namespace npn
