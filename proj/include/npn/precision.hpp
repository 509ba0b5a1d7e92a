#pragma once

#include "npn/common.hpp"

#include <optional>
#include <vector>

namespace npn {

struct ClimeConfig {
  /// Candidate regularization values, ascending. Empty means "derive from Σ̂"
  /// via default_lambda_grid.
  std::vector<double> lambda_grid;
  int cv_folds = 5;
  double solver_tol = 1e-6;
  /// Simplex pivot limit per column.
  int max_iter = 10000;

  /// Throws InvalidArgument when a field violates its contract.
  void validate() const;
};

struct PrecisionEstimate {
  Matrix theta;
  Matrix theta_inv;
  double lambda = 0.0;
  bool symmetrized = true;
  /// True when invert_precision had to add a ridge before inverting.
  bool ridged = false;
  double ridge = 0.0;
};

/// `points` values log-spaced over [0.01, 1] · max_{j≠k} |Σ̂_jk|, ascending.
std::vector<double> default_lambda_grid(const Matrix& sigma_hat, int points = 20);

/// Column-wise CLIME solver for one Σ̂.
///
/// Each column solves  min ||β||_1  s.t.  ||Σ̂β − e_m||_∞ ≤ λ  as a linear
/// program over (β⁺, β⁻, r) with Σ̂(β⁺ − β⁻) − r = e_m and r boxed to
/// [−λ, λ], using a bounded dual simplex. The all-slack basis is dual
/// feasible for every λ, and λ enters only through the bounds on r, so the
/// optimal basis for one λ is a valid warm start for the next.
///
/// Per-column bases persist between solve() calls; sweeping a grid reuses them.
/// Returned columns are re-solved from a fresh factorization and must satisfy
/// the constraint within solver_tol.
class ClimeSolver {
 public:
  ClimeSolver(const Matrix& sigma_hat, const ClimeConfig& cfg);

  /// d×d matrix whose column m is the CLIME solution for e_m.
  /// Throws NonConvergence or Infeasible naming the first failing column.
  Matrix solve(double lambda);

  /// Single-column solve; shares warm-start state with solve().
  Vector solve_column(int m, double lambda);

  /// Simplex pivots used by the most recent call, summed over columns.
  long long last_iterations() const { return last_iterations_; }

 private:
  struct ColumnState {
    std::vector<int> basis;
    std::vector<signed char> status;
    Matrix binv;
  };

  void solve_into(int m, double lambda);
  long long dual_simplex(int m, double lambda, ColumnState& st);

  Matrix sigma_;
  Matrix sigma_t_;
  ClimeConfig cfg_;
  Matrix result_;
  std::vector<ColumnState> states_;
  long long last_iterations_ = 0;
};

/// Solves one CLIME column from a cold start.
Vector clime_column(const Matrix& sigma_hat, int m, double lambda, const ClimeConfig& cfg);

/// Θ̂_jk = raw_jk if |raw_jk| <= |raw_kj| else raw_kj. At equal magnitude the
/// entry from the upper triangle (row < column) is kept.
Matrix clime_symmetrize(const Matrix& raw);

struct InverseResult {
  Matrix inverse;
  bool ridged = false;
  double ridge = 0.0;
};

/// Dense inverse of a symmetric matrix. When it is not positive definite or
/// its condition number exceeds 1e12, inverts theta + εI with
/// ε = |λ_min| + 1e-6 and flags the result. Throws SingularMatrix when even
/// the ridged matrix cannot be factorized.
InverseResult invert_precision(const Matrix& theta);

/// Symmetrized CLIME at a fixed λ plus its inverse.
PrecisionEstimate fit_precision(const Matrix& sigma_hat, double lambda, const ClimeConfig& cfg);

struct CrossValidationResult {
  double lambda = 0.0;
  std::vector<double> grid;
  /// Mean held-out loss per grid point; +inf where some fold failed.
  std::vector<double> mean_loss;
  /// Folds whose fit was positive definite (scored by pseudo-likelihood) per grid point.
  std::vector<int> likelihood_folds;
  /// Solver failures as (fold, grid index) pairs.
  std::vector<std::pair<int, int>> failures;
};

/// K-fold cross-validation of λ. Rows are shuffled with `seed` and dealt
/// round-robin into folds. Each fold refits Σ̂ on its training rows and scores
/// the held-out Σ̂ with tr(Σ̂_test Θ̂) − log det Θ̂, or with ‖Σ̂_test Θ̂ − I‖_F
/// when Θ̂ is not positive definite. Ties go to the smallest λ.
CrossValidationResult cross_validate(const SampleMatrix& x, const ClimeConfig& cfg, std::uint64_t seed,
                                     int threads = 1);

double cross_validate_lambda(const SampleMatrix& x, const ClimeConfig& cfg, std::uint64_t seed);

}  // namespace npn
