#include "npn/precision.hpp"

#include "npn/parallel.hpp"
#include "npn/rank_correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace npn {
namespace {

// Variable layout of one column LP: β⁺ (0..d−1), β⁻ (d..2d−1), r (2d..3d−1),
// with Σ̂β⁺ − Σ̂β⁻ − r = e_m, β± ≥ 0, −λ ≤ r ≤ λ, cost 1 on β±.
enum Status : signed char { kBasic = 0, kLower = 1, kUpper = 2 };

constexpr double kPrimalTol = 1e-10;
constexpr double kDualTol = 1e-10;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 100;
constexpr int kCacheDim = 128;

bool is_symmetric(const Matrix& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

}  // namespace

void ClimeConfig::validate() const {
  if (cv_folds < 2) throw InvalidArgument("cv_folds must be >= 2");
  if (!(solver_tol > 0.0)) throw InvalidArgument("solver_tol must be positive");
  if (max_iter < 1) throw InvalidArgument("max_iter must be positive");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0) || !std::isfinite(lambda_grid[i]))
      throw InvalidArgument("lambda grid entries must be positive and finite");
    if (i > 0 && lambda_grid[i] < lambda_grid[i - 1])
      throw InvalidArgument("lambda grid must be sorted ascending");
  }
}

std::vector<double> default_lambda_grid(const Matrix& sigma_hat, int points) {
  if (points < 1) throw InvalidArgument("lambda grid needs at least one point");
  double max_off = 0.0;
  for (Eigen::Index k = 0; k < sigma_hat.cols(); ++k)
    for (Eigen::Index j = 0; j < sigma_hat.rows(); ++j)
      if (j != k) max_off = std::max(max_off, std::abs(sigma_hat(j, k)));
  // An all-zero off-diagonal still needs a usable grid.
  if (max_off <= 0.0) max_off = 1.0;
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double lo = std::log(0.01);
  for (int p = 0; p < points; ++p) {
    const double t = points == 1 ? 1.0 : static_cast<double>(p) / (points - 1);
    grid[static_cast<std::size_t>(p)] = max_off * std::exp(lo * (1.0 - t));
  }
  return grid;
}

ClimeSolver::ClimeSolver(const Matrix& sigma_hat, const ClimeConfig& cfg) : sigma_(sigma_hat), cfg_(cfg) {
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() < 1) throw InvalidArgument("Σ̂ must be square");
  if (!sigma_.allFinite()) throw DataError("Σ̂ contains non-finite entries");
  cfg_.validate();
  const Eigen::Index d = sigma_.rows();
  sigma_t_ = sigma_.transpose();
  result_ = Matrix::Zero(d, d);
  states_.resize(static_cast<std::size_t>(d));
}

Matrix ClimeSolver::solve(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
  last_iterations_ = 0;
  for (int m = 0; m < sigma_.cols(); ++m) solve_into(m, lambda);
  return result_;
}

Vector ClimeSolver::solve_column(int m, double lambda) {
  if (m < 0 || m >= sigma_.cols()) throw InvalidArgument("column index out of range");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
  last_iterations_ = 0;
  solve_into(m, lambda);
  return result_.col(m);
}

void ClimeSolver::solve_into(int m, double lambda) {
  auto& st = states_[static_cast<std::size_t>(m)];
  try {
    last_iterations_ += dual_simplex(m, lambda, st);
  } catch (const Error&) {
    // A stale basis from another λ can be numerically poor; retry cold.
    if (st.basis.empty()) throw;
    st = ColumnState{};
    last_iterations_ += dual_simplex(m, lambda, st);
  }
}

long long ClimeSolver::dual_simplex(int m, double lambda, ColumnState& st) {
  const int d = static_cast<int>(sigma_.rows());
  const int nvar = 3 * d;
  if (st.basis.empty()) {
    // All-slack basis: B = −I. Reduced costs of β± are 1, so it is dual
    // feasible for every λ; the dual simplex only has to restore primal bounds.
    st.basis.resize(static_cast<std::size_t>(d));
    st.status.assign(static_cast<std::size_t>(nvar), kLower);
    for (int i = 0; i < d; ++i) {
      st.basis[static_cast<std::size_t>(i)] = 2 * d + i;
      st.status[static_cast<std::size_t>(2 * d + i)] = kBasic;
    }
  }
  auto& basis = st.basis;
  auto& status = st.status;

  auto column = [&](int j, Eigen::Ref<Vector> out) {
    if (j < d) out = sigma_.col(j);
    else if (j < 2 * d) out = -sigma_.col(j - d);
    else {
      out.setZero();
      out(j - 2 * d) = -1.0;
    }
  };
  auto lower = [&](int j) { return j < 2 * d ? 0.0 : -lambda; };
  auto upper = [&](int j) { return j < 2 * d ? std::numeric_limits<double>::infinity() : lambda; };
  auto cost = [&](int j) { return j < 2 * d ? 1.0 : 0.0; };

  Matrix& binv = st.binv;
  Vector rhs(d), xb(d), cb(d), y(d), rho(d), sy(d), sr(d), w(d), a(d);
  // Fresh B^{-1} and duals y = B^{-T} c_B, sy = Σ̂^T y.
  auto refactor = [&] {
    Matrix b(d, d);
    for (int i = 0; i < d; ++i) column(basis[static_cast<std::size_t>(i)], b.col(i));
    Eigen::PartialPivLU<Matrix> lu(b);
    if (!(lu.rcond() > 1e-14)) throw NonConvergence("CLIME column " + std::to_string(m) + ": singular basis", 0.0);
    binv = lu.inverse();
  };
  auto refresh_duals = [&] {
    for (int i = 0; i < d; ++i) cb(i) = cost(basis[static_cast<std::size_t>(i)]);
    y.noalias() = binv.transpose() * cb;
    sy.noalias() = sigma_t_ * y;
  };
  if (binv.rows() != d) refactor();
  refresh_duals();

  std::vector<double> alpha(static_cast<std::size_t>(nvar)), reduced(static_cast<std::size_t>(nvar));
  const int bland_after = 20 * d + 100;
  long long iterations = 0;
  int since_refactor = 0;

  auto basic_values = [&] {
    rhs.setZero();
    rhs(m) = 1.0;
    for (int i = 0; i < d; ++i) {
      const int j = 2 * d + i;
      if (status[static_cast<std::size_t>(j)] == kLower) rhs(i) += -lambda;
      else if (status[static_cast<std::size_t>(j)] == kUpper) rhs(i) += lambda;
    }
    xb.noalias() = binv * rhs;
  };

  while (true) {
    if (since_refactor >= kRefactorEvery) {
      refactor();
      refresh_duals();
      since_refactor = 0;
    }
    basic_values();
    const bool bland = iterations >= bland_after;

    // Leaving row: largest bound violation (smallest variable index under Bland).
    int p = -1;
    double worst = 0.0;
    bool to_lower = false;
    for (int i = 0; i < d; ++i) {
      const int j = basis[static_cast<std::size_t>(i)];
      const double lo = lower(j), hi = upper(j);
      const double scale = 1.0 + std::abs(xb(i));
      double viol = 0.0;
      bool below = false;
      if (xb(i) < lo - kPrimalTol * scale) {
        viol = lo - xb(i);
        below = true;
      } else if (xb(i) > hi + kPrimalTol * scale) {
        viol = xb(i) - hi;
      } else {
        continue;
      }
      if (p < 0 || (bland ? j < basis[static_cast<std::size_t>(p)] : viol > worst)) {
        p = i;
        worst = viol;
        to_lower = below;
      }
    }
    if (p < 0) break;

    if (iterations >= cfg_.max_iter) {
      std::ostringstream msg;
      msg << "CLIME column " << m << " did not converge in " << iterations << " pivots at lambda=" << lambda
          << " (bound violation " << worst << ")";
      throw NonConvergence(msg.str(), worst);
    }

    rho = binv.row(p).transpose();
    sr.noalias() = sigma_t_ * rho;
    for (int k = 0; k < d; ++k) {
      alpha[static_cast<std::size_t>(k)] = sr(k);
      reduced[static_cast<std::size_t>(k)] = 1.0 - sy(k);
      alpha[static_cast<std::size_t>(d + k)] = -sr(k);
      reduced[static_cast<std::size_t>(d + k)] = 1.0 + sy(k);
      alpha[static_cast<std::size_t>(2 * d + k)] = -rho(k);
      reduced[static_cast<std::size_t>(2 * d + k)] = y(k);
    }

    // Ratio test (Harris two-pass). x_p rises when entering at lower with
    // α < 0 or at upper with α > 0; it falls in the mirrored cases.
    auto eligible = [&](int j) {
      const auto s = status[static_cast<std::size_t>(j)];
      if (s == kBasic) return false;
      const double al = alpha[static_cast<std::size_t>(j)];
      if (j >= 2 * d && lambda == 0.0) return false;  // fixed variable
      if (to_lower) return (s == kLower && al < -kPivotTol) || (s == kUpper && al > kPivotTol);
      return (s == kLower && al > kPivotTol) || (s == kUpper && al < -kPivotTol);
    };
    double bound = std::numeric_limits<double>::infinity();
    for (int j = 0; j < nvar; ++j) {
      if (!eligible(j)) continue;
      const double dj = std::abs(reduced[static_cast<std::size_t>(j)]);
      bound = std::min(bound, (dj + (bland ? 0.0 : kDualTol)) / std::abs(alpha[static_cast<std::size_t>(j)]));
    }
    if (!std::isfinite(bound)) {
      std::ostringstream msg;
      msg << "CLIME column " << m << " infeasible at lambda=" << lambda;
      throw Infeasible(msg.str());
    }
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < nvar; ++j) {
      if (!eligible(j)) continue;
      const double al = std::abs(alpha[static_cast<std::size_t>(j)]);
      const double ratio = std::abs(reduced[static_cast<std::size_t>(j)]) / al;
      if (ratio > bound * (1.0 + 1e-12)) continue;
      if (bland) {
        q = j;
        break;
      }
      if (q < 0 || al > best) {
        q = j;
        best = al;
      }
    }

    // Dual step: y += θ ρ keeps every reduced cost d_j − θ α_j current.
    const double theta = reduced[static_cast<std::size_t>(q)] / alpha[static_cast<std::size_t>(q)];
    y += theta * rho;
    sy += theta * sr;

    // Pivot: q enters at row p, the leaving variable parks at the violated bound.
    const int leaving = basis[static_cast<std::size_t>(p)];
    status[static_cast<std::size_t>(leaving)] = to_lower ? kLower : kUpper;
    status[static_cast<std::size_t>(q)] = kBasic;
    basis[static_cast<std::size_t>(p)] = q;
    if (q >= 2 * d) {
      w = -binv.col(q - 2 * d);
    } else {
      column(q, a);
      w.noalias() = binv * a;
    }
    const double pivot = w(p);
    if (std::abs(pivot) < 1e-13) {
      refactor();
      refresh_duals();
      since_refactor = 0;
    } else {
      const Vector row = binv.row(p).transpose() / pivot;
      w(p) -= 1.0;
      binv.noalias() -= w * row.transpose();
      ++since_refactor;
    }
    ++iterations;
  }

  // Check the reported point; if the updated inverse has drifted, recompute
  // it from a fresh factorization once.
  auto extract = [&] {
    Vector beta = Vector::Zero(d);
    for (int i = 0; i < d; ++i) {
      const int j = basis[static_cast<std::size_t>(i)];
      if (j < d) beta(j) += std::max(0.0, xb(i));
      else if (j < 2 * d) beta(j - d) -= std::max(0.0, xb(i));
    }
    return beta;
  };
  auto violation_of = [&](const Vector& beta) {
    Vector resid = sigma_ * beta;
    resid(m) -= 1.0;
    return resid.lpNorm<Eigen::Infinity>() - lambda;
  };
  Vector beta = extract();
  double violation = violation_of(beta);
  if (violation > 1e-3 * cfg_.solver_tol && since_refactor > 0) {
    refactor();
    basic_values();
    beta = extract();
    violation = violation_of(beta);
  }
  if (violation > cfg_.solver_tol) {
    std::ostringstream msg;
    msg << "CLIME column " << m << " violates its constraint by " << violation << " at lambda=" << lambda;
    throw NonConvergence(msg.str(), violation);
  }
  result_.col(m) = beta;
  // Caching every column's B^{-1} costs d³ doubles; beyond kCacheDim only the
  // basis is kept and the next solve refactors.
  if (d > kCacheDim) binv.resize(0, 0);
  return iterations;
}

Vector clime_column(const Matrix& sigma_hat, int m, double lambda, const ClimeConfig& cfg) {
  ClimeSolver solver(sigma_hat, cfg);
  return solver.solve_column(m, lambda);
}

Matrix clime_symmetrize(const Matrix& raw) {
  if (raw.rows() != raw.cols()) throw InvalidArgument("raw CLIME matrix must be square");
  Matrix out = raw;
  for (Eigen::Index k = 0; k < raw.cols(); ++k) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double upper = raw(j, k);
      const double lower = raw(k, j);
      const double keep = std::abs(upper) <= std::abs(lower) ? upper : lower;
      out(j, k) = keep;
      out(k, j) = keep;
    }
  }
  return out;
}

InverseResult invert_precision(const Matrix& theta) {
  if (theta.rows() != theta.cols()) throw InvalidArgument("precision matrix must be square");
  if (!theta.allFinite()) throw DataError("precision matrix contains non-finite entries");
  if (!is_symmetric(theta)) throw InvalidArgument("precision matrix must be symmetric");
  const Eigen::Index d = theta.rows();
  const Matrix sym = 0.5 * (theta + theta.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  const bool well_posed = lo > 0.0 && hi / lo <= 1e12;

  InverseResult out;
  Matrix target = sym;
  if (!well_posed) {
    out.ridged = true;
    out.ridge = std::abs(lo) + 1e-6;
    target.diagonal().array() += out.ridge;
  }
  Eigen::LLT<Matrix> llt(target);
  if (llt.info() != Eigen::Success) throw SingularMatrix("precision matrix not invertible even after ridging");
  out.inverse = llt.solve(Matrix::Identity(d, d));
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
  if (!out.inverse.allFinite()) throw SingularMatrix("precision inverse is not finite");
  return out;
}

PrecisionEstimate fit_precision(const Matrix& sigma_hat, double lambda, const ClimeConfig& cfg) {
  ClimeSolver solver(sigma_hat, cfg);
  PrecisionEstimate est;
  est.lambda = lambda;
  est.theta = clime_symmetrize(solver.solve(lambda));
  est.symmetrized = true;
  InverseResult inv = invert_precision(est.theta);
  est.theta_inv = std::move(inv.inverse);
  est.ridged = inv.ridged;
  est.ridge = inv.ridge;
  return est;
}

namespace {

struct FoldLosses {
  std::vector<double> likelihood;  // NaN when Θ̂ is not positive definite
  std::vector<double> frobenius;   // NaN when the solver failed
};

FoldLosses score_fold(const Matrix& sigma_train, const Matrix& sigma_test, const std::vector<double>& grid,
                      const ClimeConfig& cfg) {
  const std::size_t g = grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  FoldLosses out{std::vector<double>(g, nan), std::vector<double>(g, nan)};
  const Eigen::Index d = sigma_train.rows();
  ClimeSolver solver(sigma_train, cfg);
  // Large λ first so each solve warm-starts from a sparser neighbour.
  for (std::size_t idx = g; idx-- > 0;) {
    Matrix theta;
    try {
      theta = clime_symmetrize(solver.solve(grid[idx]));
    } catch (const NonConvergence&) {
      solver = ClimeSolver(sigma_train, cfg);
      continue;
    } catch (const Infeasible&) {
      solver = ClimeSolver(sigma_train, cfg);
      continue;
    }
    out.frobenius[idx] = (sigma_test * theta - Matrix::Identity(d, d)).norm();
    Eigen::LLT<Matrix> llt(theta);
    if (llt.info() == Eigen::Success) {
      const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      out.likelihood[idx] = sigma_test.cwiseProduct(theta).sum() - log_det;
    }
  }
  return out;
}

}  // namespace

CrossValidationResult cross_validate(const SampleMatrix& x, const ClimeConfig& cfg, std::uint64_t seed,
                                     int threads) {
  cfg.validate();
  const int n = static_cast<int>(x.n());
  const int folds = cfg.cv_folds;
  if (n < folds) throw InvalidArgument("cross-validation needs n >= cv_folds");
  if (n < 2 * folds) throw InvalidArgument("cross-validation needs at least two held-out rows per fold");

  CrossValidationResult result;
  result.grid = cfg.lambda_grid.empty() ? default_lambda_grid(estimate_correlation(x).sigma_hat) : cfg.lambda_grid;
  const std::size_t g = result.grid.size();
  if (g == 1) {
    result.lambda = result.grid.front();
    result.mean_loss.assign(1, 0.0);
    return result;
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<FoldLosses> losses(static_cast<std::size_t>(folds));
  parallel_for(folds, threads, [&](int f) {
    std::vector<int> train, test;
    for (int p = 0; p < n; ++p) (p % folds == f ? test : train).push_back(order[static_cast<std::size_t>(p)]);
    const Matrix sigma_train = estimate_correlation(x.rows(train)).sigma_hat;
    const Matrix sigma_test = estimate_correlation(x.rows(test)).sigma_hat;
    losses[static_cast<std::size_t>(f)] = score_fold(sigma_train, sigma_test, result.grid, cfg);
  });

  for (int f = 0; f < folds; ++f) {
    bool any = false;
    for (std::size_t idx = 0; idx < g; ++idx) {
      if (std::isnan(losses[static_cast<std::size_t>(f)].frobenius[idx]))
        result.failures.emplace_back(f, static_cast<int>(idx));
      else
        any = true;
    }
    if (!any) {
      std::ostringstream msg;
      msg << "cross-validation fold " << f << ": CLIME failed for every lambda in the grid";
      throw NonConvergence(msg.str(), std::numeric_limits<double>::infinity());
    }
  }

  // Each fit is scored by the held-out pseudo-likelihood when it is positive
  // definite and by the Frobenius residual otherwise; λ solved in every fold
  // compete on the fold mean.
  result.mean_loss.assign(g, std::numeric_limits<double>::infinity());
  result.likelihood_folds.assign(g, 0);
  for (std::size_t idx = 0; idx < g; ++idx) {
    double sum = 0.0;
    bool ok = true;
    for (const auto& fold : losses) {
      if (std::isnan(fold.frobenius[idx])) {
        ok = false;
        break;
      }
      if (std::isnan(fold.likelihood[idx])) {
        sum += fold.frobenius[idx];
      } else {
        sum += fold.likelihood[idx];
        ++result.likelihood_folds[idx];
      }
    }
    if (ok) result.mean_loss[idx] = sum / folds;
  }

  std::size_t best = g;
  for (std::size_t idx = 0; idx < g; ++idx) {
    if (!std::isfinite(result.mean_loss[idx])) continue;
    if (best == g || result.mean_loss[idx] < result.mean_loss[best]) best = idx;
  }
  if (best == g) throw NonConvergence("cross-validation: no lambda solved in every fold", 0.0);
  result.lambda = result.grid[best];
  return result;
}

double cross_validate_lambda(const SampleMatrix& x, const ClimeConfig& cfg, std::uint64_t seed) {
  return cross_validate(x, cfg, seed).lambda;
}

}  // namespace npn
