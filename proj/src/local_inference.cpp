#include "npn/local_inference.hpp"

#include "npn/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace npn {
namespace {

void require_edge(Eigen::Index d, int j, int k) {
  if (j < 0 || k < 0 || j >= d || k >= d) throw InvalidArgument("edge index out of range");
  if (j == k) throw InvalidArgument("edge endpoints must differ (j != k)");
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

double diagonal_product(const Matrix& theta, int j, int k) {
  const double prod = theta(j, j) * theta(k, k);
  if (!(std::abs(prod) >= kDiagonalFloor)) {
    std::ostringstream msg;
    msg << "degenerate diagonal for edge (" << j << "," << k << "): Θ_jj·Θ_kk = " << prod;
    throw DegenerateDiagonal(msg.str());
  }
  return prod;
}

std::vector<int> support(const Matrix& theta, int col) {
  std::vector<int> out;
  for (Eigen::Index a = 0; a < theta.rows(); ++a)
    if (theta(a, col) != 0.0) out.push_back(static_cast<int>(a));
  return out;
}

double critical_value(double alpha) { return -normal_quantile(alpha / 2.0); }

}  // namespace

InferenceContext make_context(const SampleMatrix& x, PrecisionEstimate estimate) {
  Matrix sigma_hat = estimate_correlation(x).sigma_hat;
  return make_context(x, std::move(sigma_hat), std::move(estimate));
}

InferenceContext make_context(const SampleMatrix& x, Matrix sigma_hat, PrecisionEstimate estimate) {
  if (estimate.theta.rows() != x.d() || estimate.theta_inv.rows() != x.d() || sigma_hat.rows() != x.d())
    throw InvalidArgument("precision estimate dimension does not match the data");
  InferenceContext ctx;
  ctx.n = static_cast<int>(x.n());
  ctx.sigma_hat = std::move(sigma_hat);
  ctx.signs = sign_average_tensor(x);
  ctx.estimate = std::move(estimate);
  return ctx;
}

double b_contract(const Matrix& m, const Matrix& theta, int j, int k) {
  require_edge(theta.rows(), j, k);
  if (m.rows() != theta.rows() || m.cols() != theta.cols()) throw InvalidArgument("b_contract: size mismatch");
  const double denom = diagonal_product(theta, j, k);
  return theta.col(j).dot(m * theta.col(k)) / denom;
}

double decorrelated_score(const Matrix& sigma_hat, const Matrix& theta, int j, int k,
                          ZeroingConvention convention) {
  require_edge(theta.rows(), j, k);
  const double denom = diagonal_product(theta, j, k);
  Vector left = theta.col(j);
  Vector right = theta.col(k);
  right(j) = 0.0;
  if (convention == ZeroingConvention::Symmetric) left(k) = 0.0;
  return left.dot(sigma_hat * right) / denom;
}

HajekKernel hajek_kernel(const SignAverageTensor& s, const Matrix& sigma_hat, const Matrix& theta_inv, int j,
                         int k) {
  if (s.d() != sigma_hat.rows() || s.d() != theta_inv.rows()) throw InvalidArgument("hajek_kernel: size mismatch");
  if (j < 0 || k < 0 || j >= s.d() || k >= s.d()) throw InvalidArgument("edge index out of range");
  HajekKernel out;
  const double offset = std::asin(std::clamp(theta_inv(j, k), -kArcsinClamp, kArcsinClamp));
  const auto signs = s.pair(j, k);
  out.g_hat.resize(s.n());
  for (int i = 0; i < s.n(); ++i) out.g_hat(i) = -std::numbers::pi / 2.0 * signs[i] + offset;
  out.f_hat = std::sqrt(std::max(0.0, 1.0 - sigma_hat(j, k) * sigma_hat(j, k)));
  return out;
}

Vector hajek_contractions(const SignAverageTensor& s, const Matrix& sigma_hat, const Matrix& theta,
                          const Matrix& theta_inv, int j, int k) {
  const int d = s.d();
  if (sigma_hat.rows() != d || theta.rows() != d || theta_inv.rows() != d)
    throw InvalidArgument("hajek_contractions: size mismatch");
  require_edge(d, j, k);
  const double denom = diagonal_product(theta, j, k);

  const auto left = support(theta, j);
  const auto right = support(theta, k);
  Vector out = Vector::Zero(s.n());
  double constant = 0.0;
  for (int b : right) {
    for (int a : left) {
      const double f = std::sqrt(std::max(0.0, 1.0 - sigma_hat(a, b) * sigma_hat(a, b)));
      const double w = theta(a, j) * theta(b, k) * f;
      if (w == 0.0) continue;
      constant += w * std::asin(std::clamp(theta_inv(a, b), -kArcsinClamp, kArcsinClamp));
      const double coef = -std::numbers::pi / 2.0 * w;
      const auto signs = s.pair(a, b);
      for (int i = 0; i < s.n(); ++i) out(i) += coef * signs[i];
    }
  }
  out.array() += constant;
  return out / denom;
}

VarianceEstimate estimate_variance(const Vector& contractions) {
  VarianceEstimate v;
  const double raw = contractions.size() > 0 ? contractions.squaredNorm() / static_cast<double>(contractions.size()) : 0.0;
  if (raw > kVarianceFloor) {
    v.sigma2 = raw;
  } else {
    v.sigma2 = kVarianceFloor;
    v.floored = true;
  }
  return v;
}

double variance_estimate(const SignAverageTensor& s, const Matrix& sigma_hat, const Matrix& theta,
                         const Matrix& theta_inv, int j, int k) {
  return estimate_variance(hajek_contractions(s, sigma_hat, theta, theta_inv, j, k)).sigma2;
}

double wald_estimate(const Matrix& sigma_hat, const Matrix& theta, int j, int k, WaldStep step) {
  require_edge(theta.rows(), j, k);
  const double t = theta(j, k);
  const double c = theta.col(j).dot(sigma_hat * theta.col(k));
  double slope = 2.0;
  if (step == WaldStep::Exact)
    slope = theta.row(j).dot(sigma_hat.col(j)) + sigma_hat.row(k).dot(theta.col(k));
  else if (step == WaldStep::OffDiagonal)
    slope = theta.row(j).dot(sigma_hat.col(k)) + sigma_hat.row(j).dot(theta.col(k));
  const double denom = slope - 1.0;
  if (!(std::abs(denom) >= 1e-10)) {
    std::ostringstream msg;
    msg << "Wald estimator denominator vanishes for edge (" << j << "," << k << "): " << denom;
    throw DegenerateDenominator(msg.str(), denom);
  }
  return (t * slope - c) / denom;
}

Interval confidence_interval(double theta_w, double sigma_hat_sd, double theta_jj, double theta_kk, int n,
                             double alpha) {
  require_alpha(alpha);
  if (n < 1) throw InvalidArgument("confidence interval needs n >= 1");
  const double half = critical_value(alpha) * 2.0 * sigma_hat_sd * theta_jj * theta_kk / std::sqrt(static_cast<double>(n));
  return {theta_w - std::abs(half), theta_w + std::abs(half)};
}

double local_power_curve(double k, double alpha) {
  require_alpha(alpha);
  const double q = critical_value(alpha);
  // Written as α plus the gain in each tail so that ψ(0) = α holds exactly and
  // ψ(K) = ψ(−K) bitwise (the two gains commute).
  const double tail = normal_cdf(-q);
  return alpha + ((normal_cdf(-q - k) - tail) + (normal_cdf(-q + k) - tail));
}

namespace {

// σ̂² shared by both tests for one edge.
VarianceEstimate edge_variance(const InferenceContext& ctx, int j, int k) {
  const auto& est = ctx.estimate;
  return estimate_variance(hajek_contractions(ctx.signs, ctx.sigma_hat, est.theta, est.theta_inv, j, k));
}

EdgeTestReport base_report(const InferenceContext& ctx, int j, int k, double alpha, const VarianceEstimate& var) {
  EdgeTestReport r;
  r.j = j;
  r.k = k;
  r.n = ctx.n;
  r.alpha = alpha;
  r.sigma2_hat = var.sigma2;
  r.variance_floored = var.floored;
  r.h_partial = 1.0 / diagonal_product(ctx.estimate.theta, j, k);
  return r;
}

void fill_score(EdgeTestReport& r, const InferenceContext& ctx, ZeroingConvention convention) {
  const double q = critical_value(r.alpha);
  r.score = decorrelated_score(ctx.sigma_hat, ctx.estimate.theta, r.j, r.k, convention);
  r.score_stat = std::sqrt(static_cast<double>(ctx.n)) * r.score / (2.0 * std::sqrt(r.sigma2_hat));
  r.p_score = two_sided_p(r.score_stat);
  r.reject_score = r.score_stat * r.score_stat > q * q;
}

void fill_wald(EdgeTestReport& r, const InferenceContext& ctx) {
  const double q = critical_value(r.alpha);
  const auto& theta = ctx.estimate.theta;
  const double sd = std::sqrt(r.sigma2_hat);
  r.theta_w = wald_estimate(ctx.sigma_hat, theta, r.j, r.k);
  r.wald_stat = r.h_partial * std::sqrt(static_cast<double>(ctx.n)) * r.theta_w / (2.0 * sd);
  r.p_wald = two_sided_p(r.wald_stat);
  r.reject_wald = r.wald_stat * r.wald_stat > q * q;
  const Interval ci = confidence_interval(r.theta_w, sd, theta(r.j, r.j), theta(r.k, r.k), ctx.n, r.alpha);
  r.ci_low = ci.low;
  r.ci_high = ci.high;
}

}  // namespace

EdgeTestReport score_test(const InferenceContext& ctx, int j, int k, double alpha, ZeroingConvention convention) {
  require_alpha(alpha);
  require_edge(ctx.sigma_hat.rows(), j, k);
  EdgeTestReport r = base_report(ctx, j, k, alpha, edge_variance(ctx, j, k));
  fill_score(r, ctx, convention);
  return r;
}

EdgeTestReport score_test(const SampleMatrix& x, const PrecisionEstimate& est, int j, int k, double alpha) {
  return score_test(make_context(x, est), j, k, alpha);
}

EdgeTestReport wald_test(const InferenceContext& ctx, int j, int k, double alpha) {
  require_alpha(alpha);
  require_edge(ctx.sigma_hat.rows(), j, k);
  EdgeTestReport r = base_report(ctx, j, k, alpha, edge_variance(ctx, j, k));
  fill_wald(r, ctx);
  return r;
}

EdgeTestReport wald_test(const SampleMatrix& x, const PrecisionEstimate& est, int j, int k, double alpha) {
  return wald_test(make_context(x, est), j, k, alpha);
}

EdgeTestReport test_edge(const InferenceContext& ctx, int j, int k, double alpha, ZeroingConvention convention) {
  require_alpha(alpha);
  require_edge(ctx.sigma_hat.rows(), j, k);
  EdgeTestReport r = base_report(ctx, j, k, alpha, edge_variance(ctx, j, k));
  fill_score(r, ctx, convention);
  fill_wald(r, ctx);
  return r;
}

void validate_report(const EdgeTestReport& r) {
  auto fail = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "edge report (" << r.j << "," << r.k << ") violates invariant: " << what;
    throw Error(msg.str());
  };
  if (r.j == r.k) fail("j == k");
  if (!(r.alpha > 0.0 && r.alpha < 1.0)) fail("alpha outside (0,1)");
  if (!(r.sigma2_hat > 0.0)) fail("sigma2_hat not positive");
  if (!(r.h_partial > 0.0) && !(r.h_partial < 0.0)) fail("h_partial not finite and nonzero");
  const double q = critical_value(r.alpha);
  constexpr double kTol = 1e-12;
  if (r.has_score()) {
    if (!(r.p_score >= 0.0 && r.p_score <= 1.0)) fail("p_score outside [0,1]");
    if (std::abs(r.p_score - two_sided_p(r.score_stat)) > kTol) fail("p_score != 2(1 - Phi(|ST|))");
    if (r.reject_score != (r.score_stat * r.score_stat > q * q)) fail("reject_score inconsistent with ST^2");
  }
  if (r.has_wald()) {
    if (!(r.p_wald >= 0.0 && r.p_wald <= 1.0)) fail("p_wald outside [0,1]");
    if (std::abs(r.p_wald - two_sided_p(r.wald_stat)) > kTol) fail("p_wald != 2(1 - Phi(|W|))");
    if (r.reject_wald != (r.wald_stat * r.wald_stat > q * q)) fail("reject_wald inconsistent with W^2");
    if (!(r.ci_low <= r.theta_w && r.theta_w <= r.ci_high)) fail("theta_w outside its interval");
    // L = 2σ̂Θ̂_jjΘ̂_kk = 2σ̂ / h_partial.
    const double half = q * 2.0 * std::sqrt(r.sigma2_hat) / std::abs(r.h_partial) / std::sqrt(static_cast<double>(r.n));
    const double scale = std::max(1.0, std::abs(r.theta_w));
    if (std::abs((r.ci_high - r.ci_low) / 2.0 - half) > 1e-9 * scale) fail("interval half-width != q L / sqrt(n)");
  }
}

}  // namespace npn
