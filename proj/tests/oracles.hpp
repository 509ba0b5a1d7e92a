#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance runner. Everything here is deliberately naive: explicit d²×d²
// Kronecker products, O(n²) pair loops, and brute-force LP vertex
// enumeration. Nothing calls back into the library's fast paths.

#include "npn/common.hpp"

#include <cstdint>
#include <random>

namespace oracle {

using npn::Matrix;
using npn::Vector;

/// Column-major vec index of entry (a, b) in a d×d matrix.
inline int vec_index(int a, int b, int d) { return b * d + a; }

Matrix kendall_brute(const Matrix& x);

/// (1/(n−1)) Σ_{i'≠i} sign[(x_ij − x_i'j)(x_ik − x_i'k)].
double sign_average_brute(const Matrix& x, int i, int j, int k);

/// b̂ = [1, −ŵ^T]^T laid out in vec order, with ŵ = −Ω_{c,p} / Ω_{p,p} taken
/// from the explicit Kronecker product Ω = Θ ⊗ Θ.
Vector decorrelation_vector(const Matrix& theta, int j, int k);

/// Θ with entries (j,k) and (k,j) set to zero.
Matrix zero_pair(const Matrix& theta, int j, int k);

/// The general decorrelated score with explicit ŵ, evaluated at Θ̌:
/// b̂(Θ̌)^T vec(Σ̂ − Θ̌^{-1}) (minus the likelihood-gradient form).
double general_score(const Matrix& sigma_hat, const Matrix& theta, int j, int k);

/// Ĝ^i from explicit pair sums of the kernel h^{ii'}.
Matrix hajek_matrix_brute(const Matrix& x, const Matrix& theta_inv, int i);

/// F̂ ⊙ Ĝ^i for every sample, vectorized as rows of an n × d² matrix.
Matrix hajek_rows_brute(const Matrix& x, const Matrix& sigma_hat, const Matrix& theta_inv);

/// σ̂² = R̂_pp − 2 R̂_{p,c} ŵ + ŵ^T R̂_{c,c} ŵ with R̂ the explicit d²×d² matrix.
double variance_explicit(const Matrix& x, const Matrix& sigma_hat, const Matrix& theta, const Matrix& theta_inv,
                         int j, int k);

struct LpSolution {
  double objective = 0.0;
  Vector beta;
  bool feasible = false;
};

/// min ‖β‖₁ s.t. ‖Σβ − e_m‖_∞ ≤ λ by enumerating every vertex of the
/// arrangement formed by the 2d constraint faces and the d coordinate planes.
/// Exponential in d; intended for d ≤ 5.
LpSolution clime_lp_brute(const Matrix& sigma, int m, double lambda);

/// Random correlation matrix from a Wishart-like draw with d + extra degrees of freedom.
Matrix random_correlation(int d, std::mt19937_64& rng, int extra = 3);

/// Random symmetric, strictly diagonally dominant Θ with a few zero entries.
Matrix random_precision(int d, std::mt19937_64& rng);

Matrix random_normal(int rows, int cols, std::mt19937_64& rng);

/// Adaptive Simpson quadrature of f on [a, b].
template <class F>
double simpson(F f, double a, double b, double tol, int depth = 40);

}  // namespace oracle

#include "oracles_quadrature.hpp"
