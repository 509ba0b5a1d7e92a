#pragma once

namespace npn {

/// Standard normal CDF Φ(x), evaluated through erfc for accurate tails.
double normal_cdf(double x);

/// Φ^{-1}(p) for p in (0, 1).
double normal_quantile(double p);

/// Two-sided p-value 2(1 − Φ(|z|)).
double two_sided_p(double z);

}  // namespace npn
