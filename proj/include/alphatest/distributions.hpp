#pragma once

namespace alphatest::dist {

/// Standard normal distribution function.
[[nodiscard]] double normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate far into the right tail.
[[nodiscard]] double normal_sf(double x);

/// Extreme-value law F(x) = exp(-pi^{-1/2} exp(-x/2)) of the centered
/// maximum of N squared standard normals.
[[nodiscard]] double gumbel_cdf(double x);
/// 1 - F(x) without cancellation.
[[nodiscard]] double gumbel_sf(double x);
/// F^{-1}(p) for p in (0, 1).
[[nodiscard]] double gumbel_quantile(double p);
/// Centering 2 log N - log log N; requires N >= 3.
[[nodiscard]] double gumbel_centering(long n);

/// Standard Cauchy distribution function G(x) = 1/2 + arctan(x)/pi.
[[nodiscard]] double cauchy_cdf(double x);
/// 1 - G(x) without cancellation.
[[nodiscard]] double cauchy_sf(double x);

/// Upper tail of the chi-square law with `dof` degrees of freedom.
[[nodiscard]] double chi_square_sf(double x, double dof);

}  // namespace alphatest::dist
