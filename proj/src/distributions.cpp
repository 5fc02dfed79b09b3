#include "alphatest/distributions.hpp"

#include "alphatest/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace alphatest::dist {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gumbel_cdf(double x) {
    return std::exp(-std::exp(-0.5 * x) / std::sqrt(std::numbers::pi));
}

double gumbel_sf(double x) {
    return -std::expm1(-std::exp(-0.5 * x) / std::sqrt(std::numbers::pi));
}

double gumbel_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("gumbel_quantile: p must lie in (0, 1)");
    return -2.0 * std::log(-std::sqrt(std::numbers::pi) * std::log(p));
}

double gumbel_centering(long n) {
    if (n < 3) throw DomainError("Gumbel calibration requires N >= 3 (log log N must be positive)");
    const double log_n = std::log(static_cast<double>(n));
    return 2.0 * log_n - std::log(log_n);
}

double cauchy_cdf(double x) { return 0.5 + std::atan(x) / std::numbers::pi; }

double cauchy_sf(double x) {
    if (x > 0.0) return std::atan(1.0 / x) / std::numbers::pi;
    return 0.5 - std::atan(x) / std::numbers::pi;
}

double chi_square_sf(double x, double dof) {
    if (dof <= 0.0) throw DomainError("chi_square_sf: degrees of freedom must be positive");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

}  // namespace alphatest::dist
