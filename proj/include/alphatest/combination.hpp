#pragma once

#include <span>
#include <vector>

namespace alphatest::combination {

/// Cauchy (tangent) combination of p-values: T = sum_i w_i tan{pi (1/2 - p_i)},
/// combined p = 1 - G(T) with G the standard Cauchy distribution function.
struct CauchyCombine {
    std::vector<double> weights{0.5, 0.5};
    /// p-values are clamped to [eps, 1 - eps] before the tangent transform.
    double clamp_epsilon = 1e-15;

    /// Throws ConfigError unless weights are positive and sum to one.
    void validate() const;
};

struct Combined {
    double statistic = 0.0;
    double p_value = 0.5;
};

/// Throws DimensionError on length mismatch and DomainError for p outside [0, 1].
[[nodiscard]] Combined combine(std::span<const double> p_values, const CauchyCombine& rule = {});

/// tan{pi (1/2 - p)} evaluated as cot(pi p) so that p near 0 or 1 keeps precision.
[[nodiscard]] double cauchy_transform(double p);

}  // namespace alphatest::combination
