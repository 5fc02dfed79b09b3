#include "alphatest/combination.hpp"

#include "alphatest/distributions.hpp"
#include "alphatest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace alphatest::combination {

void CauchyCombine::validate() const {
    if (weights.empty()) throw ConfigError("Cauchy combination needs at least one weight");
    for (double w : weights) {
        if (!(w > 0.0)) throw ConfigError("Cauchy combination weights must be positive");
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("Cauchy combination weights must sum to 1");
    if (!(clamp_epsilon > 0.0 && clamp_epsilon < 0.5)) {
        throw ConfigError("Cauchy combination clamp epsilon must lie in (0, 1/2)");
    }
}

double cauchy_transform(double p) {
    const double angle = std::numbers::pi * p;
    return std::cos(angle) / std::sin(angle);
}

Combined combine(std::span<const double> p_values, const CauchyCombine& rule) {
    rule.validate();
    if (p_values.size() != rule.weights.size()) {
        throw DimensionError("Cauchy combination: p-value and weight counts differ");
    }
    Combined out;
    out.statistic = 0.0;
    for (std::size_t i = 0; i < p_values.size(); ++i) {
        const double p = p_values[i];
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("Cauchy combination: p-value outside [0, 1]");
        const double clamped = std::clamp(p, rule.clamp_epsilon, 1.0 - rule.clamp_epsilon);
        out.statistic += rule.weights[i] * cauchy_transform(clamped);
    }
    out.p_value = dist::cauchy_sf(out.statistic);
    return out;
}

}  // namespace alphatest::combination
