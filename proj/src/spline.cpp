#include "alphatest/spline.hpp"

#include "alphatest/errors.hpp"

#include <algorithm>
#include <string>

namespace alphatest::spline {

void SplineConfig::validate() const {
    if (order < 2) throw ConfigError("spline order must be >= 2, got " + std::to_string(order));
    if (interior_knots < 0) {
        throw ConfigError("interior knot count must be >= 0, got " + std::to_string(interior_knots));
    }
}

std::vector<double> SplineConfig::knots() const {
    validate();
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(interior_knots + 2 * order));
    t.insert(t.end(), static_cast<std::size_t>(order), 0.0);
    for (int k = 1; k <= interior_knots; ++k) {
        t.push_back(static_cast<double>(k) / static_cast<double>(interior_knots + 1));
    }
    t.insert(t.end(), static_cast<std::size_t>(order), 1.0);
    return t;
}

SplineConfig SplineConfig::with_basis_dim(int order, int basis_dim) {
    SplineConfig cfg{order, basis_dim - order};
    cfg.validate();
    return cfg;
}

Vector evaluate(const SplineConfig& cfg, double u) {
    const std::vector<double> t = cfg.knots();
    const int q = cfg.order;
    const int L = cfg.basis_dim();
    if (u < 0.0 || u > 1.0) throw DomainError("spline argument must lie in [0, 1]");

    // Span index s with t[s] <= u < t[s+1], restricted to q-1 <= s <= L-1.
    int s = static_cast<int>(std::upper_bound(t.begin(), t.end(), u) - t.begin()) - 1;
    s = std::clamp(s, q - 1, L - 1);

    // de Boor's triangular scheme: N holds the q nonzero functions
    // B_{s-q+1}, ..., B_s of increasing degree.
    std::vector<double> N(static_cast<std::size_t>(q), 0.0);
    std::vector<double> left(static_cast<std::size_t>(q), 0.0);
    std::vector<double> right(static_cast<std::size_t>(q), 0.0);
    N[0] = 1.0;
    for (int j = 1; j < q; ++j) {
        left[j] = u - t[static_cast<std::size_t>(s + 1 - j)];
        right[j] = t[static_cast<std::size_t>(s + j)] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom != 0.0 ? N[r] / denom : 0.0;
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }

    Vector out = Vector::Zero(L);
    for (int r = 0; r < q; ++r) out(s - q + 1 + r) = N[r];
    return out;
}

BasisEval build_basis(int periods, const SplineConfig& cfg) {
    cfg.validate();
    if (periods < 1) throw DimensionError("build_basis: sample size must be positive");
    const int L = cfg.basis_dim();
    BasisEval out;
    out.grid.resize(periods);
    out.values.resize(periods, L);
    for (int t = 0; t < periods; ++t) {
        const double u = static_cast<double>(t + 1) / static_cast<double>(periods);
        out.grid(t) = u;
        out.values.row(t) = evaluate(cfg, u).transpose();
    }
    out.centered = out.values.rowwise() - out.values.colwise().mean();
    return out;
}

DesignMatrix build_design(const BasisEval& basis, const Matrix& factors) {
    const Eigen::Index T = basis.values.rows();
    const Eigen::Index L = basis.values.cols();
    if (factors.rows() != T) {
        throw DimensionError("build_design: factors have " + std::to_string(factors.rows()) +
                             " rows but the basis grid has " + std::to_string(T));
    }
    const Eigen::Index d = factors.cols();
    DesignMatrix out;
    out.factors = static_cast<int>(d);
    out.basis_dim = static_cast<int>(L);
    out.z.resize(T, (d + 1) * L);
    out.z.leftCols(L) = basis.centered;
    for (Eigen::Index j = 0; j < d; ++j) {
        out.z.middleCols((j + 1) * L, L) = basis.values.array().colwise() * factors.col(j).array();
    }
    return out;
}

}  // namespace alphatest::spline
