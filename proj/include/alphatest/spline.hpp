#pragma once

#include "alphatest/types.hpp"

#include <vector>

namespace alphatest::spline {

/// Order-q B-splines with p uniform interior knots on [0, 1], clamped ends.
struct SplineConfig {
    int order = 4;           // q (4 = cubic)
    int interior_knots = 1;  // p

    [[nodiscard]] int basis_dim() const { return order + interior_knots; }
    /// Throws ConfigError when q < 2 or p < 0.
    void validate() const;
    /// Clamped knot vector of length p + 2q: q zeros, k/(p+1) for k = 1..p, q ones.
    [[nodiscard]] std::vector<double> knots() const;

    /// Config with the requested total basis dimension L = p + q.
    [[nodiscard]] static SplineConfig with_basis_dim(int order, int basis_dim);
};

/// Basis evaluated on the grid u_t = t/T, t = 1..T.
struct BasisEval {
    Vector grid;
    Matrix values;    // T x L, rows are B(u_t)
    Matrix centered;  // T x L, B(u_t) minus the column means over the grid
};

/// T x (d+1)L sieve design with rows (B~(u_t), f_t1 B(u_t), ..., f_td B(u_t)).
struct DesignMatrix {
    Matrix z;
    int factors = 0;
    int basis_dim = 0;
};

/// Values of all L basis functions at u. Uses the triangular (de Boor)
/// recursion on the nonzero span; u = 1 belongs to the last span.
[[nodiscard]] Vector evaluate(const SplineConfig& cfg, double u);

[[nodiscard]] BasisEval build_basis(int periods, const SplineConfig& cfg);

/// Throws DimensionError when the factor rows do not match the basis grid.
[[nodiscard]] DesignMatrix build_design(const BasisEval& basis, const Matrix& factors);

}  // namespace alphatest::spline
