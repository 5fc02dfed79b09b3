#pragma once

#include "alphatest/spline.hpp"
#include "alphatest/types.hpp"

namespace alphatest::projection {

struct FitOptions {
    /// Largest accepted condition number of Z'Z.
    double condition_cap = 1e12;
    /// Compute the N x N centered residual covariance. Only the classical
    /// sum test needs it; large-N callers that skip that test can turn it off.
    bool with_covariance = true;
};

/// Everything derived from one null-restricted sieve regression R = Z lambda + e.
/// The annihilator M_Z = I - Z (Z'Z)^{-1} Z' is never formed.
struct SieveFit {
    Matrix residuals;   // T x N, M_Z R
    Vector h;           // M_Z 1_T
    double kappa = 0.0; // 1' M_Z 1 = sum h_t^2
    Vector eta;         // h_t / (kappa / T)
    Vector delta_hat;   // (1' M_Z R_i) / (1' M_Z 1)
    Matrix sigma_hat;   // N x N, divisor T; empty when FitOptions::with_covariance is false
    int periods = 0;
    int assets = 0;
    int factors = 0;
    int basis_dim = 0;
    double condition_number = 0.0;  // of the reduced Gram matrix
    int rank = 0;                   // (d + 1) L - 1: centered spline columns sum to zero

    /// (d + 1) L, the number of sieve regressors.
    [[nodiscard]] int sieve_dim() const { return (factors + 1) * basis_dim; }
};

/// Projected score X^_t = e^_t eta_t and its column-centered version.
struct ScoreProcess {
    Matrix x_hat;
    Matrix x_tilde;
};

/// Fits the sieve regression for every asset.
/// Throws DimensionError on row mismatch or T <= (d+1)L, and
/// SingularDesignError when the design (with one redundant centered spline
/// column removed) is singular, badly conditioned, or spans the constant
/// (kappa = 0).
[[nodiscard]] SieveFit fit_sieve(const Matrix& returns, const spline::DesignMatrix& design,
                                 const FitOptions& options = {});

[[nodiscard]] ScoreProcess score_process(const SieveFit& fit);

}  // namespace alphatest::projection
