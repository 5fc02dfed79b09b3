#include "alphatest/projection.hpp"

#include "alphatest/errors.hpp"

#include <limits>
#include <sstream>
#include <string>

namespace alphatest::projection {

SieveFit fit_sieve(const Matrix& returns, const spline::DesignMatrix& design,
                   const FitOptions& options) {
    const Matrix& Z = design.z;
    const Eigen::Index T = returns.rows();
    const Eigen::Index N = returns.cols();
    const Eigen::Index k = Z.cols();
    if (Z.rows() != T) {
        throw DimensionError("fit_sieve: returns have " + std::to_string(T) +
                             " rows but the design has " + std::to_string(Z.rows()));
    }
    if (k != static_cast<Eigen::Index>(design.factors + 1) * design.basis_dim) {
        throw DimensionError("fit_sieve: design column count does not equal (d+1)L");
    }
    if (T <= k) {
        throw DimensionError("fit_sieve: need T > (d+1)L, got T = " + std::to_string(T) +
                             ", (d+1)L = " + std::to_string(k));
    }
    if (N < 1) throw DimensionError("fit_sieve: panel has no assets");

    // Centered spline columns sum to zero, so the last one is dropped; the
    // column space and hence M_Z are unchanged.
    Matrix zr(T, k - 1);
    const Eigen::Index drop = design.basis_dim - 1;
    zr.leftCols(drop) = Z.leftCols(drop);
    zr.rightCols(k - 1 - drop) = Z.rightCols(k - 1 - drop);

    const Matrix gram = zr.transpose() * zr;
    const Eigen::SelfAdjointEigenSolver<Matrix> spectrum(gram, Eigen::EigenvaluesOnly);
    const double lo = spectrum.eigenvalues().minCoeff();
    const double hi = spectrum.eigenvalues().maxCoeff();
    const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(cond <= options.condition_cap)) {
        std::ostringstream msg;
        msg << "fit_sieve: the sieve design is singular or ill-conditioned (condition number " << cond
            << " exceeds cap " << options.condition_cap << ")";
        throw SingularDesignError(msg.str(), cond);
    }
    const Eigen::LLT<Matrix> chol(gram);

    SieveFit fit;
    fit.periods = static_cast<int>(T);
    fit.assets = static_cast<int>(N);
    fit.factors = design.factors;
    fit.basis_dim = design.basis_dim;
    fit.condition_number = cond;
    fit.rank = static_cast<int>(k - 1);

    fit.residuals = returns - zr * chol.solve(zr.transpose() * returns);
    const Vector ones = Vector::Ones(T);
    fit.h = ones - zr * chol.solve(zr.transpose() * ones);
    fit.kappa = fit.h.squaredNorm();
    if (!(fit.kappa > 1e-10 * static_cast<double>(T))) {
        throw SingularDesignError(
            "fit_sieve: the sieve space contains the constant, so the average alpha is not "
            "identified (1'M_Z 1 = 0)",
            cond);
    }
    fit.eta = fit.h * (static_cast<double>(T) / fit.kappa);
    fit.delta_hat = fit.residuals.colwise().sum().transpose() / fit.kappa;

    if (options.with_covariance) {
        const Matrix centered = fit.residuals.rowwise() - fit.residuals.colwise().mean();
        fit.sigma_hat = (centered.transpose() * centered) / static_cast<double>(T);
    }
    return fit;
}

ScoreProcess score_process(const SieveFit& fit) {
    ScoreProcess out;
    out.x_hat = fit.residuals.array().colwise() * fit.eta.array();
    out.x_tilde = out.x_hat.rowwise() - out.x_hat.colwise().mean();
    return out;
}

}  // namespace alphatest::projection
