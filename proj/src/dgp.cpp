#include "alphatest/dgp.hpp"

#include "alphatest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace alphatest::dgp {

namespace {

// Stream identifiers within one replication.
constexpr std::uint64_t kFactorStream = 1;
constexpr std::uint64_t kErrorStream = 2;
constexpr std::uint64_t kAlphaStream = 3;

Matrix power_law_toeplitz(int n, double diagonal, double scale, double omega) {
    Matrix m = Matrix::Zero(n, n);
    const double reach = omega * n;
    for (int i = 0; i < n; ++i) {
        m(i, i) = diagonal;
        for (int j = 0; j < n; ++j) {
            const int gap = std::abs(i - j);
            if (gap >= 1 && gap <= reach) m(i, j) = scale / (static_cast<double>(gap) * gap);
        }
    }
    return m;
}

}  // namespace

int dependence_order(Dependence dep, int periods) {
    switch (dep) {
        case Dependence::kNone: return 0;
        case Dependence::kShort: return 2;
        case Dependence::kLong: return periods - 1;
    }
    return 0;
}

void FactorParams::validate() const {
    if (!(a > 0.0)) throw ConfigError("GARCH intercept a must be positive");
    if (b < 0.0 || c < 0.0) throw ConfigError("GARCH coefficients b, c must be nonnegative");
    if (!(b + c < 1.0)) throw ConfigError("nonstationary GARCH: need b + c < 1");
    if (!(std::abs(phi) < 1.0)) throw ConfigError("nonstationary AR(1): need |phi| < 1");
}

std::vector<FactorParams> example_factor_params(Example example) {
    if (example == Example::kOne) return {{0.34, 0.05, 0.32, 0.67, 0.13}};
    return {{0.34, 0.05, 0.32, 0.67, 0.13},
            {0.04, 0.07, 0.33, 0.51, 0.03},
            {0.06, 0.04, 0.26, 0.72, 0.05}};
}

FactorSeries gen_factors(const std::vector<FactorParams>& params, int total_periods, Rng& rng,
                         GarchShock shock) {
    if (total_periods <= kBurnIn) {
        throw ConfigError("gen_factors: total periods must exceed the burn-in of " +
                          std::to_string(kBurnIn));
    }
    for (const auto& p : params) p.validate();
    std::normal_distribution<double> normal(0.0, 1.0);

    const int T = total_periods - kBurnIn;
    FactorSeries out;
    out.values.resize(T, static_cast<Eigen::Index>(params.size()));
    for (std::size_t j = 0; j < params.size(); ++j) {
        const FactorParams& p = params[j];
        out.names.push_back("f" + std::to_string(j + 1));
        double f = p.mu;
        double h = p.a / (1.0 - p.b - p.c);
        double xi = shock == GarchShock::kIndependent ? normal(rng) : std::sqrt(h) * normal(rng);
        for (int t = 0; t < total_periods; ++t) {
            h = p.a + p.b * h + p.c * xi * xi;
            const double eps = normal(rng);
            f = p.mu + p.phi * (f - p.mu) + std::sqrt(h) * eps;
            xi = shock == GarchShock::kIndependent ? normal(rng) : std::sqrt(h) * eps;
            if (t >= kBurnIn) out.values(t - kBurnIn, static_cast<Eigen::Index>(j)) = f;
        }
    }
    return out;
}

double logistic_loading(double u) { return 1.0 / (1.0 + std::exp(-2.0 * (10.0 * u - 2.0))); }

Matrix beta_paths(Example example, int periods) {
    const int d = example == Example::kOne ? 1 : 3;
    Matrix beta(periods, d);
    for (int t = 0; t < periods; ++t) {
        const double z = logistic_loading(static_cast<double>(t + 1) / periods);
        if (example == Example::kOne) {
            beta(t, 0) = z;
        } else {
            beta(t, 0) = 0.5 + 0.5 * z;
            beta(t, 1) = 0.5 + 0.1 * z;
            beta(t, 2) = 0.5 + 0.2 * z;
        }
    }
    return beta;
}

Matrix ErrorParams::sigma() const { return power_law_toeplitz(assets, 1.0, phi2, omega); }

Matrix ErrorParams::lag_matrix(int h) const {
    if (h < 1) throw DomainError("lag_matrix: lag must be >= 1");
    if (h <= 2) return power_law_toeplitz(assets, phi1 / h, phi1 / h, omega);
    return Matrix::Identity(assets, assets) * std::exp(-2.0 * h);
}

double draw_innovation(Innovation innovation, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    if (innovation == Innovation::kGaussian) return normal(rng);
    std::chi_squared_distribution<double> chi2(6.0);
    const double z = normal(rng);
    const double t6 = z / std::sqrt(chi2(rng) / 6.0);
    return t6 / std::sqrt(6.0 / 4.0);
}

ErrorGenerator::ErrorGenerator(ErrorParams params) : params_(params) {
    if (params_.assets < 1) throw ConfigError("error process needs at least one asset");
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(params_.sigma());
    const Vector& values = eig.eigenvalues();
    if (values.minCoeff() < -1e-6) {
        throw ConfigError("cross-sectional covariance is indefinite (smallest eigenvalue " +
                          std::to_string(values.minCoeff()) + ")");
    }
    const Vector root = values.cwiseMax(0.0).cwiseSqrt();
    sigma_sqrt_ = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
    if (params_.dependence != Dependence::kNone) {
        lag1_ = params_.lag_matrix(1);
        lag2_ = params_.lag_matrix(2);
    }
}

Matrix ErrorGenerator::generate(int total_periods, Rng& rng) const {
    const int N = params_.assets;
    const int total = total_periods;
    Matrix u(N, total);
    for (int t = 0; t < total; ++t) {
        for (int i = 0; i < N; ++i) u(i, t) = draw_innovation(params_.innovation, rng);
    }
    const Matrix z = sigma_sqrt_ * u;
    Matrix e = z;
    const int order = dependence_order(params_.dependence, total - kBurnIn);
    if (order >= 1 && total > 1) e.rightCols(total - 1).noalias() += lag1_ * z.leftCols(total - 1);
    if (order >= 2 && total > 2) e.rightCols(total - 2).noalias() += lag2_ * z.leftCols(total - 2);
    for (int h = 3; h <= order && h < total; ++h) {
        e.rightCols(total - h) += std::exp(-2.0 * h) * z.leftCols(total - h);
    }
    return e.transpose();
}

Matrix gen_errors(const ErrorParams& params, int total_periods, Rng& rng) {
    return ErrorGenerator(params).generate(total_periods, rng);
}

double default_signal_constant(Dependence dep) {
    switch (dep) {
        case Dependence::kNone: return 12.0;
        case Dependence::kShort: return 80.0;
        case Dependence::kLong: return 90.0;
    }
    return 12.0;
}

Matrix gen_alpha(const AlphaAlternative& alt, int periods, int assets, Rng& rng) {
    if (alt.sparsity < 1 || alt.sparsity > assets) {
        throw ConfigError("alpha sparsity must lie in [1, N], got s = " + std::to_string(alt.sparsity));
    }
    if (!(alt.c_m > 0.0)) throw ConfigError("alpha signal constant c_M must be positive");
    std::vector<int> all(static_cast<std::size_t>(assets));
    std::iota(all.begin(), all.end(), 0);
    std::vector<int> support;
    support.reserve(static_cast<std::size_t>(alt.sparsity));
    std::sample(all.begin(), all.end(), std::back_inserter(support), alt.sparsity, rng);

    const double a = std::sqrt(alt.c_m * std::log(static_cast<double>(assets)) /
                               (static_cast<double>(alt.sparsity) * periods));
    std::uniform_real_distribution<double> frequency(std::numbers::pi / 2.0, std::numbers::pi);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    Matrix alpha = Matrix::Zero(periods, assets);
    Vector g(periods);
    for (int i : support) {
        const double w = frequency(rng);
        const double theta = phase(rng);
        for (int t = 0; t < periods; ++t) {
            g(t) = std::numbers::sqrt2 * std::cos(w * (t + 1) / periods + theta);
        }
        g.array() -= g.mean();
        const double sd = std::sqrt(g.squaredNorm() / periods);
        if (sd > 0.0) g /= sd;
        alpha.col(i) = (a + 0.35 * std::abs(a) * g.array()).matrix();
    }
    return alpha;
}

void ExperimentPlan::validate() const {
    if (periods < 20) throw ConfigError("plan '" + name + "': T must be >= 20");
    if (assets < 1) throw ConfigError("plan '" + name + "': N must be >= 1");
    if (replications < 1) throw ConfigError("plan '" + name + "': replications must be >= 1");
    if (bootstrap < 2) throw ConfigError("plan '" + name + "': bootstrap replications must be >= 2");
    spline.validate();
    const int d = example == Example::kOne ? 1 : 3;
    if (periods <= (d + 1) * spline.basis_dim()) {
        throw ConfigError("plan '" + name + "': T must exceed (d+1)L");
    }
    if (block_length && (*block_length < 2 || *block_length > periods)) {
        throw ConfigError("plan '" + name + "': block length must lie in [2, T]");
    }
    if (bandwidth && (*bandwidth < 1 || *bandwidth >= periods)) {
        throw ConfigError("plan '" + name + "': bandwidth must lie in [1, T)");
    }
    if (alternative) {
        if (alternative->sparsity < 1 || alternative->sparsity > assets) {
            throw ConfigError("plan '" + name + "': sparsity must lie in [1, N]");
        }
        if (!(alternative->c_m > 0.0)) throw ConfigError("plan '" + name + "': c_M must be positive");
    }
}

SimulatedPanel simulate_panel(const ExperimentPlan& plan, const ErrorGenerator& errors,
                              std::uint64_t rep) {
    plan.validate();
    if (errors.params().assets != plan.assets) {
        throw DimensionError("simulate_panel: error generator built for a different N");
    }
    const int T = plan.periods;
    const int total = T + kBurnIn;

    Rng factor_rng = derive_stream(plan.seed, rep, kFactorStream);
    Rng error_rng = derive_stream(plan.seed, rep, kErrorStream);

    SimulatedPanel out;
    out.factors = gen_factors(example_factor_params(plan.example), total, factor_rng, plan.garch_shock);
    const Matrix e = errors.generate(total, error_rng).bottomRows(T);
    const Matrix beta = beta_paths(plan.example, T);
    const Vector systematic = beta.cwiseProduct(out.factors.values).rowwise().sum();

    if (plan.alternative) {
        Rng alpha_rng = derive_stream(plan.seed, rep, kAlphaStream);
        out.alpha = gen_alpha(*plan.alternative, T, plan.assets, alpha_rng);
    } else {
        out.alpha = Matrix::Zero(T, plan.assets);
    }
    out.panel.returns = (e + out.alpha).colwise() + systematic;
    out.panel.assets.reserve(static_cast<std::size_t>(plan.assets));
    for (int i = 0; i < plan.assets; ++i) out.panel.assets.push_back("a" + std::to_string(i + 1));
    return out;
}

SimulatedPanel simulate_panel(const ExperimentPlan& plan, std::uint64_t rep) {
    ErrorParams params;
    params.assets = plan.assets;
    params.dependence = plan.dependence;
    params.innovation = plan.innovation;
    return simulate_panel(plan, ErrorGenerator(params), rep);
}

}  // namespace alphatest::dgp
