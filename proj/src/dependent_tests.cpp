#include "alphatest/dependent_tests.hpp"

#include "alphatest/combination.hpp"
#include "alphatest/distributions.hpp"
#include "alphatest/errors.hpp"
#include "alphatest/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace alphatest::dependent {

int BootstrapPlan::block_count(int periods) const {
    return (periods + block_length - 1) / block_length;
}

void BootstrapPlan::validate(int periods) const {
    if (block_length < 2) {
        throw ConfigError("bootstrap block length must be >= 2, got " + std::to_string(block_length));
    }
    if (block_length > periods) {
        throw ConfigError("bootstrap block length " + std::to_string(block_length) +
                          " exceeds the sample size " + std::to_string(periods));
    }
    if (replications < 1) throw ConfigError("bootstrap replications must be >= 1");
}

void LrvConfig::validate(int periods) const {
    if (bandwidth < 1 || bandwidth >= periods) {
        throw ConfigError("long-run variance bandwidth must satisfy 1 <= M < T, got M = " +
                          std::to_string(bandwidth) + ", T = " + std::to_string(periods));
    }
}

std::vector<Eigen::Index> circular_block_index(int periods, int block_length, Rng& rng) {
    std::uniform_int_distribution<int> start(0, periods - 1);
    std::vector<Eigen::Index> index(static_cast<std::size_t>(periods));
    std::size_t t = 0;
    while (t < index.size()) {
        const int j = start(rng);
        for (int s = 0; s < block_length && t < index.size(); ++s, ++t) {
            index[t] = (j + s) % periods;
        }
    }
    return index;
}

Matrix circular_blocks_resample(const Matrix& x_tilde, const BootstrapPlan& plan, Rng& rng) {
    const int T = static_cast<int>(x_tilde.rows());
    plan.validate(T);
    const auto index = circular_block_index(T, plan.block_length, rng);
    Matrix out(x_tilde.rows(), x_tilde.cols());
    for (int t = 0; t < T; ++t) out.row(t) = x_tilde.row(index[static_cast<std::size_t>(t)]);
    return out;
}

double bartlett_lrv(std::span<const double> series, int bandwidth) {
    const std::size_t T = series.size();
    double sigma = 0.0;
    for (std::size_t t = 0; t < T; ++t) sigma += series[t] * series[t];
    sigma /= static_cast<double>(T);
    for (int h = 1; h < bandwidth; ++h) {
        const auto lag = static_cast<std::size_t>(h);
        double acc = 0.0;
        for (std::size_t t = lag; t < T; ++t) acc += series[t] * series[t - lag];
        const double weight = 1.0 - static_cast<double>(h) / bandwidth;
        sigma += 2.0 * weight * acc / static_cast<double>(T - lag);
    }
    return sigma;
}

double lrv_bartlett(const Vector& residuals, const Vector& eta, const LrvConfig& cfg) {
    if (residuals.size() != eta.size()) throw DimensionError("lrv_bartlett: length mismatch");
    cfg.validate(static_cast<int>(residuals.size()));
    const Vector y = residuals.cwiseProduct(eta);
    return bartlett_lrv(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                        cfg.bandwidth);
}

BootstrapDraws bootstrap_draws(const Matrix& x_tilde, const BootstrapPlan& plan,
                               const std::optional<LrvConfig>& lrv) {
    const int T = static_cast<int>(x_tilde.rows());
    const Eigen::Index N = x_tilde.cols();
    plan.validate(T);
    if (lrv) lrv->validate(T);

    const auto B = static_cast<std::size_t>(plan.replications);
    BootstrapDraws draws;
    draws.sum.assign(B, 0.0);
    if (lrv) draws.max.assign(B, 0.0);
    std::vector<long> skipped(B, 0);

    parallel_for(B, plan.threads, [&](std::size_t b) {
        Rng rng = derive_stream(plan.seed, b);
        const auto index = circular_block_index(T, plan.block_length, rng);
        std::vector<double> series(static_cast<std::size_t>(T));
        double sum_sq = 0.0;
        double max_stat = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
            const double* col = x_tilde.col(i).data();
            double mean = 0.0;
            for (int t = 0; t < T; ++t) {
                series[static_cast<std::size_t>(t)] = col[index[static_cast<std::size_t>(t)]];
                mean += series[static_cast<std::size_t>(t)];
            }
            mean /= T;
            sum_sq += mean * mean;
            if (lrv) {
                const double sigma = bartlett_lrv(series, lrv->bandwidth);
                if (sigma > 0.0) {
                    max_stat = std::max(max_stat, T * mean * mean / sigma);
                } else {
                    ++skipped[b];
                }
            }
        }
        draws.sum[b] = sum_sq;
        if (lrv) draws.max[b] = max_stat;
    });
    draws.nonpositive_lrv = std::accumulate(skipped.begin(), skipped.end(), 0L);
    return draws;
}

TestOutcome dsum_from_draws(const projection::SieveFit& fit, const BootstrapDraws& draws,
                            const BootstrapPlan& plan) {
    const std::size_t B = draws.sum.size();
    if (B < 2) throw ConfigError("DSUM needs at least 2 bootstrap replications");
    const double mean = std::accumulate(draws.sum.begin(), draws.sum.end(), 0.0) / B;
    double ss = 0.0;
    for (double v : draws.sum) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(B - 1));
    if (!(sd > 0.0)) {
        throw DegenerateError("DSUM: degenerate bootstrap distribution (zero variance of T*)");
    }
    const double t_dsum = fit.delta_hat.squaredNorm();

    TestOutcome out;
    out.name = TestName::kDsum;
    out.calibration = Calibration::kBootstrap;
    out.statistic = (t_dsum - mean) / sd;
    out.p_value = dist::normal_sf(out.statistic);
    out.diagnostics = {{"T_DSUM", t_dsum},
                       {"mu_B", mean},
                       {"sigma_B", sd},
                       {"block_length", plan.block_length},
                       {"bootstrap_replications", static_cast<double>(B)}};
    return out;
}

namespace {

struct MaxStatistic {
    double value = 0.0;
    Eigen::Index argmax = 0;
    double min_lrv = 0.0;
};

MaxStatistic max_statistic(const projection::SieveFit& fit, const LrvConfig& cfg) {
    cfg.validate(fit.periods);
    const double T = fit.periods;
    MaxStatistic out;
    out.min_lrv = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < fit.residuals.cols(); ++i) {
        const double sigma = lrv_bartlett(fit.residuals.col(i), fit.eta, cfg);
        if (!(sigma > 0.0)) {
            throw DegenerateError("DMAX: degenerate long-run variance for asset " + std::to_string(i) +
                                  " (sigma_i = " + std::to_string(sigma) + ")");
        }
        out.min_lrv = std::min(out.min_lrv, sigma);
        const double stat = T * fit.delta_hat(i) * fit.delta_hat(i) / sigma;
        if (stat > out.value) {
            out.value = stat;
            out.argmax = i;
        }
    }
    return out;
}

TestOutcome dmax_gumbel(const projection::SieveFit& fit, const LrvConfig& cfg) {
    const double centering = dist::gumbel_centering(fit.assets);
    const MaxStatistic stat = max_statistic(fit, cfg);
    TestOutcome out;
    out.name = TestName::kDmax;
    out.calibration = Calibration::kGumbel;
    out.statistic = stat.value;
    out.p_value = dist::gumbel_sf(stat.value - centering);
    out.diagnostics = {{"bandwidth", cfg.bandwidth},
                       {"gumbel_centering", centering},
                       {"argmax", static_cast<double>(stat.argmax)},
                       {"min_lrv", stat.min_lrv}};
    return out;
}

}  // namespace

TestOutcome dmax_from_draws(const projection::SieveFit& fit, const LrvConfig& cfg,
                            const BootstrapDraws& draws, const BootstrapPlan& plan) {
    if (draws.max.empty()) throw ConfigError("DMAX: bootstrap draws carry no max statistics");
    const MaxStatistic stat = max_statistic(fit, cfg);
    const auto exceed = std::count_if(draws.max.begin(), draws.max.end(),
                                      [&](double q) { return q >= stat.value; });
    const double B = static_cast<double>(draws.max.size());

    TestOutcome out;
    out.name = TestName::kDmax;
    out.calibration = Calibration::kBootstrap;
    out.statistic = stat.value;
    out.p_value = (1.0 + static_cast<double>(exceed)) / (B + 1.0);
    out.diagnostics = {{"bandwidth", cfg.bandwidth},
                       {"block_length", plan.block_length},
                       {"bootstrap_replications", B},
                       {"argmax", static_cast<double>(stat.argmax)},
                       {"min_lrv", stat.min_lrv},
                       {"bootstrap_nonpositive_lrv", static_cast<double>(draws.nonpositive_lrv)}};
    if (fit.assets >= 3) {
        out.diagnostics["p_gumbel"] = dist::gumbel_sf(stat.value - dist::gumbel_centering(fit.assets));
    }
    return out;
}

TestOutcome dsum_test(const projection::SieveFit& fit, const BootstrapPlan& plan) {
    if (plan.replications < 2) throw ConfigError("DSUM needs at least 2 bootstrap replications");
    const auto score = projection::score_process(fit);
    return dsum_from_draws(fit, bootstrap_draws(score.x_tilde, plan, std::nullopt), plan);
}

TestOutcome dmax_test(const projection::SieveFit& fit, const LrvConfig& cfg,
                      const BootstrapPlan& plan, MaxCalibration calibration) {
    if (calibration == MaxCalibration::kGumbel) return dmax_gumbel(fit, cfg);
    const auto score = projection::score_process(fit);
    return dmax_from_draws(fit, cfg, bootstrap_draws(score.x_tilde, plan, cfg), plan);
}

TestOutcome dcc_test(double p_dsum, double p_dmax) {
    const std::array<double, 2> p{p_dsum, p_dmax};
    const auto combined = combination::combine(p);
    TestOutcome out;
    out.name = TestName::kDcc;
    out.calibration = Calibration::kCauchy;
    out.statistic = combined.statistic;
    out.p_value = combined.p_value;
    out.diagnostics = {{"p_DSUM", p_dsum}, {"p_DMAX", p_dmax}};
    return out;
}

DependentOutcomes run_dependent_tests(const projection::SieveFit& fit, const LrvConfig& cfg,
                                      const BootstrapPlan& plan) {
    if (plan.replications < 2) throw ConfigError("DSUM needs at least 2 bootstrap replications");
    const auto score = projection::score_process(fit);
    const BootstrapDraws draws = bootstrap_draws(score.x_tilde, plan, cfg);
    DependentOutcomes out;
    out.dsum = dsum_from_draws(fit, draws, plan);
    out.dmax = dmax_from_draws(fit, cfg, draws, plan);
    out.dcc = dcc_test(out.dsum.p_value, out.dmax.p_value);
    return out;
}

int default_bandwidth(int periods) {
    if (periods < 8) throw DomainError("default_bandwidth requires T >= 8");
    // The small offset keeps exact cubes (T = 1000 -> 12) from rounding down.
    const int rule = static_cast<int>(std::floor(1.2 * std::cbrt(static_cast<double>(periods)) + 1e-9));
    return std::max(2, std::min(rule, periods / 4));
}

}  // namespace alphatest::dependent
