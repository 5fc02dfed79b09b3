#include "alphatest/block_length.hpp"

#include "alphatest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace alphatest::blocklen {

namespace {

// Trapezoidal flat-top taper: 1 on [0, 1/2], linear down to 0 at 1.
double flat_top(double s) {
    const double a = std::abs(s);
    if (a < 0.5) return 1.0;
    if (a <= 1.0) return 2.0 * (1.0 - a);
    return 0.0;
}

int isqrt(int n) {
    int r = static_cast<int>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

double pwsd_per_series(std::span<const double> series, const PwsdSettings& settings) {
    const int n = static_cast<int>(series.size());
    if (n < 20) throw DomainError("block length selection needs T >= 20, got " + std::to_string(n));

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= n;
    std::vector<double> x(series.begin(), series.end());
    double scale = 0.0;
    for (double& v : x) {
        v -= mean;
        scale = std::max(scale, std::abs(v));
    }
    if (!(scale > 1e-12 * std::max(1.0, std::abs(mean)))) {
        throw DegenerateError("block length selection: series is constant");
    }

    const double log10n = std::log10(static_cast<double>(n));
    const int k_run = std::max(5, static_cast<int>(std::ceil(std::sqrt(log10n))));
    const int m_max = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + k_run;
    const int max_lag = std::min(m_max, n - 1);

    // Autocovariances with divisor n.
    std::vector<double> acov(static_cast<std::size_t>(max_lag + 1), 0.0);
    for (int k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (int t = k; t < n; ++t) acc += x[static_cast<std::size_t>(t)] * x[static_cast<std::size_t>(t - k)];
        acov[static_cast<std::size_t>(k)] = acc / n;
    }
    const double band = settings.band_constant * std::sqrt(log10n / n);
    auto insignificant = [&](int k) {
        return std::abs(acov[static_cast<std::size_t>(k)] / acov[0]) < band;
    };

    int m_hat = 0;
    for (int j = 1; j + k_run - 1 <= max_lag && m_hat == 0; ++j) {
        bool run = true;
        for (int k = j; k < j + k_run && run; ++k) run = insignificant(k);
        if (run) m_hat = j;
    }
    if (m_hat == 0) {
        for (int k = max_lag; k >= 1; --k) {
            if (!insignificant(k)) {
                m_hat = k;
                break;
            }
        }
        if (m_hat == 0) m_hat = 1;
    }
    const int window = std::min(2 * m_hat, max_lag);

    double g_hat = 0.0;
    double spectrum0 = acov[0];
    for (int k = 1; k <= window; ++k) {
        const double w = flat_top(static_cast<double>(k) / window);
        g_hat += 2.0 * w * k * acov[static_cast<std::size_t>(k)];
        spectrum0 += 2.0 * w * acov[static_cast<std::size_t>(k)];
    }
    const double d_circ = 4.0 / 3.0 * spectrum0 * spectrum0;
    const double upper = static_cast<double>(m_max);

    double b = d_circ > 0.0 ? std::cbrt(2.0 * g_hat * g_hat / d_circ) * std::cbrt(static_cast<double>(n))
                            : upper;
    if (!std::isfinite(b)) b = upper;
    return std::clamp(b, 1.0, upper);
}

int block_length_rule(std::vector<double> recommendations, int periods) {
    if (recommendations.empty()) throw DomainError("block_length_rule: no recommendations");
    if (periods < 1) throw DomainError("block_length_rule: sample size must be positive");
    const auto mid = recommendations.begin() + static_cast<std::ptrdiff_t>((recommendations.size() - 1) / 2);
    std::nth_element(recommendations.begin(), mid, recommendations.end());
    const double median = *mid;
    const int cap = isqrt(periods);
    const int scaled = static_cast<int>(std::ceil(1.5 * median));
    return std::max(2, std::min(cap, scaled));
}

BlockLengthReport select_block_length(const Matrix& residuals, const PwsdSettings& settings) {
    const int T = static_cast<int>(residuals.rows());
    if (residuals.cols() < 1) throw DomainError("select_block_length: no series");
    BlockLengthReport report;
    report.cap = std::max(2, isqrt(T));
    report.per_series.assign(static_cast<std::size_t>(residuals.cols()),
                             std::numeric_limits<double>::quiet_NaN());
    std::vector<double> accepted;
    accepted.reserve(report.per_series.size());
    for (Eigen::Index i = 0; i < residuals.cols(); ++i) {
        const Vector col = residuals.col(i);
        try {
            const double b = pwsd_per_series(
                std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), settings);
            report.per_series[static_cast<std::size_t>(i)] = b;
            accepted.push_back(b);
        } catch (const DegenerateError&) {
            ++report.skipped;
        } catch (const DomainError&) {
            ++report.skipped;
        }
    }
    if (accepted.empty()) {
        throw DomainError("select_block_length: every series was rejected by the selector");
    }
    std::vector<double> sorted = accepted;
    std::sort(sorted.begin(), sorted.end());
    report.median = sorted[(sorted.size() - 1) / 2];
    report.selected = block_length_rule(std::move(accepted), T);
    return report;
}

}  // namespace alphatest::blocklen
