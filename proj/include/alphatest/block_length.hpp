#pragma once

#include "alphatest/types.hpp"

#include <span>
#include <vector>

namespace alphatest::blocklen {

/// Tuning constants of the automatic (flat-top lag window) selector.
struct PwsdSettings {
    double band_constant = 2.0;  // c in the +- c sqrt(log10 T / T) band
};

/// Politis-White automatic block length for the circular block bootstrap,
/// with the Patton-Politis-White correction of the circular constant.
///  1. Sample autocorrelations up to m_max = ceil(sqrt T) + K_T, where
///     K_T = max(5, ceil(sqrt(log10 T))).
///  2. m^ = first lag starting a run of K_T autocorrelations inside the band
///     (otherwise the largest significant lag); window M = min(2 m^, m_max).
///  3. G = sum lambda(k/M)|k|R(k), D = 4/3 (sum lambda(k/M) R(k))^2 with the
///     trapezoidal flat-top taper lambda.
///  4. b = (2 G^2 / D)^{1/3} T^{1/3}, clamped to [1, ceil(sqrt T) + K_T].
/// Throws DomainError for T < 20 and DegenerateError for a constant series.
[[nodiscard]] double pwsd_per_series(std::span<const double> series, const PwsdSettings& settings = {});

struct BlockLengthReport {
    std::vector<double> per_series;  // b_{i,Circ}; NaN for skipped series
    int selected = 2;                // l
    int cap = 2;                     // floor(sqrt T)
    int floor = 2;
    int skipped = 0;                 // series the selector rejected
    double median = 0.0;             // lower median of the accepted b's
};

/// l = max{2, min(floor(sqrt T), ceil(1.5 * median b))}, lower median for even counts.
[[nodiscard]] int block_length_rule(std::vector<double> recommendations, int periods);

/// Runs the selector on every column of the centered null residual matrix
/// and aggregates with block_length_rule. Throws DomainError when every
/// series is rejected.
[[nodiscard]] BlockLengthReport select_block_length(const Matrix& residuals,
                                                    const PwsdSettings& settings = {});

}  // namespace alphatest::blocklen
