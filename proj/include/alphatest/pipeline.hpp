#pragma once

#include "alphatest/block_length.hpp"
#include "alphatest/spline.hpp"
#include "alphatest/types.hpp"

#include <cstdint>
#include <iterator>
#include <optional>
#include <vector>

#include <json.hpp>

namespace alphatest::pipeline {

/// Settings shared by every caller that runs the test battery on one panel.
struct SuiteOptions {
    spline::SplineConfig spline{4, 1};
    std::optional<int> block_length;  // empty = data-driven selection
    std::optional<int> bandwidth;     // empty = default bandwidth for T
    int bootstrap = 500;
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<TestName> tests{std::begin(kAllTests), std::end(kAllTests)};
    blocklen::PwsdSettings pwsd{};
};

struct SuiteReport {
    std::vector<TestOutcome> outcomes;  // in the order of SuiteOptions::tests
    int periods = 0;
    int assets = 0;
    int factors = 0;
    int basis_dim = 0;
    int block_length = 0;
    int bandwidth = 0;
    std::optional<blocklen::BlockLengthReport> block_report;  // set when selected from data
    double condition_number = 0.0;

    [[nodiscard]] const TestOutcome* find(TestName name) const;
};

/// Sieve fit, block-length and bandwidth choice, then the requested tests.
/// `factors` is T x d.
[[nodiscard]] SuiteReport run_suite(const Matrix& returns, const Matrix& factors,
                                    const SuiteOptions& options);

[[nodiscard]] nlohmann::ordered_json to_json(const TestOutcome& outcome);
[[nodiscard]] nlohmann::ordered_json to_json(const SuiteReport& report);
[[nodiscard]] nlohmann::ordered_json to_json(const blocklen::BlockLengthReport& report);

}  // namespace alphatest::pipeline
