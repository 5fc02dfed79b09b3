#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace alphatest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// T x N excess returns, one column per asset.
struct ReturnPanel {
    Matrix returns;
    std::vector<std::string> assets;
    std::vector<std::string> dates;

    [[nodiscard]] Eigen::Index periods() const { return returns.rows(); }
    [[nodiscard]] Eigen::Index assets_count() const { return returns.cols(); }
};

/// T x d observed factors.
struct FactorSeries {
    Matrix values;
    std::vector<std::string> names;

    [[nodiscard]] Eigen::Index periods() const { return values.rows(); }
    [[nodiscard]] Eigen::Index count() const { return values.cols(); }
};

enum class TestName { kSum, kMax, kCc, kDsum, kDmax, kDcc };
enum class Calibration { kAnalyticNormal, kGumbel, kBootstrap, kCauchy };

inline constexpr TestName kAllTests[] = {TestName::kSum,  TestName::kMax,  TestName::kCc,
                                         TestName::kDsum, TestName::kDmax, TestName::kDcc};

[[nodiscard]] std::string_view to_string(TestName name);
[[nodiscard]] std::string_view to_string(Calibration calibration);
/// Parses "SUM", "dmax", ... ; throws ConfigError on unknown names.
[[nodiscard]] TestName parse_test_name(std::string_view text);

/// Result of one hypothesis test. Diagnostics hold every auxiliary quantity
/// the statistic consumed (centering, scale, block length, bandwidth, ...).
struct TestOutcome {
    TestName name{};
    double statistic = 0.0;
    double p_value = 1.0;
    Calibration calibration{};
    std::map<std::string, double> diagnostics;
};

}  // namespace alphatest
