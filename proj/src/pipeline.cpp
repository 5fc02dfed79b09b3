#include "alphatest/pipeline.hpp"

#include "alphatest/classical_tests.hpp"
#include "alphatest/dependent_tests.hpp"
#include "alphatest/errors.hpp"
#include "alphatest/projection.hpp"

#include <algorithm>
#include <cmath>

namespace alphatest::pipeline {

namespace {

bool wants(const SuiteOptions& options, TestName name) {
    return std::find(options.tests.begin(), options.tests.end(), name) != options.tests.end();
}

// JSON has no NaN or infinity; emit null instead.
nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

const TestOutcome* SuiteReport::find(TestName name) const {
    for (const auto& o : outcomes) {
        if (o.name == name) return &o;
    }
    return nullptr;
}

SuiteReport run_suite(const Matrix& returns, const Matrix& factors, const SuiteOptions& options) {
    if (options.tests.empty()) throw ConfigError("no tests requested");
    options.spline.validate();
    const int T = static_cast<int>(returns.rows());

    const bool need_sum = wants(options, TestName::kSum) || wants(options, TestName::kCc);
    const bool need_max = wants(options, TestName::kMax) || wants(options, TestName::kCc);
    const bool need_dsum = wants(options, TestName::kDsum) || wants(options, TestName::kDcc);
    const bool need_dmax = wants(options, TestName::kDmax) || wants(options, TestName::kDcc);
    const bool need_bootstrap = need_dsum || need_dmax;

    const auto basis = spline::build_basis(T, options.spline);
    const auto design = spline::build_design(basis, factors);
    projection::FitOptions fit_options;
    fit_options.with_covariance = need_sum;
    const auto fit = projection::fit_sieve(returns, design, fit_options);

    SuiteReport report;
    report.periods = fit.periods;
    report.assets = fit.assets;
    report.factors = fit.factors;
    report.basis_dim = fit.basis_dim;
    report.condition_number = fit.condition_number;

    if (options.block_length) {
        report.block_length = *options.block_length;
    } else if (need_bootstrap) {
        report.block_report = blocklen::select_block_length(fit.residuals, options.pwsd);
        report.block_length = report.block_report->selected;
    }
    report.bandwidth = options.bandwidth ? *options.bandwidth : dependent::default_bandwidth(T);

    std::optional<TestOutcome> sum, max, dsum, dmax;
    if (need_sum) sum = classical::sum_test_indep(fit);
    if (need_max) max = classical::max_test_indep(fit);
    if (need_bootstrap) {
        dependent::BootstrapPlan plan;
        plan.block_length = report.block_length;
        plan.replications = options.bootstrap;
        plan.seed = options.seed;
        plan.threads = options.threads;
        const dependent::LrvConfig lrv{report.bandwidth};
        if (need_dsum && need_dmax) {
            auto both = dependent::run_dependent_tests(fit, lrv, plan);
            dsum = std::move(both.dsum);
            dmax = std::move(both.dmax);
        } else if (need_dsum) {
            dsum = dependent::dsum_test(fit, plan);
        } else {
            dmax = dependent::dmax_test(fit, lrv, plan, dependent::MaxCalibration::kBootstrap);
        }
    }

    for (TestName name : options.tests) {
        switch (name) {
            case TestName::kSum: report.outcomes.push_back(*sum); break;
            case TestName::kMax: report.outcomes.push_back(*max); break;
            case TestName::kCc: report.outcomes.push_back(classical::cc_indep(sum->p_value, max->p_value)); break;
            case TestName::kDsum: report.outcomes.push_back(*dsum); break;
            case TestName::kDmax: report.outcomes.push_back(*dmax); break;
            case TestName::kDcc: report.outcomes.push_back(dependent::dcc_test(dsum->p_value, dmax->p_value)); break;
        }
    }
    return report;
}

nlohmann::ordered_json to_json(const TestOutcome& outcome) {
    nlohmann::ordered_json j;
    j["test"] = to_string(outcome.name);
    j["statistic"] = number(outcome.statistic);
    j["p_value"] = number(outcome.p_value);
    j["calibration"] = to_string(outcome.calibration);
    nlohmann::ordered_json diag = nlohmann::ordered_json::object();
    for (const auto& [key, value] : outcome.diagnostics) diag[key] = number(value);
    j["diagnostics"] = std::move(diag);
    return j;
}

nlohmann::ordered_json to_json(const blocklen::BlockLengthReport& report) {
    nlohmann::ordered_json j;
    j["selected"] = report.selected;
    j["floor"] = report.floor;
    j["cap"] = report.cap;
    j["median"] = number(report.median);
    j["skipped"] = report.skipped;
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (double b : report.per_series) per.push_back(number(b));
    j["per_series"] = std::move(per);
    return j;
}

nlohmann::ordered_json to_json(const SuiteReport& report) {
    nlohmann::ordered_json j;
    j["periods"] = report.periods;
    j["assets"] = report.assets;
    j["factors"] = report.factors;
    j["basis_dim"] = report.basis_dim;
    j["block_length"] = report.block_length;
    j["block_length_source"] = report.block_report ? "selected" : "override";
    j["bandwidth"] = report.bandwidth;
    j["condition_number"] = number(report.condition_number);
    if (report.block_report) j["block_length_report"] = to_json(*report.block_report);
    nlohmann::ordered_json tests = nlohmann::ordered_json::array();
    for (const auto& o : report.outcomes) tests.push_back(to_json(o));
    j["tests"] = std::move(tests);
    return j;
}

}  // namespace alphatest::pipeline
