#include "alphatest/dgp.hpp"
#include "alphatest/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace alphatest;

TEST_CASE("factor recursion moments") {
    SUBCASE("AR(1) with constant variance") {
        Rng rng = derive_stream(41, 0);
        const auto f = dgp::gen_factors({{0.0, 0.5, 1.0, 0.0, 0.0}}, 100000 + dgp::kBurnIn, rng);
        REQUIRE(f.periods() == 100000);
        const Vector x = f.values.col(0);
        const double m = x.mean();
        CHECK(std::abs(m) < 0.02);
        CHECK(std::abs((x.array() - m).square().mean() - 4.0 / 3.0) < 0.04);
    }
    SUBCASE("iid draws") {
        Rng rng = derive_stream(42, 0);
        const auto f = dgp::gen_factors({{1.5, 0.0, 2.0, 0.0, 0.0}}, 50000, rng);
        CHECK(std::abs(f.values.col(0).mean() - 1.5) < 0.03);
    }
    SUBCASE("single-factor design") {
        Rng rng = derive_stream(43, 0);
        const auto f = dgp::gen_factors(dgp::example_factor_params(dgp::Example::kOne), 100000, rng);
        CHECK(f.names == std::vector<std::string>{"f1"});
        CHECK(std::abs(f.values.col(0).mean() - 0.34) < 0.03);
    }
    SUBCASE("return shock variant stays stationary") {
        Rng rng = derive_stream(44, 0);
        const auto f = dgp::gen_factors(dgp::example_factor_params(dgp::Example::kThreeFactor), 20000,
                                        rng, dgp::GarchShock::kReturnShock);
        CHECK(f.count() == 3);
        CHECK(f.values.allFinite());
    }
    CHECK_THROWS_AS(dgp::FactorParams({0.0, 0.0, 1.0, 0.6, 0.5}).validate(), ConfigError);
    CHECK_THROWS_AS(dgp::FactorParams({0.0, 1.0, 1.0, 0.0, 0.0}).validate(), ConfigError);
}

TEST_CASE("loading curves") {
    CHECK(dgp::logistic_loading(0.2) == doctest::Approx(0.5));
    CHECK(dgp::logistic_loading(1.0) > 0.9999);
    CHECK(dgp::logistic_loading(0.0) < 0.02);
    const Matrix b = dgp::beta_paths(dgp::Example::kThreeFactor, 50);
    CHECK(b.cols() == 3);
    CHECK(b(9, 0) == doctest::Approx(0.75));
    CHECK(b(9, 1) == doctest::Approx(0.55));
    CHECK(b(9, 2) == doctest::Approx(0.6));
}

TEST_CASE("error covariance structure") {
    dgp::ErrorParams p{10};
    const Matrix s = p.sigma();
    CHECK(s(0, 0) == 1.0);
    CHECK(s(0, 1) == doctest::Approx(0.4));
    CHECK(s(0, 3) == doctest::Approx(0.4 / 9.0));
    CHECK(s(0, 9) == doctest::Approx(0.4 / 81.0));
    CHECK(dgp::ErrorParams{20}.sigma()(0, 19) == 0.0);  // |i - j| = 19 exceeds 0.9 N
    CHECK(p.lag_matrix(3).isApprox(std::exp(-6.0) * Matrix::Identity(10, 10)));

    Rng rng = derive_stream(45, 0);
    const Matrix e = dgp::gen_errors(p, 100000, rng);
    const Matrix c = oracle::covariance(e);
    CHECK((c - s).norm() < 0.1);
}

TEST_CASE("MA(2) autocovariances") {
    dgp::ErrorParams p{5, dgp::Dependence::kShort};
    const Matrix s = p.sigma(), a1 = p.lag_matrix(1), a2 = p.lag_matrix(2);
    const Matrix g0 = s + a1 * s * a1.transpose() + a2 * s * a2.transpose();
    const Matrix g1 = a1 * s + a2 * s * a1.transpose();
    Rng rng = derive_stream(46, 0);
    const Matrix e = dgp::gen_errors(p, 100000 + dgp::kBurnIn, rng).bottomRows(100000);
    const double T = 100000.0;
    const double v = e.col(0).squaredNorm() / T;
    const double c1 = e.col(0).tail(99999).dot(e.col(0).head(99999)) / T;
    CHECK(std::abs(v - g0(0, 0)) < 0.05 * g0(0, 0));
    CHECK(std::abs(c1 - g1(0, 0)) < 0.05 * g0(0, 0));
    CHECK(dgp::dependence_order(dgp::Dependence::kLong, 200) == 199);
    CHECK(dgp::dependence_order(dgp::Dependence::kShort, 200) == 2);
}

TEST_CASE("Student t innovations have unit variance") {
    Rng rng = derive_stream(47, 0);
    double ss = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = dgp::draw_innovation(dgp::Innovation::kStudentT6, rng);
        ss += x * x;
    }
    CHECK(std::abs(ss / n - 1.0) < 0.03);
}

TEST_CASE("sparse alpha") {
    Rng rng = derive_stream(48, 0);
    const int T = 120, N = 40;
    const auto alpha = dgp::gen_alpha({5, 80.0}, T, N, rng);
    const double a = std::sqrt(80.0 * std::log(40.0) / (5.0 * T));
    int support = 0;
    for (int i = 0; i < N; ++i) {
        if (alpha.col(i).isZero(0.0)) continue;
        ++support;
        const Vector col = alpha.col(i);
        CHECK(col.mean() == doctest::Approx(a).epsilon(1e-12));
        const double var = (col.array() - a).square().mean();
        CHECK(var == doctest::Approx(0.35 * 0.35 * a * a).epsilon(1e-10));
    }
    CHECK(support == 5);

    Rng dense = derive_stream(49, 0);
    const auto all = dgp::gen_alpha({N, 12.0}, T, N, dense);
    CHECK(all.colwise().mean().minCoeff() == doctest::Approx(std::sqrt(12.0 * std::log(40.0) / (N * T))));

    CHECK_THROWS_AS((void)dgp::gen_alpha({N + 1, 12.0}, T, N, rng), ConfigError);
    CHECK_THROWS_AS((void)dgp::gen_alpha({0, 12.0}, T, N, rng), ConfigError);
    CHECK(dgp::default_signal_constant(dgp::Dependence::kNone) == 12.0);
    CHECK(dgp::default_signal_constant(dgp::Dependence::kShort) == 80.0);
    CHECK(dgp::default_signal_constant(dgp::Dependence::kLong) == 90.0);
}

TEST_CASE("simulated panels") {
    dgp::ExperimentPlan plan;
    plan.name = "t";
    plan.periods = 60;
    plan.assets = 8;
    plan.dependence = dgp::Dependence::kShort;
    const auto null = dgp::simulate_panel(plan, 3);
    CHECK(null.alpha.isZero(0.0));
    CHECK(null.panel.returns.rows() == 60);
    CHECK(null.panel.assets.front() == "a1");
    CHECK(null.factors.count() == 1);

    const auto again = dgp::simulate_panel(plan, 3);
    CHECK(again.panel.returns == null.panel.returns);
    CHECK(dgp::simulate_panel(plan, 4).panel.returns != null.panel.returns);

    plan.alternative = dgp::AlphaAlternative{2, 80.0};
    const auto alt = dgp::simulate_panel(plan, 3);
    CHECK(alt.factors.values == null.factors.values);
    CHECK((alt.panel.returns - null.panel.returns).isApprox(alt.alpha, 1e-12));

    SUBCASE("returns decompose into loadings, factors and errors") {
        const auto b = dgp::beta_paths(plan.example, plan.periods);
        const Vector common = b.cwiseProduct(null.factors.values).rowwise().sum();
        Rng error_rng = derive_stream(plan.seed, 3, 2);
        const Matrix e = dgp::gen_errors({plan.assets, plan.dependence}, 60 + dgp::kBurnIn, error_rng)
                             .bottomRows(60);
        const Matrix rebuilt = e.colwise() + common;
        CHECK(rebuilt.isApprox(null.panel.returns, 1e-12));
    }
}

TEST_CASE("plan validation") {
    dgp::ExperimentPlan plan;
    plan.name = "v";
    CHECK_NOTHROW(plan.validate());
    auto bad = plan;
    bad.periods = 10;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = plan;
    bad.block_length = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = plan;
    bad.alternative = dgp::AlphaAlternative{300, 12.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = plan;
    bad.bandwidth = plan.periods;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
