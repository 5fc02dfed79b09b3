#include "alphatest/classical_tests.hpp"
#include "alphatest/distributions.hpp"
#include "alphatest/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace alphatest;

namespace {

projection::SieveFit random_fit(int T, int N, int d, std::uint64_t seed, spline::SplineConfig cfg = {4, 1}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Matrix f(T, d), r(T, N);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < d; ++j) f(t, j) = 0.3 + nd(rng);
        for (int i = 0; i < N; ++i) r(t, i) = nd(rng);
    }
    return projection::fit_sieve(r, spline::build_design(spline::build_basis(T, cfg), f));
}

}  // namespace

TEST_CASE("trace estimator: displayed formula") {
    CHECK(classical::trace_sigma2_hat(Matrix::Zero(4, 4), 100, 5, 1) == 0.0);
    const double expected = 100.0 * 100.0 / (109.0 * 90.0) * (10.0 - 100.0 / 90.0);
    CHECK(classical::trace_sigma2_hat(Matrix::Identity(10, 10), 100, 5, 1) == doctest::Approx(expected).epsilon(1e-14));
    CHECK_THROWS_AS((void)classical::trace_sigma2_hat(Matrix::Identity(3, 3), 10, 5, 1), DomainError);
}

TEST_CASE("trace estimator is invariant under orthogonal similarity") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    Matrix a(6, 6);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = nd(rng);
    const Matrix s = a * a.transpose();
    const Matrix q = Eigen::HouseholderQR<Matrix>(Matrix::Random(6, 6)).householderQ();
    CHECK(classical::trace_sigma2_hat(q * s * q.transpose(), 80, 5, 2) ==
          doctest::Approx(classical::trace_sigma2_hat(s, 80, 5, 2)).epsilon(1e-12));
}

TEST_CASE("sum test pieces match double loops, T=50 N=5") {
    const auto fit = random_fit(50, 5, 1, 7);
    const auto out = classical::sum_test_indep(fit);
    const double s = oracle::s_nt(fit.residuals);
    const double mu = oracle::mu_nt(fit.residuals, fit.h);
    const double sigma = oracle::sigma_nt(fit.residuals, fit.h, 5, 1);
    CHECK(out.diagnostics.at("S_NT") == doctest::Approx(s).epsilon(1e-10));
    CHECK(out.diagnostics.at("mu_NT") == doctest::Approx(mu).epsilon(1e-10));
    CHECK(out.diagnostics.at("sigma_NT") == doctest::Approx(sigma).epsilon(1e-10));
    CHECK(out.statistic == doctest::Approx((s - mu) / sigma).epsilon(1e-9));
    CHECK(out.p_value == doctest::Approx(1.0 - oracle::std_normal_cdf((s - mu) / sigma)).epsilon(1e-9));
    CHECK(out.name == TestName::kSum);
    CHECK(out.calibration == Calibration::kAnalyticNormal);
}

TEST_CASE("max test pieces match a componentwise oracle, T=50 N=5") {
    const auto fit = random_fit(50, 5, 1, 8);
    const auto out = classical::max_test_indep(fit);
    double q = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double s = oracle::sigma_ii(fit.residuals, i, 1);
        const double t2 = fit.kappa * fit.kappa * fit.delta_hat(i) * fit.delta_hat(i) / (50.0 * s);
        const double col = fit.residuals.col(i).sum();
        CHECK(t2 == doctest::Approx(col * col / (50.0 * s)).epsilon(1e-10));
        q = std::max(q, t2);
    }
    CHECK(out.statistic == doctest::Approx(q).epsilon(1e-10));
    const double x = q - 2.0 * std::log(5.0) + std::log(std::log(5.0));
    CHECK(out.p_value == doctest::Approx(1.0 - std::exp(-std::exp(-x / 2.0) / std::sqrt(std::numbers::pi))).epsilon(1e-9));
}

TEST_CASE("max test invariance to rescaling one asset") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    Matrix f(60, 1), r(60, 6);
    for (int t = 0; t < 60; ++t) {
        f(t, 0) = 0.3 + nd(rng);
        for (int i = 0; i < 6; ++i) r(t, i) = nd(rng);
    }
    const auto design = spline::build_design(spline::build_basis(60, {4, 1}), f);
    const auto a = classical::max_test_indep(projection::fit_sieve(r, design));
    r.col(2) *= 7.5;
    const auto b = classical::max_test_indep(projection::fit_sieve(r, design));
    CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-10));
    CHECK(a.diagnostics.at("argmax") == b.diagnostics.at("argmax"));
}

TEST_CASE("sum test invariant to asset relabeling") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> nd;
    Matrix f(70, 1), r(70, 8);
    for (int t = 0; t < 70; ++t) {
        f(t, 0) = nd(rng);
        for (int i = 0; i < 8; ++i) r(t, i) = nd(rng);
    }
    const auto design = spline::build_design(spline::build_basis(70, {4, 1}), f);
    const auto a = classical::sum_test_indep(projection::fit_sieve(r, design));
    Matrix perm = r;
    for (int i = 0; i < 8; ++i) perm.col(i) = r.col(7 - i);
    const auto b = classical::sum_test_indep(projection::fit_sieve(perm, design));
    CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-10));
}

TEST_CASE("degenerate inputs") {
    const auto b = spline::build_basis(30, {4, 1});
    const auto design = spline::build_design(b, Matrix(30, 0));
    const auto fit = projection::fit_sieve(Matrix::Zero(30, 4), design);
    CHECK_THROWS_AS((void)classical::sum_test_indep(fit), DegenerateError);
    CHECK_THROWS_AS((void)classical::max_test_indep(fit), DegenerateError);
    const auto two = random_fit(40, 2, 1, 3);
    CHECK_THROWS_AS((void)classical::max_test_indep(two), DomainError);
}

TEST_CASE("classical Cauchy combination") {
    const auto c = classical::cc_indep(0.5, 0.5);
    CHECK(c.statistic == doctest::Approx(0.0));
    CHECK(c.p_value == doctest::Approx(0.5));
    CHECK(classical::cc_indep(0.03, 0.03).p_value == doctest::Approx(0.03).epsilon(1e-10));
    CHECK(c.name == TestName::kCc);
    CHECK(c.calibration == Calibration::kCauchy);
    CHECK_THROWS_AS((void)classical::cc_indep(1.2, 0.5), DomainError);
}

TEST_CASE("sum test size under iid errors with an orthogonal design") {
    // 2000 replications, T = 200, N = 50, no factors so eta = 1.
    const int reps = 2000, T = 200, N = 50;
    const auto design = spline::build_design(spline::build_basis(T, {4, 1}), Matrix(T, 0));
    std::mt19937_64 rng(424242);
    std::normal_distribution<double> nd;
    int reject = 0;
    Matrix r(T, N);
    for (int k = 0; k < reps; ++k) {
        for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = nd(rng);
        reject += classical::sum_test_indep(projection::fit_sieve(r, design)).p_value < 0.05;
    }
    const double rate = static_cast<double>(reject) / reps;
    CHECK(rate >= 0.02);
    CHECK(rate <= 0.08);
}
