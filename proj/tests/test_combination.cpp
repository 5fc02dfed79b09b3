#include "alphatest/combination.hpp"
#include "alphatest/distributions.hpp"
#include "alphatest/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <array>
#include <numbers>
#include <random>

using namespace alphatest;

TEST_CASE("single p-value passes through") {
    const combination::CauchyCombine rule{{1.0}, 1e-15};
    for (double p : {0.001, 0.2, 0.5, 0.93}) {
        const std::array<double, 1> ps{p};
        CHECK(combination::combine(ps, rule).p_value == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("equal inputs return the same p-value") {
    for (double p : {1e-8, 0.01, 0.5, 0.77}) {
        const std::array<double, 2> ps{p, p};
        const auto c = combination::combine(ps);
        CHECK(c.p_value == doctest::Approx(p).epsilon(1e-10));
        CHECK(c.statistic == doctest::Approx(1.0 / std::tan(std::numbers::pi * p)).epsilon(1e-9));
    }
    const std::array<double, 2> half{0.5, 0.5};
    CHECK(combination::combine(half).statistic == doctest::Approx(0.0));
    CHECK(combination::combine(half).p_value == doctest::Approx(0.5));
}

TEST_CASE("endpoints are clamped") {
    const std::array<double, 2> ps{0.0, 0.9};
    const auto c = combination::combine(ps);
    CHECK(std::isfinite(c.statistic));
    CHECK(c.p_value > 0.0);
    CHECK(c.p_value < 1e-13);
    const std::array<double, 2> ones{1.0, 1.0};
    const auto d = combination::combine(ones);
    CHECK(d.p_value < 1.0);
    CHECK(d.p_value > 0.999);
}

TEST_CASE("symmetry and monotonicity") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double a = u(rng), b = u(rng), c = u(rng);
        const std::array<double, 2> ab{a, b}, ba{b, a}, cb{std::max(a, c), b};
        const double p_ab = combination::combine(ab).p_value;
        CHECK(p_ab == doctest::Approx(combination::combine(ba).p_value).epsilon(1e-14));
        CHECK(combination::combine(cb).p_value >= p_ab - 1e-15);
        CHECK(p_ab > 0.0);
        CHECK(p_ab < 1.0);
    }
}

TEST_CASE("combined p-value is uniform for independent uniforms") {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(100000);
    for (auto& v : p) {
        const std::array<double, 2> ps{u(rng), u(rng)};
        v = combination::combine(ps).p_value;
    }
    CHECK(oracle::ks_distance(p, [](double x) { return x; }) < 0.01);
}

TEST_CASE("combination errors") {
    const std::array<double, 3> three{0.1, 0.2, 0.3};
    CHECK_THROWS_AS((void)combination::combine(three), DimensionError);
    const std::array<double, 2> bad{-0.1, 0.2};
    CHECK_THROWS_AS((void)combination::combine(bad), DomainError);
    CHECK_THROWS_AS(combination::CauchyCombine({{0.3, 0.3}, 1e-15}).validate(), ConfigError);
    CHECK_THROWS_AS(combination::CauchyCombine({{1.5, -0.5}, 1e-15}).validate(), ConfigError);
}

TEST_CASE("distribution helpers") {
    CHECK(dist::normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(dist::normal_sf(1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(dist::normal_sf(10.0) == doctest::Approx(7.619853024160526e-24).epsilon(1e-8));
    for (double p : {0.1, 0.5, 0.9, 0.95, 0.99}) {
        CHECK(dist::gumbel_cdf(dist::gumbel_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(dist::gumbel_quantile(0.95) == doctest::Approx(4.7955).epsilon(1e-4));
    CHECK(dist::gumbel_sf(60.0) > 0.0);
    CHECK(dist::gumbel_centering(100) == doctest::Approx(2 * std::log(100.0) - std::log(std::log(100.0))));
    CHECK_THROWS_AS((void)dist::gumbel_centering(2), DomainError);
    CHECK(dist::cauchy_sf(1.0) == doctest::Approx(0.25));
    CHECK(dist::cauchy_sf(1e20) == doctest::Approx(1.0 / (std::numbers::pi * 1e20)).epsilon(1e-10));
    CHECK(dist::chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(dist::chi_square_sf(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(dist::chi_square_sf(0.0, 3) == 1.0);
}
