#include "selinf/errors.hpp"
#include "selinf/truncnorm.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace selinf;

namespace {

TruncatedGaussian tg(std::vector<Interval> region, double mu = 0.0, double sigma = 1.0) {
    return TruncatedGaussian{mu, sigma, std::move(region)};
}

}  // namespace

TEST_CASE("standard normal helpers") {
    CHECK(norm_cdf(0.0) == 0.5);
    CHECK(norm_sf(1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-12));
    CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    CHECK(std::isfinite(log_norm_sf(50.0)));
    CHECK(log_norm_sf(40.0) == doctest::Approx(oracle::log_std_mass(40.0, kInf)).epsilon(1e-10));
    CHECK(log_norm_cdf(-40.0) == doctest::Approx(log_norm_sf(40.0)));
    for (double t : {0.0, 1.0, 5.0, 30.0}) {
        CHECK(mills_ratio(t) == doctest::Approx(std::exp(oracle::log_std_mass(t, kInf) + 0.5 * t * t + oracle::kLogSqrt2Pi)));
    }
}

TEST_CASE("truncated distribution function") {
    CHECK(tn_cdf(0.0, tg({{-1, 1}})) == doctest::Approx(0.5));
    CHECK(tn_cdf(-1.0, tg({{-1, 1}})) == 0.0);
    CHECK(tn_cdf(1.0, tg({{-1, 1}})) == doctest::Approx(1.0));
    CHECK(tn_cdf(1.0, tg({{0, kInf}})) == doctest::Approx(0.6826894921370859).epsilon(1e-12));
    CHECK(tn_sf(1.0, tg({{0, kInf}})) == doctest::Approx(1.0 - 0.6826894921370859).epsilon(1e-11));
}

TEST_CASE("far tails stay accurate") {
    for (double a : {8.0, 20.0, 35.0, 200.0}) {
        const auto region = std::vector<Interval>{{a, a + 1.0}};
        const double x = a + 0.01;
        const double expect = oracle::tn_cdf(x, 0.0, 1.0, region);
        CHECK(tn_cdf(x, tg(region)) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(tn_cdf(-x, tg({{-a - 1.0, -a}})) == doctest::Approx(1.0 - expect).epsilon(1e-9));
    }
    CHECK(std::isfinite(log_interval_mass(500.0, 501.0, 0.0, 1.0)));
}

TEST_CASE("unions accumulate mass and are flat across gaps") {
    const std::vector<Interval> region = {{-2, -1}, {1, 2}};
    const TruncatedGaussian t = tg(region);
    CHECK(tn_cdf(0.0, t) == doctest::Approx(0.5));
    CHECK(tn_cdf(-0.5, t) == doctest::Approx(tn_cdf(0.5, t)));
    CHECK(tn_cdf(1.5, t) == doctest::Approx(oracle::tn_cdf(1.5, 0.0, 1.0, region)).epsilon(1e-10));
    double prev = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.05) {
        const double f = tn_cdf(x, t);
        CHECK(f >= prev - 1e-15);
        prev = f;
    }
}

TEST_CASE("a region without representable mass") {
    try {
        tn_cdf(0.0, tg({{1e6, 1e6}}));
        FAIL("expected DegenerateMass");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateMass);
    }
}

TEST_CASE("quantiles") {
    const TruncatedGaussian half = tg({{0, kInf}});
    CHECK(tn_quantile(0.0, half) == 0.0);
    CHECK(std::isinf(tn_quantile(1.0, half)));
    CHECK(tn_quantile(0.5, tg({{-2, 4}}, 1.0)) == doctest::Approx(1.0));
    const double x = tn_quantile(0.123, half);
    CHECK(std::abs(tn_cdf(x, half) - 0.123) <= 1e-9);
    const TruncatedGaussian gap = tg({{-3, -1}, {0.5, 2}}, 0.3, 0.8);
    for (double p : {0.01, 0.3, 0.6, 0.99}) CHECK(std::abs(tn_cdf(tn_quantile(p, gap), gap) - p) <= 1e-9);
}

TEST_CASE("mean solving") {
    const std::vector<Interval> line = {Interval{}};
    CHECK(tn_root_mu(0.7, 0.5, line, 1.0) == doctest::Approx(0.7));
    CHECK(tn_root_mu(0.7, norm_cdf(-1.96), line, 2.0) == doctest::Approx(0.7 + 1.96 * 2.0).epsilon(1e-9));
    const double mu = tn_root_mu(1.0, 0.5, {{0, kInf}}, 1.0);
    CHECK(mu < 1.0);
    CHECK(tn_cdf(1.0, tg({{0, kInf}}, mu)) == doctest::Approx(0.5).epsilon(1e-10));

    RootOptions tight;
    tight.max_span_sd = 1.0;
    try {
        tn_root_mu(0.0, 1e-12, line, 1.0, tight);
        FAIL("expected BracketFailure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BracketFailure);
    }
}

TEST_CASE("distribution function decreases in the mean") {
    SplitMix64 rng(1);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng);
        const double b = a + 0.1 + std::abs(u(rng));
        const double x = a + (b - a) * 0.3;
        const double mu1 = u(rng) * 3.0;
        const double mu2 = mu1 + 0.05 + std::abs(u(rng));
        CHECK(tn_cdf(x, tg({{a, b}}, mu1)) > tn_cdf(x, tg({{a, b}}, mu2)));
    }
}

TEST_CASE("pivot is uniform") {
    SplitMix64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const TruncatedGaussian t = tg({{-1.5, -0.5}, {2.0, kInf}}, 0.4, 1.3);
    std::vector<double> pivots;
    for (int i = 0; i < 5000; ++i) pivots.push_back(tn_cdf(tn_quantile(u(rng), t), t));
    CHECK(oracle::ks_uniform(pivots) < oracle::ks_critical_1pct(pivots.size()));
}
