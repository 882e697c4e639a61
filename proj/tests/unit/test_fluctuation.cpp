#include <gtest/gtest.h>

#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <numbers>

#include "maxbv/fluctuation.hpp"

using namespace maxbv;

namespace {

// Independent oracle: C(2n, n) / 4^n by multiplicative formula in exact rationals.
ExactRational central_binomial_ratio(std::size_t n) {
    ExactRational r = 1;
    for (std::size_t j = 1; j <= n; ++j) r *= ExactRational(2 * j - 1, 2 * j);
    return r;
}

}  // namespace

TEST(Rational, Formatting) {
    EXPECT_EQ(to_string(ExactRational(3, 8)), "3/8");
    EXPECT_EQ(to_string(ExactRational(2)), "2/1");
    EXPECT_EQ(parse_rational("6/16"), ExactRational(3, 8));
    EXPECT_EQ(parse_rational("-5"), ExactRational(-5));
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("x"), std::invalid_argument);
}

TEST(HalflineProb, SmallValues) {
    EXPECT_EQ(halfline_prob_exact(0), ExactRational(1));
    EXPECT_EQ(halfline_prob_exact(1), ExactRational(1, 2));
    EXPECT_EQ(halfline_prob_exact(2), ExactRational(3, 8));
    EXPECT_EQ(halfline_prob_exact(3), ExactRational(5, 16));
    for (std::size_t n = 0; n <= 80; ++n) EXPECT_EQ(halfline_prob_exact(n), central_binomial_ratio(n)) << n;
}

TEST(HalflineProb, DoubleAgreesAcrossTheSwitch) {
    for (std::size_t n : {1u, 10u, 63u, 64u}) {
        EXPECT_NEAR(halfline_prob(n), std::exp(log_halfline_prob(n)), 1e-13 * halfline_prob(n));
        EXPECT_EQ(halfline_prob(n), central_binomial_ratio(n).convert_to<double>());
    }
    EXPECT_NEAR(halfline_prob(65), central_binomial_ratio(65).convert_to<double>(), 1e-13);
    EXPECT_TRUE(std::isfinite(log_halfline_prob(10000000)));
}

TEST(HalflineProb, MonotoneAndAsymptotic) {
    for (std::size_t n = 1; n <= 3000; ++n) {
        ASSERT_LT(halfline_prob(n), halfline_prob(n - 1));
        const double gap = std::abs(std::sqrt(double(n)) * halfline_prob(n) - 1.0 / std::sqrt(std::numbers::pi));
        ASSERT_LT(gap, 0.13 / double(n)) << n;
    }
}

TEST(SeriesExp, ExponentialOfIdentity) {
    // exp(t) has coefficients 1/k!.
    const auto s = series_exp({0, 1}, 10);
    ExactRational f = 1;
    for (std::size_t k = 0; k <= 10; ++k) {
        if (k) f /= k;
        EXPECT_EQ(s.coefficients[k], f);
    }
    EXPECT_THROW(series_exp({1}, 3), std::invalid_argument);
}

TEST(Andersen, ExactMatchOrder64) {
    const auto c = andersen_series_check(64);
    EXPECT_TRUE(c.exact_match());
    ASSERT_EQ(c.lhs.coefficients.size(), 65u);
    for (std::size_t n = 0; n <= 64; ++n) EXPECT_EQ(c.lhs.coefficients[n], central_binomial_ratio(n));
}

TEST(Bridge, ExactStayProbability) {
    EXPECT_EQ(bridge_stay_prob_exact(1), ExactRational(1));
    EXPECT_EQ(bridge_stay_prob_exact(7), ExactRational(1, 7));
    EXPECT_THROW(bridge_stay_prob_exact(0), std::invalid_argument);
}

TEST(MonteCarlo, HalflineAndBridge) {
    const auto h = mc_halfline_prob(5, 100000, SeedSpec{10, 1});
    EXPECT_LT(std::abs(h.mean - 63.0 / 256.0), 4 * h.std_error);
    const auto b = mc_bridge_stay_prob(5, 100000, SeedSpec{10, 2});
    EXPECT_LT(std::abs(b.mean - 0.2), 4 * b.std_error);
}

TEST(ArgmaxHistogram, UniformOnCycle) {
    const auto h = bridge_argmax_histogram(6, 60000, SeedSpec{12, 0});
    ASSERT_EQ(h.counts.size(), 6u);
    EXPECT_EQ(h.ties, 0u);
    EXPECT_EQ(h.dof, 5u);
    EXPECT_GT(h.p_value, 1e-3);
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    EXPECT_EQ(total, 60000u);
}

TEST(ChiSquare, Statistic) {
    EXPECT_DOUBLE_EQ(chi_square_uniform({10, 10, 10}), 0.0);
    EXPECT_DOUBLE_EQ(chi_square_uniform({20, 0}), 20.0);
    EXPECT_NEAR(chi_square_sf(3.841458820694124, 1), 0.05, 1e-12);
}
