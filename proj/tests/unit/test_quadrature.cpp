#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "maxbv/quadrature.hpp"

using namespace maxbv;

TEST(Quadrature, Polynomials) {
    const auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-15);
    EXPECT_TRUE(r.converged);
}

TEST(Quadrature, Oscillatory) {
    const auto r = integrate([](double x) { return std::sin(20.0 * x); }, 0.0, std::numbers::pi);
    EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(Quadrature, IntegrableSingularityConverges) {
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-9, 1e-9, 5000});
    EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Quadrature, ReversedInterval) {
    const auto r = integrate([](double x) { return x; }, 1.0, 0.0);
    EXPECT_NEAR(r.value, -0.5, 1e-15);
}

TEST(Quadrature, HalfLine) {
    const auto r = integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    const auto g = integrate_to_infinity([](double x) { return std::exp(-0.5 * x * x); }, 0.0);
    EXPECT_NEAR(g.value, std::sqrt(std::numbers::pi / 2.0), 1e-12);
}

TEST(Quadrature, ReportsNonConvergence) {
    const auto r = integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, {1e-12, 1e-12, 20});
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.intervals, 20u);
}
