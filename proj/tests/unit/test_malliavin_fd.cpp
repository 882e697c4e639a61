#include <gtest/gtest.h>

#include <cmath>

#include "maxbv/malliavin_fd.hpp"
#include "maxbv/sampling.hpp"

using namespace maxbv;

namespace {

DiscretePath peak_path() {
    // Unique maximum 2 at index 3.
    return DiscretePath(TimeGrid(5, 1.0), {0.0, 0.5, 1.0, 2.0, 1.0, 0.5});
}

}  // namespace

TEST(FiniteDifference, TerminalValueIsLinear) {
    TimeGrid g(50, 2.0);
    const auto p = sample_brownian(g, SeedSpec{1, 0});
    const auto h = Direction::from_function(g, [](double t) { return t; });
    EXPECT_NEAR(fd_directional(functionals::terminal_value(), p, h, FDConfig::first_order(2.0)), h.at(50), 1e-9);
    EXPECT_NEAR(fd_second(functionals::terminal_value(), p, h, h, FDConfig::second_order(2.0)), 0.0, 1e-12);
}

TEST(FiniteDifference, RunningMaxPicksArgmax) {
    const auto p = peak_path();
    const auto h = Direction::from_function(p.grid(), [](double t) { return 1.0 + t; });
    EXPECT_NEAR(fd_directional(functionals::running_maximum(), p, h, FDConfig::first_order(1.0)), h.at(3), 1e-9);
    EXPECT_EQ(fd_directional(functionals::argmax_time(), p, h, FDConfig::first_order(1.0)), 0.0);
    // h is not dyadic here, so only rounding noise remains.
    EXPECT_NEAR(fd_second(functionals::running_maximum(), p, h, h, FDConfig::second_order(1.0)), 0.0, 1e-6);
}

TEST(FiniteDifference, RejectsBadEps) {
    const auto p = peak_path();
    const auto h = Direction::constant(p.grid(), 1.0);
    FDConfig cfg;
    cfg.eps = 0.0;
    EXPECT_THROW(fd_directional(functionals::running_maximum(), p, h, cfg), std::invalid_argument);
    EXPECT_THROW(fd_directional(functionals::constant(std::nan("")), p, h, FDConfig{}), std::domain_error);
}

TEST(TiedPeak, SecondDifferenceGrowsLikeInverseEps) {
    const auto p = tied_peak_path();
    const auto h = tied_peak_direction();
    EXPECT_EQ(running_max(p, 0, 8).max_value, 1.0);
    EXPECT_EQ(top_two_gap(p.values()), 0.0);
    EXPECT_EQ(h.at(2), 0.0);
    EXPECT_EQ(h.at(4), 1.0);
    double prev = 0.0;
    for (int j = 0; j < 3; ++j) {
        FDConfig cfg = FDConfig::second_order(1.0);
        cfg.eps = std::ldexp(1.0, -10 - j);
        const double v = fd_second(functionals::running_maximum(), p, h, h, cfg);
        EXPECT_EQ(v, 0.5 / cfg.eps);
        if (j) EXPECT_EQ(v / prev, 2.0);
        prev = v;
    }
}

TEST(GradMax, HoldsOnSampledPaths) {
    TimeGrid g(200, 1.0);
    const auto h = Direction::from_function(g, [](double t) { return std::cos(t); });
    const auto r = verify_grad_max(g, h, 300, SeedSpec{5, 5}, FDConfig::first_order(1.0));
    EXPECT_EQ(r.samples, 300u);
    EXPECT_EQ(r.evaluated + r.excluded, 300u);
    EXPECT_GE(r.fraction(), 0.99);
}

TEST(SecondDifference, ExactZeroOnDyadicGrid) {
    TimeGrid g(1024, 1.0);
    const auto h = Direction::constant(g, 1.0);
    const auto k = Direction::indicator(g, 0.25, 0.75);
    const auto r = verify_second_difference_zero(g, h, k, 200, SeedSpec{6, 0}, FDConfig::second_order(1.0));
    EXPECT_GE(r.fraction(), 0.99);
    EXPECT_EQ(r.evaluated + r.excluded, 200u);
}

TEST(SecondAdjoint, ConstantFunction) {
    TimeGrid g(16, 1.0);
    const auto p = sample_brownian(g, SeedSpec{3, 1});
    const auto h = Direction::from_function(g, [](double t) { return t; });
    const auto k = Direction::from_function(g, [](double t) { return 1.0 - 2.0 * t; });
    const auto one = CylindricalFunction::constant();
    const double expected = wiener_integral(k, p) * wiener_integral(h, p) - inner_product(k, h);
    EXPECT_NEAR(skorokhod_second_adjoint(one, k, h, p), expected, 1e-13);
}

TEST(SecondAdjoint, SymmetricInDirections) {
    TimeGrid g(16, 1.0);
    const auto p = sample_brownian(g, SeedSpec{3, 2});
    const auto h = Direction::from_function(g, [](double t) { return t * t; });
    const auto k = Direction::from_function(g, [](double t) { return std::exp(-t); });
    for (const auto& f : cylindrical_catalog(g))
        EXPECT_NEAR(skorokhod_second_adjoint(f, k, h, p), skorokhod_second_adjoint(f, h, k, p), 1e-12) << f.id();
}

TEST(SecondAdjoint, MeanZero) {
    TimeGrid g(32, 1.0);
    const auto h = Direction::constant(g, 1.0);
    const auto k = Direction::indicator(g, 0.0, 0.5);
    for (const auto& f : cylindrical_catalog(g)) {
        const auto e = mc_run([&](Rng& rng) { return skorokhod_second_adjoint(f, k, h, sample_brownian(g, rng)); },
                              50000, 1, SeedSpec{7, 1});
        EXPECT_LT(std::abs(e.mean), 4 * e.std_error + 1e-12) << f.id();
    }
}

TEST(Kernel, Normalised) {
    for (auto kind : {KernelKind::triangular, KernelKind::gaussian}) {
        double s = 0.0;
        for (int i = -40000; i <= 40000; ++i) s += kernel_weight(kind, i * 1e-4, 0.5) * 1e-4;
        EXPECT_NEAR(s, 1.0, 1e-6);
    }
    EXPECT_EQ(kernel_weight(KernelKind::triangular, 0.6, 0.5), 0.0);
    EXPECT_THROW(kernel_weight(KernelKind::gaussian, 0.0, 0.0), std::invalid_argument);
}

TEST(ChainMax, AgreesWithWeakEstimator) {
    TimeGrid g(64, 1.0);
    const auto h = Direction::constant(g, 1.0);
    const auto k = Direction::indicator(g, 0.25, 1.0);
    KernelConfig kc;
    kc.kernel = KernelKind::gaussian;
    const auto rows = d2m_cross_check({CylindricalFunction::constant()}, k, h, g, kc, 100000, SeedSpec{8, 0});
    ASSERT_EQ(rows.size(), 1u);
    const auto& r = rows[0];
    EXPECT_GT(r.bandwidth, 0.0);
    EXPECT_LT(std::abs(r.weak.mean - r.chain.mean), 4 * combined_std_error(r.weak, r.chain) + r.bias_diagnostic());
    // Same estimator through the stand-alone entry point.
    const auto c = chain_max_integrated(CylindricalFunction::constant(), k, h, g, kc, 100000, SeedSpec{8, 0});
    EXPECT_NEAR(c.estimate.mean, r.chain.mean, 1e-12);
    EXPECT_FALSE(c.flagged);
}

TEST(ChainMax, PointwiseEstimatorFlagsThinWindows) {
    TimeGrid g(64, 1.0);
    const auto h = Direction::constant(g, 1.0);
    KernelConfig kc;
    kc.bandwidth = 1e-9;
    const auto c = chain_max_estimator(CylindricalFunction::constant(), h, 32, g, kc, 2000, SeedSpec{8, 1});
    EXPECT_TRUE(c.flagged);
    EXPECT_THROW(chain_max_estimator(CylindricalFunction::constant(), h, 0, g, kc, 2000, SeedSpec{}),
                 std::out_of_range);
}

TEST(Sigma, FunctionalAndFd) {
    TimeGrid g(100, 1.0);
    for (std::uint64_t s = 0; s < 20; ++s) EXPECT_TRUE(sigma_functional(sample_brownian(g, SeedSpec{9, s})).consistent);
    const auto r = verify_sigma_fd(g, Direction::constant(g, 1.0), 200, SeedSpec{9, 99}, FDConfig::first_order(1.0));
    EXPECT_GE(r.fraction(), 0.99);
}

TEST(Duality, GradientOfMaxAgainstAdjoint) {
    // E[g d_h M] = -E[M (d_h g - g I(h))] with d_h M = h(sigma).
    const TimeGrid grid(100, 1.0);
    const auto g = cylindrical_catalog(grid)[1];
    const auto h = direction_catalog(grid)[1];
    const auto e = mc_run(
        [&](Rng& rng) {
            const auto p = sample_brownian(grid, rng);
            const auto top = running_max(p, 0, grid.steps());
            return g.value(p) * h.at(top.argmax_index) + top.max_value * adjoint_apply(g, h, p);
        },
        40000, 1, SeedSpec{12, 3});
    EXPECT_NEAR(e.mean, 0.0, 4 * e.std_error);
    EXPECT_GT(e.std_error, 0.0);
}
