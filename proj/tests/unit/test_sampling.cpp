#include <gtest/gtest.h>

#include <cmath>

#include "maxbv/mc.hpp"
#include "maxbv/sampling.hpp"

using namespace maxbv;

TEST(Rng, DeterministicAndStreamSeparated) {
    Rng a(SeedSpec{1, 2}), b(SeedSpec{1, 2}), c(SeedSpec{1, 3});
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
    }
    EXPECT_NE(SeedSpec({1, 2}).substream(0), SeedSpec({1, 2}).substream(1));
    EXPECT_EQ(SeedSpec({4, 5}).str(), "4:5");
}

TEST(Walk, SameSeedSameWalk) {
    const auto a = sample_walk(50, SeedSpec{3, 4});
    const auto b = sample_walk(50, SeedSpec{3, 4});
    ASSERT_EQ(a.length(), 50u);
    for (std::size_t i = 0; i <= 50; ++i) EXPECT_EQ(a.partial_sums()[i], b.partial_sums()[i]);
    EXPECT_EQ(a.partial_sums()[0], 0.0);
}

TEST(Walk, IncrementMoments) {
    Moments m1, m2;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto w = sample_walk(1000, SeedSpec{11, s});
        for (double x : w.increments()) {
            m1.add(x);
            m2.add(x * x);
        }
    }
    EXPECT_LT(std::abs(m1.mean), 4 * m1.std_error());
    EXPECT_LT(std::abs(m2.mean - 1.0), 4 * m2.std_error());
}

TEST(Brownian, ScalingIsBitIdentical) {
    TimeGrid g(64, 2.5);
    const auto w = sample_walk(64, SeedSpec{8, 8});
    const auto p = sample_brownian(g, SeedSpec{8, 8});
    const double s = std::sqrt(g.dt());
    for (std::size_t i = 0; i <= 64; ++i) EXPECT_EQ(p[i], w.partial_sums()[i] * s);
}

TEST(Brownian, ReflectionPrinciple) {
    // P(M_[0,1] > 0.5) = 2 (1 - Phi(0.5)) = 0.617075 in the continuum; the
    // discrete maximum is slightly smaller.
    TimeGrid g(1000, 1.0);
    const auto est = mc_run([&](Rng& rng) { return running_max(sample_brownian(g, rng), 0, 1000).max_value > 0.5; },
                            20000, 1, SeedSpec{21, 0});
    EXPECT_LT(std::abs(est.mean - 0.6170750774519738), 3 * est.std_error + 0.02);
}

TEST(Bridge, EndsAtZeroWithBridgeCovariance) {
    const std::size_t n = 8, N = 40000;
    Moments cov;
    for (std::uint64_t s = 0; s < N; ++s) {
        const auto b = sample_bridge(n, SeedSpec{31, s});
        EXPECT_EQ(b.partial_sums()[n], 0.0);
        cov.add(b.partial_sums()[2] * b.partial_sums()[5]);
    }
    // Cov(W_j, W_k | W_n = 0) = min(j, k) - j k / n.
    EXPECT_LT(std::abs(cov.mean - (2.0 - 10.0 / 8.0)), 4 * cov.std_error());
}

TEST(McRun, WorkerCountDoesNotChangeResult) {
    TimeGrid g(100, 1.0);
    auto stat = [&](Rng& rng) { return running_max(sample_brownian(g, rng), 0, 100).max_value; };
    const auto a = mc_run(stat, 5000, 1, SeedSpec{1, 1});
    const auto b = mc_run(stat, 5000, 8, SeedSpec{1, 1});
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
    const auto s = mc_run_serial(stat, 5000, SeedSpec{1, 1});
    EXPECT_NEAR(s.mean, a.mean, 1e-12);
    EXPECT_NEAR(s.std_error, a.std_error, 1e-12);
}

TEST(McRun, ConstantStatisticHasZeroError) {
    const auto e = mc_run([](Rng&) { return 1.0; }, 1000, 2, SeedSpec{});
    EXPECT_EQ(e.mean, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_EQ(e.samples, 1000u);
}

TEST(McRun, NonFiniteReportsSampleAndSeed) {
    try {
        mc_run([](Rng&) { return std::nan(""); }, 5000, 4, SeedSpec{9, 2});
        FAIL();
    } catch (const NonFiniteSample& e) {
        EXPECT_EQ(e.sample(), 0u);
        EXPECT_EQ(e.seed(), (SeedSpec{9, 2}));
        EXPECT_NE(std::string(e.what()).find("9:2"), std::string::npos);
    }
}

TEST(McRun, ExceptionsInsideWorkersPropagate) {
    EXPECT_THROW(mc_run(
                     [](Rng&) -> double { throw std::domain_error("bad"); }, 3000, 4, SeedSpec{}),
                 std::domain_error);
}

TEST(McRun, RejectsBadArguments) {
    EXPECT_THROW(mc_run([](Rng&) { return 0.0; }, 1, 1, SeedSpec{}), std::invalid_argument);
    EXPECT_THROW(mc_run([](Rng&) { return 0.0; }, 10, 0, SeedSpec{}), std::invalid_argument);
}

TEST(McRun, VectorMatchesScalar) {
    TimeGrid g(20, 1.0);
    const auto v = mc_run_vector(
        [&](Rng& rng, std::span<double> out) {
            const auto p = sample_brownian(g, rng);
            out[0] = p[20];
            out[1] = p[20] * p[20];
        },
        2, 4000, 1, SeedSpec{6, 6});
    const auto s = mc_run([&](Rng& rng) { return sample_brownian(g, rng)[20]; }, 4000, 1, SeedSpec{6, 6});
    EXPECT_EQ(v[0].mean, s.mean);
    EXPECT_LT(std::abs(v[1].mean - 1.0), 4 * v[1].std_error);
}

TEST(Moments, MergeMatchesSequential) {
    Moments all, a, b;
    for (int i = 0; i < 100; ++i) {
        const double x = std::sin(i * 0.37) * 3 + i * 0.01;
        all.add(x);
        (i < 37 ? a : b).add(x);
    }
    a.merge(b);
    EXPECT_NEAR(a.mean, all.mean, 1e-13);
    EXPECT_NEAR(a.variance(), all.variance(), 1e-12);
}
