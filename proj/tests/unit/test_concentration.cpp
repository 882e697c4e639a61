#include <gtest/gtest.h>

#include <cmath>

#include "maxbv/concentration.hpp"
#include "maxbv/density_tv.hpp"
#include "maxbv/fluctuation.hpp"
#include "maxbv/sampling.hpp"

using namespace maxbv;

TEST(ConditionStats, Consistent) {
    const DiscretePath p(TimeGrid(6, 1.0), {0.0, 1.0, 0.2, 0.1, 0.9, 0.95, 0.3});
    const auto c = condition_stats(p, 3, 0.2);
    EXPECT_EQ(c.left_argmax, 1u);
    EXPECT_EQ(c.right_argmax, 5u);
    EXPECT_EQ(c.sigma_index, 1u);
    EXPECT_NEAR(c.delta.delta, -0.05, 1e-15);
    EXPECT_NEAR(c.top_gap, 0.05, 1e-15);
    EXPECT_EQ(c.kernel_weight, 1.0);
    EXPECT_EQ(condition_stats(p, 3, 0.01).kernel_weight, 0.0);
}

TEST(UniqueMax, NoTiesAndMonotoneProfile) {
    const auto t = unique_max_check(TimeGrid(500, 1.0), 5000, SeedSpec{1, 1});
    EXPECT_EQ(t.exact_ties, 0u);
    const auto f = t.fractions();
    ASSERT_EQ(f.size(), 4u);
    for (std::size_t i = 1; i < f.size(); ++i) EXPECT_LE(f[i], f[i - 1]);
    EXPECT_LT(f.back(), 0.01);
}

TEST(Sweep, TrendsAndSeparation) {
    const TimeGrid g(200, 1.0);
    const auto s =
        concentration_sweep(100, {0.2, 0.1, 0.05}, 0.05, 0.1, {0.4, 0.2, 0.1}, g, 40000, SeedSpec{2, 2});
    ASSERT_EQ(s.witnesses.size(), 3u);
    for (const auto& w : s.witnesses) {
        EXPECT_EQ(w.separation_violations, 0u);
        EXPECT_LE(w.scatter.size(), 10000u);
        EXPECT_LE(w.both_excess, w.conditioned);
    }
    EXPECT_GE(s.witnesses[0].conditioned, s.witnesses[1].conditioned);
    EXPECT_FALSE(s.ladder.flagged);
    for (std::size_t i = 1; i < s.ladder.estimates.size(); ++i)
        EXPECT_LT(s.ladder.estimates[i].mean, s.ladder.estimates[i - 1].mean);
}

TEST(Sweep, WrappersMatchSweep) {
    const TimeGrid g(100, 1.0);
    const auto full = concentration_sweep(50, {0.1}, 0.05, 0.1, {0.2, 0.1}, g, 10000, SeedSpec{3, 3});
    const auto l = excess_conditional(50, 0.1, {0.2, 0.1}, g, 10000, SeedSpec{3, 3});
    EXPECT_EQ(l.estimates[1].mean, full.ladder.estimates[1].mean);
    const auto w = double_max_witness(50, 0.1, 0.05, g, 10000, SeedSpec{3, 3}, 5);
    EXPECT_EQ(w.both_excess, full.witnesses[0].both_excess);
    EXPECT_EQ(w.scatter.size(), 5u);
}

TEST(Sweep, WorkerCountInvariant) {
    const TimeGrid g(100, 1.0);
    const auto a = concentration_sweep(50, {0.1}, 0.05, 0.1, {0.1}, g, 9000, SeedSpec{4, 4}, 1);
    const auto b = concentration_sweep(50, {0.1}, 0.05, 0.1, {0.1}, g, 9000, SeedSpec{4, 4}, 8);
    EXPECT_EQ(a.witnesses[0].scatter, b.witnesses[0].scatter);
    EXPECT_EQ(a.ladder.estimates[0].mean, b.ladder.estimates[0].mean);
}

TEST(Sweep, RejectsBadSplit) {
    EXPECT_THROW(excess_conditional(0, 0.1, {0.1}, TimeGrid(10, 1.0), 100, SeedSpec{}), std::out_of_range);
}

TEST(Sweep, SplitAtomsMatchExactProbability) {
    // W_t is the global maximum iff the reversed left walk and the right walk
    // both stay <= 0: probability gamma(A_j) gamma(A_{n-j}).
    const TimeGrid g(10, 1.0);
    const std::size_t samples = 40000;
    const auto s = concentration_sweep(5, {0.1}, 0.01, 0.1, {0.05}, g, samples, SeedSpec{9, 2});
    const double p = halfline_prob(5) * halfline_prob(5);
    const double se = std::sqrt(p * (1 - p) / double(samples));
    EXPECT_NEAR(double(s.witnesses[0].split_atoms) / double(samples), p, 4 * se);
    EXPECT_EQ(s.ladder.split_atoms, s.witnesses[0].split_atoms);
}

TEST(DeltaDensity, NearClosedForm) {
    const TimeGrid g(500, 1.0);
    KernelConfig kc;
    const auto d = delta_density(g, 250, kc, 100000, SeedSpec{4, 4});
    EXPECT_GT(d.bandwidth, 0.0);
    EXPECT_GT(d.effective_samples, 1000u);
    EXPECT_NEAR(d.estimate.mean, lt_zero_closed_form(1.0), 4 * d.estimate.std_error + 0.03 * lt_zero_closed_form(1.0));
}
