#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "maxbv/csv.hpp"
#include "maxbv/mc.hpp"
#include "maxbv/path_core.hpp"
#include "maxbv/sampling.hpp"

using namespace maxbv;

namespace {

DiscretePath make_path(std::vector<double> v, double horizon = 1.0) {
    TimeGrid g(v.size() - 1, horizon);
    return DiscretePath(g, std::move(v));
}

// Brute-force first argmax.
std::size_t naive_argmax(const std::vector<double>& v, std::size_t a, std::size_t b) {
    std::size_t best = a;
    for (std::size_t i = a; i <= b; ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace

TEST(TimeGrid, EndpointExact) {
    TimeGrid g(3, 0.7);
    EXPECT_EQ(g.time(0), 0.0);
    EXPECT_EQ(g.time(3), 0.7);
    EXPECT_THROW(TimeGrid(0, 1.0), std::invalid_argument);
    EXPECT_THROW(TimeGrid(4, -1.0), std::invalid_argument);
}

TEST(DiscretePath, Validates) {
    TimeGrid g(2, 1.0);
    EXPECT_THROW(DiscretePath(g, {0.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(DiscretePath(g, {0.5, 1.0, 0.0}), std::invalid_argument);
}

TEST(RunningMax, Examples) {
    const auto p = make_path({0.0, 1.0, 0.5, 1.0, -0.2});
    const auto s = running_max(p, 0, 4);
    EXPECT_EQ(s.max_value, 1.0);
    EXPECT_EQ(s.argmax_index, 1u);
    const auto r = running_max(p, 2, 4);
    EXPECT_EQ(r.argmax_index, 3u);
    EXPECT_THROW(running_max(p, 3, 2), std::out_of_range);
    EXPECT_THROW(running_max(p, 0, 5), std::out_of_range);
}

TEST(RunningMax, ExhaustiveTieBreak) {
    // Every path with steps in {-1, 0, 1} of length <= 6, all sub-ranges.
    for (std::size_t n = 1; n <= 6; ++n) {
        std::size_t count = 1;
        for (std::size_t i = 0; i < n; ++i) count *= 3;
        for (std::size_t code = 0; code < count; ++code) {
            std::vector<double> v(n + 1, 0.0);
            std::size_t c = code;
            for (std::size_t i = 1; i <= n; ++i, c /= 3) v[i] = v[i - 1] + static_cast<double>(c % 3) - 1.0;
            for (std::size_t a = 0; a <= n; ++a)
                for (std::size_t b = a; b <= n; ++b) {
                    const auto s = running_max(std::span<const double>(v), a, b);
                    ASSERT_EQ(s.argmax_index, naive_argmax(v, a, b));
                    ASSERT_EQ(s.max_value, v[naive_argmax(v, a, b)]);
                }
        }
    }
}

TEST(DeltaStat, Decomposition) {
    const auto p = make_path({0.0, 2.0, 1.0, 1.5, 0.5});
    const auto d = delta_stat(p, 2);
    EXPECT_DOUBLE_EQ(d.left_excess, 1.0);
    EXPECT_DOUBLE_EQ(d.right_excess, 0.5);
    EXPECT_DOUBLE_EQ(d.delta, -0.5);
    // Equals M_[t,T] - M_[0,t].
    EXPECT_DOUBLE_EQ(d.delta, running_max(p, 2, 4).max_value - running_max(p, 0, 2).max_value);
}

TEST(TopTwoGap, TiesAndGaps) {
    std::vector<double> a{0.0, 1.0, 0.3, 1.0};
    EXPECT_EQ(top_two_gap(a), 0.0);
    std::vector<double> b{0.0, 1.0, 0.25, 0.75};
    EXPECT_DOUBLE_EQ(top_two_gap(b), 0.25);
}

TEST(Direction, PrimitiveAndNorms) {
    TimeGrid g(4, 2.0);
    const auto h = Direction::constant(g, 1.0);
    EXPECT_DOUBLE_EQ(h.at(4), 2.0);
    EXPECT_DOUBLE_EQ(h.sup_norm(), 2.0);
    EXPECT_DOUBLE_EQ(inner_product(h, h), 2.0);
    const auto ind = Direction::indicator(g, 0.5, 1.5);
    EXPECT_DOUBLE_EQ(ind.at(1), 0.0);
    EXPECT_DOUBLE_EQ(ind.at(3), 1.0);
    EXPECT_DOUBLE_EQ(ind.at(4), 1.0);
}

TEST(Bump, LinearityAndInvolution) {
    TimeGrid g(16, 1.0);
    const auto p = sample_brownian(g, SeedSpec{5, 1});
    const auto h = Direction::from_function(g, [](double t) { return std::cos(3.0 * t); });
    const auto up = bump(p, h, 0.25);
    const auto back = bump(up, h, -0.25);
    const auto twice = bump(bump(p, h, 0.125), h, 0.125);
    for (std::size_t i = 0; i <= 16; ++i) {
        EXPECT_NEAR(back[i], p[i], 1e-15);
        EXPECT_NEAR(twice[i], up[i], 1e-15);
        EXPECT_NEAR(up[i] - p[i], 0.25 * h.at(i), 1e-15);
    }
}

TEST(WienerIntegral, LeftEndpointSum) {
    const auto p = make_path({0.0, 1.0, -1.0}, 2.0);
    Direction h(p.grid(), {2.0, 3.0});
    EXPECT_DOUBLE_EQ(wiener_integral(h, p), 2.0 * 1.0 + 3.0 * -2.0);
}

TEST(Cylindrical, DerivativesMatchFiniteDifferences) {
    TimeGrid g(12, 1.0);
    const auto p = sample_brownian(g, SeedSpec{9, 0});
    const auto h = Direction::from_function(g, [](double t) { return 1.0 + t; });
    const auto k = Direction::from_function(g, [](double t) { return std::sin(4.0 * t); });
    const double e = 1e-4;
    for (const auto& f : cylindrical_catalog(g)) {
        const double fd = (f.value(bump(p, h, e)) - f.value(bump(p, h, -e))) / (2 * e);
        EXPECT_NEAR(f.derivative(p, h), fd, 1e-6) << f.id();
        const double fd2 = (f.derivative(bump(p, k, e), h) - f.derivative(bump(p, k, -e), h)) / (2 * e);
        EXPECT_NEAR(f.second_derivative(p, k, h), fd2, 1e-6) << f.id();
        EXPECT_NEAR(f.second_derivative(p, k, h), f.second_derivative(p, h, k), 1e-12) << f.id();
    }
}

TEST(Cylindrical, CatalogIdsAreDistinct) {
    TimeGrid g(100, 1.0);
    const auto cat = cylindrical_catalog(g);
    EXPECT_EQ(cat.size(), 6u);
    for (std::size_t i = 0; i < cat.size(); ++i)
        for (std::size_t j = i + 1; j < cat.size(); ++j) EXPECT_NE(cat[i].id(), cat[j].id());
}

TEST(Adjoint, DualityWithTerminalValue) {
    // E[g d_h W_T] = -E[W_T d*_h g] since d*_h is minus the adjoint of d_h.
    TimeGrid g(32, 1.0);
    const auto h = Direction::from_function(g, [](double t) { return 1.0 - t; });
    for (const auto& f : cylindrical_catalog(g)) {
        const auto est = mc_run(
            [&](Rng& rng) {
                const auto p = sample_brownian(g, rng);
                return f.value(p) * h.at(32) + p[32] * adjoint_apply(f, h, p);
            },
            100000, 1, SeedSpec{77, 3});
        EXPECT_LT(std::abs(est.mean), 4.0 * est.std_error + 1e-12) << f.id();
    }
}

TEST(Csv, PathRoundTrip) {
    const auto p = make_path({0.0, 0.1, -0.3}, 2.0);
    std::ostringstream os;
    write_csv(os, p);
    EXPECT_EQ(os.str(), "index,time,value\r\n0,0,0\r\n1,1,0.1\r\n2,2,-0.3\r\n");
}

TEST(Csv, QuotingAndSplit) {
    EXPECT_EQ(csv_quote("plain"), "plain");
    EXPECT_EQ(csv_quote("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    const auto f = csv_split("x,\"a,b\",\"q\"\"q\",");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[1], "a,b");
    EXPECT_EQ(f[2], "q\"q");
    EXPECT_EQ(f[3], "");
    EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Direction, Catalog) {
    const TimeGrid g(8, 2.0);
    const auto d = direction_catalog(g);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_DOUBLE_EQ(d[0].at(8), 2.0);
    EXPECT_DOUBLE_EQ(d[1].at(2), 0.0);
    EXPECT_DOUBLE_EQ(d[1].at(8), 1.0);
    EXPECT_NEAR(d[2].at(8), 0.0, 1e-15);
    for (const auto& h : d) EXPECT_EQ(h.grid(), g);
}
