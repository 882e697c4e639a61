#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "maxbv/path_core.hpp"
#include "maxbv/rng.hpp"

namespace maxbv {

/// Gaussian random walk W_0 = 0, W_k = x_1 + ... + x_k.
class Walk {
public:
    explicit Walk(std::vector<double> increments);
    Walk(std::vector<double> increments, std::vector<double> partial_sums);

    std::size_t length() const { return increments_.size(); }
    std::span<const double> increments() const { return increments_; }
    std::span<const double> partial_sums() const { return sums_; }

private:
    std::vector<double> increments_;
    std::vector<double> sums_;
};

Walk sample_walk(std::size_t n, SeedSpec seed);
Walk sample_walk(std::size_t n, Rng& rng);

/// sqrt(T/n) times the partial sums of sample_walk(n, seed).
DiscretePath sample_brownian(const TimeGrid& grid, SeedSpec seed);
DiscretePath sample_brownian(const TimeGrid& grid, Rng& rng);

/// Walk conditioned on W_n = 0: increments x - mean(x) with the last partial
/// sum set to exactly 0.
Walk sample_bridge(std::size_t n, SeedSpec seed);
Walk sample_bridge(std::size_t n, Rng& rng);

/// Allocation-free variants for hot loops: fill `sums` (size n+1) in place.
void fill_walk(Rng& rng, std::span<double> sums);
void fill_brownian(Rng& rng, const TimeGrid& grid, std::span<double> values);
/// Returns |W_n| before the final renormalisation.
double fill_bridge(Rng& rng, std::span<double> sums);

}  // namespace maxbv
