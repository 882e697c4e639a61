#include "maxbv/sampling.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace maxbv {

SeedSpec SeedSpec::substream(std::uint64_t i) const {
    return {master_seed, mix64(stream_index ^ mix64(i + 0x632be59bd9b4e019ULL))};
}

std::string SeedSpec::str() const {
    std::ostringstream os;
    os << master_seed << ':' << stream_index;
    return os.str();
}

Rng::Rng(SeedSpec seed) {
    std::uint64_t key = mix64(mix64(seed.master_seed) ^ seed.stream_index);
    for (auto& w : s_) {
        key += 0x9e3779b97f4a7c15ULL;
        w = mix64(key);
    }
}

Walk::Walk(std::vector<double> increments) : increments_(std::move(increments)) {
    if (increments_.empty()) throw std::invalid_argument("Walk: length must be >= 1");
    sums_.assign(increments_.size() + 1, 0.0);
    for (std::size_t i = 0; i < increments_.size(); ++i) sums_[i + 1] = sums_[i] + increments_[i];
}

Walk::Walk(std::vector<double> increments, std::vector<double> partial_sums)
    : increments_(std::move(increments)), sums_(std::move(partial_sums)) {
    if (increments_.empty()) throw std::invalid_argument("Walk: length must be >= 1");
    if (sums_.size() != increments_.size() + 1 || sums_[0] != 0.0)
        throw std::invalid_argument("Walk: partial sums must have n+1 entries starting at 0");
}

void fill_walk(Rng& rng, std::span<double> sums) {
    sums[0] = 0.0;
    for (std::size_t i = 1; i < sums.size(); ++i) sums[i] = sums[i - 1] + rng.normal();
}

void fill_brownian(Rng& rng, const TimeGrid& grid, std::span<double> values) {
    fill_walk(rng, values);
    const double scale = std::sqrt(grid.dt());
    for (double& v : values) v *= scale;
}

double fill_bridge(Rng& rng, std::span<double> sums) {
    const std::size_t n = sums.size() - 1;
    // Stash the raw normals in sums[1..n] before projecting.
    double total = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        sums[i] = rng.normal();
        total += sums[i];
    }
    const double mean = total / static_cast<double>(n);
    sums[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) sums[i] = sums[i - 1] + (sums[i] - mean);
    const double residual = std::abs(sums[n]);
    sums[n] = 0.0;
    return residual;
}

Walk sample_walk(std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("sample_walk: n must be >= 1");
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal();
    return Walk(std::move(x));
}

Walk sample_walk(std::size_t n, SeedSpec seed) {
    Rng rng(seed);
    return sample_walk(n, rng);
}

DiscretePath sample_brownian(const TimeGrid& grid, Rng& rng) {
    std::vector<double> v(grid.steps() + 1);
    fill_brownian(rng, grid, v);
    return DiscretePath(grid, std::move(v));
}

DiscretePath sample_brownian(const TimeGrid& grid, SeedSpec seed) {
    Rng rng(seed);
    return sample_brownian(grid, rng);
}

Walk sample_bridge(std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("sample_bridge: n must be >= 1");
    std::vector<double> sums(n + 1);
    fill_bridge(rng, sums);
    std::vector<double> inc(n);
    for (std::size_t i = 0; i < n; ++i) inc[i] = sums[i + 1] - sums[i];
    return Walk(std::move(inc), std::move(sums));
}

Walk sample_bridge(std::size_t n, SeedSpec seed) {
    Rng rng(seed);
    return sample_bridge(n, rng);
}

}  // namespace maxbv
