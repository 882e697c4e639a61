#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxbv/rng.hpp"

namespace maxbv {

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    SeedSpec seed;
};

/// Running mean / centred second moment (Welford, Chan merge).
struct Moments {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(count + o.count);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.count) / n;
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
        count += o.count;
    }

    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double std_error() const {
        return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
    }
    MCEstimate estimate(SeedSpec seed) const { return {mean, std_error(), count, seed}; }
};

/// Fixed number of statistics accumulated on common samples.
struct MomentVector {
    std::vector<Moments> m;

    explicit MomentVector(std::size_t k = 0) : m(k) {}
    void merge(const MomentVector& o) {
        if (m.empty()) m.resize(o.m.size());
        for (std::size_t i = 0; i < o.m.size(); ++i) m[i].merge(o.m[i]);
    }
};

/// Thrown when a statistic produces a non-finite value.
class NonFiniteSample : public std::runtime_error {
public:
    NonFiniteSample(SeedSpec seed, std::size_t sample)
        : std::runtime_error("non-finite statistic at sample " + std::to_string(sample) +
                             " (seed " + seed.str() + ", substream " +
                             seed.substream(sample).str() + ")"),
          seed_(seed), sample_(sample) {}

    SeedSpec seed() const { return seed_; }
    std::size_t sample() const { return sample_; }

private:
    SeedSpec seed_;
    std::size_t sample_;
};

/// Samples are grouped into fixed blocks; the block layout never depends on
/// the worker count, and blocks are merged in index order.
inline constexpr std::size_t kMcBlock = 2048;

void validate_mc_args(std::size_t samples, unsigned workers);

/// Deterministic parallel reduction. `body(acc, rng, i)` processes sample i
/// using the stream seed.substream(i) and must throw NonFiniteSample (or
/// return false) on bad values. `Acc` needs a `merge(const Acc&)`.
template <class Acc, class Body>
Acc mc_reduce(std::size_t samples, unsigned workers, SeedSpec seed, const Acc& zero, Body&& body) {
    validate_mc_args(samples, workers);
    const std::size_t blocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<Acc> partial(blocks, zero);
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::size_t first_bad = kNone;
    std::exception_ptr error;

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = b * kMcBlock;
        const std::size_t hi = std::min(samples, lo + kMcBlock);
        for (std::size_t i = lo; i < hi; ++i) {
            std::exception_ptr e;
            bool ok = false;
            try {
                Rng rng(seed.substream(i));
                ok = body(partial[b], rng, i);
            } catch (...) {
                e = std::current_exception();
            }
            if (!ok) {
                // Keep the lowest failing sample so the report is schedule-independent.
#pragma omp critical(maxbv_mc_bad)
                if (i < first_bad) {
                    first_bad = i;
                    error = e;
                }
                break;
            }
        }
    }
    if (first_bad != kNone) {
        if (error) std::rethrow_exception(error);
        throw NonFiniteSample(seed, first_bad);
    }

    Acc result = zero;
    for (const Acc& p : partial) result.merge(p);
    return result;
}

/// Serial reference: one accumulator, samples in order, no blocking.
template <class Acc, class Body>
Acc mc_reduce_serial(std::size_t samples, SeedSpec seed, const Acc& zero, Body&& body) {
    validate_mc_args(samples, 1);
    Acc acc = zero;
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng(seed.substream(i));
        if (!body(acc, rng, i)) throw NonFiniteSample(seed, i);
    }
    return acc;
}

using McStatistic = std::function<double(Rng&)>;

/// Mean and standard error of `statistic` over `samples` independent draws.
MCEstimate mc_run(const McStatistic& statistic, std::size_t samples, unsigned workers, SeedSpec seed);
MCEstimate mc_run_serial(const McStatistic& statistic, std::size_t samples, SeedSpec seed);

/// Several statistics evaluated on the same draw; `statistic` writes k values.
using McVectorStatistic = std::function<void(Rng&, std::span<double>)>;
std::vector<MCEstimate> mc_run_vector(const McVectorStatistic& statistic, std::size_t k,
                                      std::size_t samples, unsigned workers, SeedSpec seed);

/// Standard error of a difference of two estimates, treating them as independent.
inline double combined_std_error(const MCEstimate& a, const MCEstimate& b) {
    return std::hypot(a.std_error, b.std_error);
}

}  // namespace maxbv
