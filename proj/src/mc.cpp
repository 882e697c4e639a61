#include "maxbv/mc.hpp"

#include <span>

namespace maxbv {

void validate_mc_args(std::size_t samples, unsigned workers) {
    if (samples < 2) throw std::invalid_argument("mc: need at least 2 samples");
    if (workers < 1) throw std::invalid_argument("mc: need at least 1 worker");
}

namespace {

struct ScalarBody {
    const McStatistic& f;
    bool operator()(Moments& acc, Rng& rng, std::size_t) const {
        const double x = f(rng);
        if (!std::isfinite(x)) return false;
        acc.add(x);
        return true;
    }
};

}  // namespace

MCEstimate mc_run(const McStatistic& statistic, std::size_t samples, unsigned workers, SeedSpec seed) {
    return mc_reduce(samples, workers, seed, Moments{}, ScalarBody{statistic}).estimate(seed);
}

MCEstimate mc_run_serial(const McStatistic& statistic, std::size_t samples, SeedSpec seed) {
    return mc_reduce_serial(samples, seed, Moments{}, ScalarBody{statistic}).estimate(seed);
}

std::vector<MCEstimate> mc_run_vector(const McVectorStatistic& statistic, std::size_t k,
                                      std::size_t samples, unsigned workers, SeedSpec seed) {
    const auto acc = mc_reduce(samples, workers, seed, MomentVector(k),
                               [&](MomentVector& a, Rng& rng, std::size_t) {
                                   double buf[16];
                                   std::vector<double> heap;
                                   std::span<double> out(buf, k);
                                   if (k > 16) {
                                       heap.resize(k);
                                       out = heap;
                                   }
                                   statistic(rng, out);
                                   for (std::size_t j = 0; j < k; ++j) {
                                       if (!std::isfinite(out[j])) return false;
                                       a.m[j].add(out[j]);
                                   }
                                   return true;
                               });
    std::vector<MCEstimate> out;
    for (const auto& m : acc.m) out.push_back(m.estimate(seed));
    return out;
}

}  // namespace maxbv
