#include "maxbv/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "maxbv/sampling.hpp"

namespace maxbv {

ConditionedSample condition_stats(const DiscretePath& path, std::size_t t_index, double eps) {
    const std::size_t n = path.steps();
    ConditionedSample c;
    c.delta = delta_stat(path, t_index);
    const auto left = running_max(path, 0, t_index);
    const auto right = running_max(path, t_index, n);
    c.left_argmax = left.argmax_index;
    c.right_argmax = right.argmax_index;
    c.max_value = std::max(left.max_value, right.max_value);
    c.sigma_index = left.max_value >= right.max_value ? left.argmax_index : right.argmax_index;
    c.top_gap = n >= 1 ? top_two_gap(path.values()) : 0.0;
    c.kernel_weight = std::abs(c.delta.delta) < eps ? 1.0 : 0.0;
    return c;
}

std::vector<double> TieStats::fractions() const {
    std::vector<double> f;
    for (auto b : below) f.push_back(static_cast<double>(b) / static_cast<double>(samples));
    return f;
}

namespace {

struct TieAcc {
    std::size_t ties = 0;
    std::vector<std::size_t> below;
    void merge(const TieAcc& o) {
        ties += o.ties;
        for (std::size_t i = 0; i < below.size(); ++i) below[i] += o.below[i];
    }
};

void check_split(const TimeGrid& grid, std::size_t t_index) {
    if (t_index == 0 || t_index >= grid.steps()) throw std::out_of_range("need 0 < t_index < n");
}

MCEstimate proportion(std::size_t hits, std::size_t total, SeedSpec seed) {
    MCEstimate e;
    e.samples = total;
    e.seed = seed;
    if (total == 0) return e;
    e.mean = static_cast<double>(hits) / static_cast<double>(total);
    e.std_error = total > 1 ? std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(total)) : 0.0;
    return e;
}

constexpr std::size_t kMinConditioned = 100;

struct SweepAcc {
    std::vector<std::size_t> cond, both, viol, atoms;
    std::vector<std::vector<std::pair<double, double>>> scatter;
    std::size_t scatter_limit = 0;
    std::size_t ladder_cond = 0;
    std::size_t ladder_atoms = 0;
    std::vector<std::size_t> ladder_hits;

    void merge(const SweepAcc& o) {
        for (std::size_t e = 0; e < cond.size(); ++e) {
            cond[e] += o.cond[e];
            both[e] += o.both[e];
            viol[e] += o.viol[e];
            atoms[e] += o.atoms[e];
            for (const auto& p : o.scatter[e]) {
                if (scatter[e].size() >= scatter_limit) break;
                scatter[e].push_back(p);
            }
        }
        ladder_cond += o.ladder_cond;
        ladder_atoms += o.ladder_atoms;
        for (std::size_t d = 0; d < ladder_hits.size(); ++d) ladder_hits[d] += o.ladder_hits[d];
    }
};

}  // namespace

TieStats unique_max_check(const TimeGrid& grid, std::size_t samples, SeedSpec seed,
                          const std::vector<double>& delta_multipliers, unsigned workers) {
    if (grid.steps() < 2) throw std::invalid_argument("unique_max_check: n must be >= 2");
    TieStats out;
    out.samples = samples;
    for (double m : delta_multipliers) out.deltas.push_back(m * std::sqrt(grid.horizon()));
    const TieAcc zero{0, std::vector<std::size_t>(out.deltas.size(), 0)};
    const auto acc = mc_reduce(samples, workers, seed, zero, [&](TieAcc& a, Rng& rng, std::size_t) {
        std::vector<double> w(grid.steps() + 1);
        fill_brownian(rng, grid, w);
        const double gap = top_two_gap(w);
        if (gap == 0.0) ++a.ties;
        for (std::size_t i = 0; i < out.deltas.size(); ++i)
            if (gap < out.deltas[i]) ++a.below[i];
        return true;
    });
    out.exact_ties = acc.ties;
    out.below = acc.below;
    return out;
}

ConcentrationSweep concentration_sweep(std::size_t t_index, const std::vector<double>& eps_ladder, double delta,
                                       double ladder_eps, const std::vector<double>& deltas, const TimeGrid& grid,
                                       std::size_t samples, SeedSpec seed, unsigned workers) {
    check_split(grid, t_index);
    for (double e : eps_ladder)
        if (!(e > 0.0)) throw std::invalid_argument("concentration_sweep: eps must be > 0");
    if (!(ladder_eps > 0.0) || !(delta > 0.0)) throw std::invalid_argument("concentration_sweep: eps, delta must be > 0");
    for (double d : deltas)
        if (!(d > 0.0)) throw std::invalid_argument("concentration_sweep: delta ladder must be > 0");

    constexpr std::size_t kScatter = 10000;
    const std::size_t ne = eps_ladder.size();
    SweepAcc zero;
    zero.cond.assign(ne, 0);
    zero.both.assign(ne, 0);
    zero.viol.assign(ne, 0);
    zero.atoms.assign(ne, 0);
    zero.scatter.assign(ne, {});
    zero.scatter_limit = kScatter;
    zero.ladder_hits.assign(deltas.size(), 0);

    const auto acc = mc_reduce(samples, workers, seed, zero, [&](SweepAcc& a, Rng& rng, std::size_t) {
        const auto path = sample_brownian(grid, rng);
        const auto c = condition_stats(path, t_index, ladder_eps);
        const double ad = std::abs(c.delta.delta);
        const double le = c.delta.left_excess, re = c.delta.right_excess;
        const bool atom = le == 0.0 && re == 0.0;
        for (std::size_t e = 0; e < ne; ++e) {
            if (!(ad < eps_ladder[e])) continue;
            if (atom) {
                ++a.atoms[e];
                continue;
            }
            ++a.cond[e];
            if (a.scatter[e].size() < kScatter) a.scatter[e].emplace_back(le, re);
            if (le > delta && re > delta) {
                ++a.both[e];
                if (!(c.left_argmax < t_index && t_index < c.right_argmax)) ++a.viol[e];
            }
        }
        if (c.kernel_weight > 0.0 && atom) {
            ++a.ladder_atoms;
        } else if (c.kernel_weight > 0.0) {
            ++a.ladder_cond;
            for (std::size_t d = 0; d < deltas.size(); ++d)
                if (le < deltas[d] || re < deltas[d]) ++a.ladder_hits[d];
        }
        return true;
    });

    ConcentrationSweep out;
    for (std::size_t e = 0; e < ne; ++e) {
        WitnessSummary w;
        w.eps = eps_ladder[e];
        w.delta = delta;
        w.samples = samples;
        w.conditioned = acc.cond[e];
        w.split_atoms = acc.atoms[e];
        w.both_excess = acc.both[e];
        w.fraction = proportion(acc.both[e], acc.cond[e], seed);
        w.separation_violations = acc.viol[e];
        w.scatter = acc.scatter[e];
        out.witnesses.push_back(std::move(w));
    }
    out.ladder.eps = ladder_eps;
    out.ladder.deltas = deltas;
    out.ladder.conditioned = acc.ladder_cond;
    out.ladder.split_atoms = acc.ladder_atoms;
    out.ladder.samples = samples;
    out.ladder.flagged = acc.ladder_cond < kMinConditioned;
    for (std::size_t d = 0; d < deltas.size(); ++d)
        out.ladder.estimates.push_back(proportion(acc.ladder_hits[d], acc.ladder_cond, seed));
    return out;
}

ExcessLadder excess_conditional(std::size_t t_index, double eps, const std::vector<double>& deltas,
                                const TimeGrid& grid, std::size_t samples, SeedSpec seed, unsigned workers) {
    return concentration_sweep(t_index, {eps}, deltas.empty() ? 1.0 : deltas.front(), eps, deltas, grid, samples,
                               seed, workers)
        .ladder;
}

WitnessSummary double_max_witness(std::size_t t_index, double eps, double delta, const TimeGrid& grid,
                                  std::size_t samples, SeedSpec seed, std::size_t scatter_limit, unsigned workers) {
    auto sweep = concentration_sweep(t_index, {eps}, delta, eps, {delta}, grid, samples, seed, workers);
    auto w = std::move(sweep.witnesses.front());
    if (w.scatter.size() > scatter_limit) w.scatter.resize(scatter_limit);
    return w;
}

DeltaDensityEstimate delta_density(const TimeGrid& grid, std::size_t t_index, const KernelConfig& kcfg,
                                   std::size_t samples, SeedSpec seed, unsigned workers) {
    check_split(grid, t_index);
    DeltaDensityEstimate out;
    out.bandwidth = kcfg.bandwidth > 0.0 ? kcfg.bandwidth : default_bandwidth(grid, t_index, samples, seed);
    struct Acc {
        Moments m;
        std::size_t hits = 0;
        void merge(const Acc& o) {
            m.merge(o.m);
            hits += o.hits;
        }
    };
    const auto acc = mc_reduce(samples, workers, seed, Acc{}, [&](Acc& a, Rng& rng, std::size_t) {
        std::vector<double> buf(grid.steps() + 1);
        fill_brownian(rng, grid, buf);
        const auto left = running_max(buf, 0, t_index), right = running_max(buf, t_index, grid.steps());
        const double k = kernel_weight(kcfg.kernel, right.max_value - left.max_value - kcfg.target, out.bandwidth);
        a.m.add(k);
        if (k > 0.0) ++a.hits;
        return true;
    });
    out.estimate = acc.m.estimate(seed);
    out.effective_samples = acc.hits;
    return out;
}

}  // namespace maxbv
