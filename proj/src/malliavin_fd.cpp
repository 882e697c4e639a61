#include "maxbv/malliavin_fd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "maxbv/sampling.hpp"

namespace maxbv {

namespace functionals {

PathFunctional terminal_value() {
    return [](const DiscretePath& p) { return p[p.steps()]; };
}

PathFunctional running_maximum() {
    return [](const DiscretePath& p) { return running_max(p, 0, p.steps()).max_value; };
}

PathFunctional argmax_time() {
    return [](const DiscretePath& p) { return p.grid().time(running_max(p, 0, p.steps()).argmax_index); };
}

PathFunctional constant(double c) {
    return [c](const DiscretePath&) { return c; };
}

}  // namespace functionals

FDConfig FDConfig::first_order(double horizon) { return {1e-5 * std::sqrt(horizon), FdScheme::central, 1e-6}; }

FDConfig FDConfig::second_order(double horizon) {
    return {0x1.0p-10 * std::sqrt(horizon), FdScheme::central, 0.0};
}

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw std::domain_error(std::string(what) + ": functional returned a non-finite value");
    return v;
}

void require_eps(const FDConfig& cfg) {
    if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) throw std::invalid_argument("FDConfig: eps must be > 0");
}

}  // namespace

double fd_directional(const PathFunctional& f, const DiscretePath& path, const Direction& h,
                      const FDConfig& cfg) {
    require_eps(cfg);
    const double up = checked(f(bump(path, h, cfg.eps)), "fd_directional");
    const double down = checked(f(bump(path, h, -cfg.eps)), "fd_directional");
    return (up - down) / (2.0 * cfg.eps);
}

double fd_second(const PathFunctional& f, const DiscretePath& path, const Direction& h, const Direction& k,
                 const FDConfig& cfg) {
    require_eps(cfg);
    const double e = cfg.eps;
    const auto hp = bump(path, h, e);
    const auto hm = bump(path, h, -e);
    const double pp = checked(f(bump(hp, k, e)), "fd_second");
    const double pm = checked(f(bump(hp, k, -e)), "fd_second");
    const double mp = checked(f(bump(hm, k, e)), "fd_second");
    const double mm = checked(f(bump(hm, k, -e)), "fd_second");
    return (pp - pm - mp + mm) / (4.0 * e * e);
}

double tie_gap_threshold(const FDConfig& cfg, double bump_sup_norm) { return 10.0 * cfg.eps * bump_sup_norm; }

double second_difference_gap_threshold(const FDConfig& cfg, const Direction& h, const Direction& k) {
    return 2.0 * cfg.eps * (h.sup_norm() + k.sup_norm());
}

namespace {

struct GradAcc {
    std::size_t evaluated = 0, excluded = 0, passed = 0;
    double max_err = 0.0;
    void merge(const GradAcc& o) {
        evaluated += o.evaluated;
        excluded += o.excluded;
        passed += o.passed;
        max_err = std::max(max_err, o.max_err);
    }
};

struct ZeroAcc {
    std::size_t evaluated = 0, excluded = 0, zero = 0;
    void merge(const ZeroAcc& o) {
        evaluated += o.evaluated;
        excluded += o.excluded;
        zero += o.zero;
    }
};

}  // namespace

GradMaxCheck verify_grad_max(const TimeGrid& grid, const Direction& h, std::size_t samples, SeedSpec seed,
                             const FDConfig& cfg, unsigned workers) {
    require_eps(cfg);
    const double threshold = tie_gap_threshold(cfg, h.sup_norm());
    const auto M = functionals::running_maximum();
    const auto acc = mc_reduce(samples, workers, seed, GradAcc{}, [&](GradAcc& a, Rng& rng, std::size_t) {
        const auto path = sample_brownian(grid, rng);
        if (top_two_gap(path.values()) <= threshold) {
            ++a.excluded;
            return true;
        }
        const double fd = fd_directional(M, path, h, cfg);
        const double exact = h.at(running_max(path, 0, grid.steps()).argmax_index);
        const double err = std::abs(fd - exact);
        if (!std::isfinite(err)) return false;
        ++a.evaluated;
        if (err <= cfg.tolerance) ++a.passed;
        a.max_err = std::max(a.max_err, err);
        return true;
    });
    return {samples, acc.evaluated, acc.excluded, acc.passed, acc.max_err};
}

ZeroCheck verify_second_difference_zero(const TimeGrid& grid, const Direction& h, const Direction& k,
                                        std::size_t samples, SeedSpec seed, const FDConfig& cfg, double quantum,
                                        unsigned workers) {
    require_eps(cfg);
    const double threshold = second_difference_gap_threshold(cfg, h, k);
    const auto M = functionals::running_maximum();
    const auto acc = mc_reduce(samples, workers, seed, ZeroAcc{}, [&](ZeroAcc& a, Rng& rng, std::size_t) {
        std::vector<double> v(grid.steps() + 1);
        fill_brownian(rng, grid, v);
        if (quantum > 0.0)
            for (double& x : v) x = std::round(x / quantum) * quantum;
        const DiscretePath path(grid, std::move(v));
        if (top_two_gap(path.values()) <= threshold) {
            ++a.excluded;
            return true;
        }
        ++a.evaluated;
        if (fd_second(M, path, h, k, cfg) == 0.0) ++a.zero;
        return true;
    });
    return {samples, acc.evaluated, acc.excluded, acc.zero};
}

DiscretePath tied_peak_path() {
    return DiscretePath(TimeGrid(8, 1.0), {0.0, 0.5, 1.0, 0.25, 1.0, 0.5, -0.25, 0.0, 0.125});
}

Direction tied_peak_direction() {
    const TimeGrid grid(8, 1.0);
    std::vector<double> d(8, 0.0);
    d[2] = d[3] = 4.0;
    return Direction(grid, std::move(d));
}

double skorokhod_second_adjoint(const CylindricalFunction& g, const Direction& k, const Direction& h,
                                const DiscretePath& path) {
    const double gv = g.value(path);
    const double ih = wiener_integral(h, path);
    const double ik = wiener_integral(k, path);
    const double dh = g.derivative(path, h);
    const double dk = g.derivative(path, k);
    const double dkh = g.second_derivative(path, k, h);
    return dkh - dk * ih - gv * inner_product(k, h) - ik * (dh - gv * ih);
}

MCEstimate d2m_weak_estimator(const CylindricalFunction& g, const Direction& k, const Direction& h,
                              const TimeGrid& grid, std::size_t samples, SeedSpec seed, unsigned workers) {
    if (!(k.grid() == grid) || !(h.grid() == grid)) throw std::invalid_argument("d2m_weak_estimator: grid mismatch");
    return mc_run(
        [&](Rng& rng) {
            const auto path = sample_brownian(grid, rng);
            return running_max(path, 0, grid.steps()).max_value * skorokhod_second_adjoint(g, k, h, path);
        },
        samples, workers, seed);
}

double kernel_weight(KernelKind kind, double x, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("kernel_weight: bandwidth must be > 0");
    const double u = x / bandwidth;
    switch (kind) {
        case KernelKind::triangular: {
            const double a = 1.0 - std::abs(u);
            return a > 0.0 ? a / bandwidth : 0.0;
        }
        case KernelKind::gaussian:
            return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * bandwidth);
    }
    return 0.0;
}

double default_bandwidth(const TimeGrid& grid, std::size_t t_index, std::size_t samples, SeedSpec seed) {
    constexpr std::size_t kPilot = 4096;
    const SeedSpec pilot{seed.master_seed, mix64(seed.stream_index ^ 0x70696c6f74ULL)};
    const auto spread = mc_run_serial(
        [&](Rng& rng) { return delta_stat(sample_brownian(grid, rng), t_index).delta; }, kPilot, pilot);
    return std::pow(static_cast<double>(samples), -0.2) * std::sqrt(spread.std_error * spread.std_error * kPilot);
}

namespace {

constexpr std::size_t kMinEffective = 100;

struct ChainAcc {
    Moments full, half;
    std::size_t effective = 0;
    void merge(const ChainAcc& o) {
        full.merge(o.full);
        half.merge(o.half);
        effective += o.effective;
    }
};

ChainMaxEstimate finish(const ChainAcc& acc, double b, SeedSpec seed) {
    ChainMaxEstimate out;
    out.estimate = acc.full.estimate(seed);
    out.half_bandwidth = acc.half.estimate(seed);
    out.bandwidth = b;
    out.bias_diagnostic = std::abs(out.estimate.mean - out.half_bandwidth.mean);
    out.effective_samples = acc.effective;
    out.flagged = acc.effective < kMinEffective;
    return out;
}

void check_bandwidth(double b) {
    if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("KernelConfig: bandwidth must be > 0");
}

/// Prefix maxima over [0..j] and suffix maxima over [j..n], both with first attainment.
struct SplitMaxima {
    std::vector<double> left_max, right_max;
    std::vector<std::size_t> left_arg, right_arg;

    explicit SplitMaxima(std::span<const double> w) {
        const std::size_t m = w.size();
        left_max.resize(m);
        left_arg.resize(m);
        right_max.resize(m);
        right_arg.resize(m);
        left_max[0] = w[0];
        left_arg[0] = 0;
        for (std::size_t j = 1; j < m; ++j) {
            const bool up = w[j] > left_max[j - 1];
            left_max[j] = up ? w[j] : left_max[j - 1];
            left_arg[j] = up ? j : left_arg[j - 1];
        }
        right_max[m - 1] = w[m - 1];
        right_arg[m - 1] = m - 1;
        for (std::size_t j = m - 1; j-- > 0;) {
            const bool up = w[j] >= right_max[j + 1];
            right_max[j] = up ? w[j] : right_max[j + 1];
            right_arg[j] = up ? j : right_arg[j + 1];
        }
    }
};

struct IntegratedChain {
    double full = 0.0, half = 0.0;
    bool touched = false;
};

/// sum_j h'_j dt K_b(X_j - target) (k(sigma_R^j) - k(sigma_L^j)), times g outside.
IntegratedChain integrated_chain(const SplitMaxima& s, const Direction& k, const Direction& h,
                                 const KernelConfig& kcfg, double b) {
    IntegratedChain out;
    const auto hd = h.density();
    const double dt = h.grid().dt();
    for (std::size_t j = 0; j < hd.size(); ++j) {
        if (hd[j] == 0.0) continue;
        const double x = s.right_max[j + 1] - s.left_max[j] - kcfg.target;
        const double wb = kernel_weight(kcfg.kernel, x, b);
        const double wh = kernel_weight(kcfg.kernel, x, 0.5 * b);
        if (wb == 0.0 && wh == 0.0) continue;
        const double dk = k.at(s.right_arg[j + 1]) - k.at(s.left_arg[j]);
        out.full += hd[j] * dt * wb * dk;
        out.half += hd[j] * dt * wh * dk;
        if (std::abs(x) < b) out.touched = true;
    }
    return out;
}

}  // namespace

ChainMaxEstimate chain_max_estimator(const CylindricalFunction& g, const Direction& h, std::size_t t_index,
                                     const TimeGrid& grid, const KernelConfig& kcfg, std::size_t samples,
                                     SeedSpec seed, unsigned workers) {
    if (t_index == 0 || t_index >= grid.steps())
        throw std::out_of_range("chain_max_estimator: need 0 < t_index < n");
    if (!(h.grid() == grid)) throw std::invalid_argument("chain_max_estimator: grid mismatch");
    const double b = kcfg.bandwidth > 0.0 ? kcfg.bandwidth : default_bandwidth(grid, t_index, samples, seed);
    check_bandwidth(b);
    const std::size_t n = grid.steps();
    const auto acc = mc_reduce(samples, workers, seed, ChainAcc{}, [&](ChainAcc& a, Rng& rng, std::size_t) {
        const auto path = sample_brownian(grid, rng);
        const auto left = running_max(path, 0, t_index);
        const auto right = running_max(path, t_index, n);
        const double x = (right.max_value - left.max_value) - kcfg.target;
        const double core = g.value(path) * (h.at(right.argmax_index) - h.at(left.argmax_index));
        const double vb = core * kernel_weight(kcfg.kernel, x, b);
        const double vh = core * kernel_weight(kcfg.kernel, x, 0.5 * b);
        if (!std::isfinite(vb) || !std::isfinite(vh)) return false;
        a.full.add(vb);
        a.half.add(vh);
        if (std::abs(x) < b) ++a.effective;
        return true;
    });
    return finish(acc, b, seed);
}

ChainMaxEstimate chain_max_integrated(const CylindricalFunction& g, const Direction& k, const Direction& h,
                                      const TimeGrid& grid, const KernelConfig& kcfg, std::size_t samples,
                                      SeedSpec seed, unsigned workers) {
    if (!(k.grid() == grid) || !(h.grid() == grid)) throw std::invalid_argument("chain_max_integrated: grid mismatch");
    const double b = kcfg.bandwidth > 0.0 ? kcfg.bandwidth
                                          : default_bandwidth(grid, std::max<std::size_t>(1, grid.steps() / 2),
                                                              samples, seed);
    check_bandwidth(b);
    const auto acc = mc_reduce(samples, workers, seed, ChainAcc{}, [&](ChainAcc& a, Rng& rng, std::size_t) {
        const auto path = sample_brownian(grid, rng);
        const SplitMaxima s(path.values());
        const auto c = integrated_chain(s, k, h, kcfg, b);
        const double gv = g.value(path);
        if (!std::isfinite(gv * c.full) || !std::isfinite(gv * c.half)) return false;
        a.full.add(gv * c.full);
        a.half.add(gv * c.half);
        if (c.touched) ++a.effective;
        return true;
    });
    return finish(acc, b, seed);
}

std::vector<CrossCheckRow> d2m_cross_check(const std::vector<CylindricalFunction>& gs, const Direction& k,
                                           const Direction& h, const TimeGrid& grid, const KernelConfig& kcfg,
                                           std::size_t samples, SeedSpec seed, unsigned workers) {
    if (!(k.grid() == grid) || !(h.grid() == grid)) throw std::invalid_argument("d2m_cross_check: grid mismatch");
    const double b = kcfg.bandwidth > 0.0 ? kcfg.bandwidth
                                          : default_bandwidth(grid, std::max<std::size_t>(1, grid.steps() / 2),
                                                              samples, seed);
    check_bandwidth(b);
    const std::size_t m = gs.size();
    const auto est = mc_run_vector(
        [&](Rng& rng, std::span<double> out) {
            const auto path = sample_brownian(grid, rng);
            const SplitMaxima s(path.values());
            const double M = s.left_max.back();
            const auto c = integrated_chain(s, k, h, kcfg, b);
            for (std::size_t i = 0; i < m; ++i) {
                const double gv = gs[i].value(path);
                out[3 * i] = M * skorokhod_second_adjoint(gs[i], k, h, path);
                out[3 * i + 1] = gv * c.full;
                out[3 * i + 2] = gv * c.half;
            }
        },
        3 * m, samples, workers, seed);
    std::vector<CrossCheckRow> rows;
    for (std::size_t i = 0; i < m; ++i) rows.push_back({gs[i].id(), est[3 * i], est[3 * i + 1], est[3 * i + 2], b});
    return rows;
}

SigmaCheck sigma_functional(const DiscretePath& path) {
    const auto& grid = path.grid();
    const auto top = running_max(path, 0, path.steps());
    SigmaCheck out;
    out.sigma = grid.time(top.argmax_index);
    std::size_t before = 0;
    for (std::size_t i = 0; i < path.steps(); ++i)
        if (out.sigma > grid.time(i)) ++before;
    out.riemann_sigma = static_cast<double>(before) * grid.dt();
    out.consistent = std::abs(out.sigma - out.riemann_sigma) <= grid.dt() * (1.0 + 1e-12);
    return out;
}

ZeroCheck verify_sigma_fd(const TimeGrid& grid, const Direction& h, std::size_t samples, SeedSpec seed,
                          const FDConfig& cfg, unsigned workers) {
    require_eps(cfg);
    const double threshold = tie_gap_threshold(cfg, h.sup_norm());
    const auto sigma = functionals::argmax_time();
    const auto acc = mc_reduce(samples, workers, seed, ZeroAcc{}, [&](ZeroAcc& a, Rng& rng, std::size_t) {
        const auto path = sample_brownian(grid, rng);
        if (top_two_gap(path.values()) <= threshold) {
            ++a.excluded;
            return true;
        }
        ++a.evaluated;
        if (fd_directional(sigma, path, h, cfg) == 0.0) ++a.zero;
        return true;
    });
    return {samples, acc.evaluated, acc.excluded, acc.zero};
}

}  // namespace maxbv
