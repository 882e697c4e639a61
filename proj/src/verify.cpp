#include "maxbv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "maxbv/concentration.hpp"
#include "maxbv/csv.hpp"
#include "maxbv/density_tv.hpp"
#include "maxbv/fluctuation.hpp"
#include "maxbv/gaussian_bv.hpp"
#include "maxbv/malliavin_fd.hpp"
#include "maxbv/sampling.hpp"

namespace maxbv {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

class FaultScope {
public:
    explicit FaultScope(bool on) : on_(on) {
        if (on_) set_halfline_fault(true);
    }
    ~FaultScope() {
        if (on_) set_halfline_fault(false);
    }
    FaultScope(const FaultScope&) = delete;
    FaultScope& operator=(const FaultScope&) = delete;

private:
    bool on_;
};

class Checks {
public:
    Checks(int criterion, const VerifyOptions& opt) : criterion_(criterion), opt_(opt) {}

    SeedSpec seed(std::uint64_t stream) const { return {opt_.seed, stream}; }
    unsigned workers() const { return opt_.workers; }

    void add(std::string name, double observed, double expected, double tolerance, bool passed,
             std::string detail = {}) {
        out_.push_back({criterion_, std::move(name), observed, expected, tolerance, passed, std::move(detail)});
    }
    /// |observed - expected| <= tolerance
    void near(std::string name, double observed, double expected, double tolerance, std::string detail = {}) {
        add(std::move(name), observed, expected, tolerance, std::abs(observed - expected) <= tolerance,
            std::move(detail));
    }
    /// Monte Carlo estimate within k standard errors plus slack.
    void mc(std::string name, const MCEstimate& e, double expected, double k = 3.0, double slack = 0.0) {
        near(std::move(name), e.mean, expected, k * e.std_error + slack,
             "samples=" + std::to_string(e.samples) + " seed=" + e.seed.str() +
                 " std_error=" + format_double(e.std_error));
    }

    std::vector<CheckResult> take() { return std::move(out_); }

private:
    int criterion_;
    VerifyOptions opt_;
    std::vector<CheckResult> out_;
};

std::string num(std::size_t n) { return std::to_string(n); }

// ---- shared pieces (quick and full differ only in sizes) ----

void andersen_checks(Checks& c, std::size_t order) {
    const auto a = andersen_series_check(order);
    c.add("andersen: exp series == (1-t)^(-1/2) series", a.exact_match() ? 0 : 1, 0, 0, a.exact_match(),
          "order=" + num(order));
    std::size_t mismatches = 0;
    std::string first;
    for (std::size_t n = 0; n <= order; ++n)
        if (a.lhs.coefficients[n] != halfline_prob_exact(n)) {
            if (!mismatches) first = " first n=" + num(n) + " got " + to_string(halfline_prob_exact(n));
            ++mismatches;
        }
    c.add("andersen: exp series == halfline_prob_exact", double(mismatches), 0, 0, mismatches == 0,
          "order=" + num(order) + first);
}

void bridge_stay_checks(Checks& c, const std::vector<std::size_t>& ns, std::size_t samples) {
    for (std::size_t n : ns) {
        const auto e = mc_bridge_stay_prob(n, samples, c.seed(200 + n), c.workers());
        c.mc("bridge stay probability n=" + num(n), e, 1.0 / double(n));
    }
}

void argmax_checks(Checks& c, std::size_t n, std::size_t samples) {
    const auto h = bridge_argmax_histogram(n, samples, c.seed(300), c.workers());
    c.add("bridge argmax uniform: chi-square p-value n=" + num(n), h.p_value, 1e-3, 0, h.p_value > 1e-3,
          "chi2=" + format_double(h.chi_square) + " dof=" + num(h.dof) + " samples=" + num(samples) +
              " seed=" + h.seed.str());
    c.add("bridge argmax: exact ties", double(h.ties), 0, 0, h.ties == 0);
}

void perimeter_checks(Checks& c, double eps, std::size_t tube_samples, const std::vector<std::size_t>& bridge_ns,
                      std::size_t bridge_samples) {
    const auto exact = halfspace_perimeter({{1.0}, 0.0});
    c.near("halfspace perimeter exact", exact.value, kInvSqrt2Pi, 1e-16);
    const HalfspaceSpec spec{std::vector<double>(10, 1.0), 0.0};
    const auto t = tube_perimeter(spec, eps, tube_samples, c.seed(400), c.workers());
    c.near("halfspace perimeter tube eps=" + format_double(eps), t.value, kInvSqrt2Pi, 3.0 * t.std_error + 1e-4,
           "samples=" + num(t.samples) + " std_error=" + format_double(t.std_error));
    for (std::size_t n : bridge_ns) {
        const auto r = restricted_perimeter_bridge(n, bridge_samples, c.seed(400 + n), c.workers());
        c.near("restricted perimeter bridge-MC n=" + num(n), r.value, kInvSqrt2Pi / double(n), 3.0 * r.std_error,
               "samples=" + num(r.samples) + " std_error=" + format_double(r.std_error));
    }
}

void stay_bound_checks(Checks& c) {
    std::size_t gamma_bad = 0, perimeter_bad = 0;
    for (std::size_t n = 1; n <= 64; ++n) {
        const auto g = halfline_prob_exact(n);
        if (g * g * ExactRational(n) > 1) ++gamma_bad;  // gamma(A_n) <= n^(-1/2)
        if (bridge_stay_prob_exact(n).convert_to<double>() * kInvSqrt2Pi > 1.0 / double(n)) ++perimeter_bad;
    }
    c.add("gamma(A_n) <= n^(-1/2), n <= 64", double(gamma_bad), 0, 0, gamma_bad == 0);
    c.add("|D I|(A_n) <= 1/n, n <= 64", double(perimeter_bad), 0, 0, perimeter_bad == 0);
    const auto a = asymptotic_match(1000);
    c.add("sqrt(n) gamma(A_n) vs 1/sqrt(pi) relative gap n=1000", a.relative_gap, 0, 3e-4, a.relative_gap < 3e-4);
    std::size_t not_decreasing = 0;
    for (std::size_t n = 2; n <= 1000; ++n)
        if (!(asymptotic_match(n).relative_gap < asymptotic_match(n - 1).relative_gap)) ++not_decreasing;
    c.add("asymptotic gap decreasing in n <= 1000", double(not_decreasing), 0, 0, not_decreasing == 0);
}

void grad_max_checks(Checks& c, std::size_t n, std::size_t samples) {
    const TimeGrid grid(n, 1.0);
    const auto dirs = direction_catalog(grid);
    const char* names[] = {"h'=1", "h'=1[T/4,3T/4)", "h'=cos(2 pi t/T)"};
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const auto r = verify_grad_max(grid, dirs[i], samples, c.seed(600 + i), FDConfig::first_order(1.0), c.workers());
        c.add(std::string("grad M = h(sigma) fraction, ") + names[i], r.fraction(), 0.99, 0, r.fraction() >= 0.99,
              "evaluated=" + num(r.evaluated) + " excluded=" + num(r.excluded) +
                  " max_abs_error=" + format_double(r.max_abs_error));
    }
}

void second_difference_checks(Checks& c, std::size_t samples) {
    const TimeGrid grid(1024, 1.0);
    const auto dirs = direction_catalog(grid);
    const auto cfg = FDConfig::second_order(1.0);
    const std::pair<std::size_t, std::size_t> pairs[] = {{0, 0}, {0, 1}, {1, 1}};
    for (auto [i, j] : pairs) {
        const auto r = verify_second_difference_zero(grid, dirs[i], dirs[j], samples, c.seed(700 + 3 * i + j), cfg,
                                                     0x1.0p-32, c.workers());
        c.add("second difference exactly 0 fraction, directions " + num(i) + "," + num(j), r.fraction(), 0.99, 0,
              r.fraction() >= 0.99, "evaluated=" + num(r.evaluated) + " excluded=" + num(r.excluded));
    }
    const auto path = tied_peak_path();
    const auto h = tied_peak_direction();
    double prev = 0.0;
    for (int j = 0; j < 3; ++j) {
        FDConfig e = cfg;
        e.eps = std::ldexp(cfg.eps, -j);
        const double v = std::abs(fd_second(functionals::running_maximum(), path, h, h, e));
        if (j) {
            const double ratio = v / prev;
            c.near("tied peak second difference ratio per halving #" + num(std::size_t(j)), ratio, 2.0, 0.3,
                   "eps=" + format_double(e.eps) + " value=" + format_double(v));
        }
        prev = v;
    }
}

void ibp_checks(Checks& c, std::size_t n, std::size_t samples) {
    const TimeGrid grid(n, 1.0);
    const auto dirs = direction_catalog(grid);
    const auto& h = dirs[0];
    const auto& k = dirs[1];
    std::uint64_t stream = 800;
    for (const auto& g : cylindrical_catalog(grid)) {
        const auto e = mc_run([&](Rng& rng) { return skorokhod_second_adjoint(g, k, h, sample_brownian(grid, rng)); },
                              samples, c.workers(), c.seed(stream++));
        c.mc("E[d*_k d*_h g] = 0, g=" + g.id(), e, 0.0);
    }
    const auto one = CylindricalFunction::constant();
    const auto e = mc_run(
        [&](Rng& rng) {
            const auto p = sample_brownian(grid, rng);
            return p[n / 2] * skorokhod_second_adjoint(one, k, h, p);
        },
        samples, c.workers(), c.seed(stream++));
    c.mc("E[W_t d*_k d*_h 1] = 0, t=T/2", e, 0.0);
    for (const auto& g : {one, CylindricalFunction(CylindricalFunction::Kind::point, {n / 2})}) {
        const auto kh = d2m_weak_estimator(g, k, h, grid, samples, c.seed(stream++), c.workers());
        const auto hk = d2m_weak_estimator(g, h, k, grid, samples, c.seed(stream++), c.workers());
        c.near("weak estimator symmetric in (k,h), g=" + g.id(), kh.mean - hk.mean, 0.0,
               3.0 * combined_std_error(kh, hk),
               "kh=" + format_double(kh.mean) + " hk=" + format_double(hk.mean) + " samples=" + num(samples));
    }
}

void chain_max_checks(Checks& c, std::size_t n, std::size_t samples) {
    const TimeGrid grid(n, 1.0);
    const auto dirs = direction_catalog(grid);
    KernelConfig kc;
    kc.kernel = KernelKind::triangular;
    const std::vector<CylindricalFunction> gs{CylindricalFunction::constant(),
                                              CylindricalFunction(CylindricalFunction::Kind::point, {n / 2})};
    const auto rows = d2m_cross_check(gs, dirs[1], dirs[0], grid, kc, samples, c.seed(900), c.workers());
    for (const auto& r : rows) {
        const double tol = 3.0 * combined_std_error(r.weak, r.chain) + r.bias_diagnostic();
        c.near("weak vs integrated chain-max, g=" + r.g_id, r.chain.mean, r.weak.mean, tol,
               "weak_se=" + format_double(r.weak.std_error) + " chain_se=" + format_double(r.chain.std_error) +
                   " chain_half=" + format_double(r.chain_half.mean) + " b=" + format_double(r.bandwidth) +
                   " samples=" + num(samples));
    }
}

void lt_zero_checks(Checks& c) {
    double lo = 1e300, hi = -1e300;
    for (double t : {0.25, 0.5, 0.75}) {
        const double v = lt_zero(t, 1.0).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    c.near("lt_zero(t,1) spread over t in {1/4,1/2,3/4}", hi - lo, 0.0, 1e-10);
    c.near("lt_zero(1/2,1) vs sqrt(2/(pi T))", lt_zero(0.5, 1.0).value, lt_zero_closed_form(1.0), 1e-10);
    c.near("lt_zero T=4 vs half of T=1", lt_zero(2.0, 4.0).value, 0.5 * lt_zero(0.5, 1.0).value, 1e-8);
}

void kde_check(Checks& c, std::size_t n, std::size_t samples) {
    const TimeGrid grid(n, 1.0);
    KernelConfig kc;
    kc.kernel = KernelKind::triangular;
    const auto d = delta_density(grid, n / 2, kc, samples, c.seed(1000), c.workers());
    const double ref = lt_zero(0.5, 1.0).value;
    c.near("KDE of Delta_t M at 0 / lt_zero - 1, t=T/2", d.estimate.mean / ref - 1.0, 0.0, 0.02,
           "kde=" + format_double(d.estimate.mean) + " std_error=" + format_double(d.estimate.std_error) +
               " b=" + format_double(d.bandwidth) + " n=" + num(n) + " samples=" + num(samples));
}

void tv_checks(Checks& c, const std::vector<std::size_t>& ns, std::size_t remainder_a, std::size_t remainder_b,
               std::size_t remainder_c) {
    const double limit = std::sqrt(2.0 / std::numbers::pi);
    double worst = 0.0;
    std::size_t bad = 0;
    for (std::size_t n : ns) {
        const auto r = tv_bound_discrete(n, 1.0, c.workers());
        worst = std::max(worst, r.bound);
        if (!(r.bound > 0.0) || !std::isfinite(r.bound) || r.bound > limit) ++bad;
    }
    c.add("B(n) positive and below sqrt(2/pi) for n in ladder", worst, limit, 0, bad == 0,
          "ladder " + num(ns.front()) + ".." + num(ns.back()) + " max=" + format_double(worst));
    const auto b_last = tv_bound_discrete(ns.back(), 1.0, c.workers());
    const auto b_half = tv_bound_discrete(ns.back() / 2, 1.0, c.workers());
    const double rel = std::abs(b_last.bound - b_half.bound) / b_last.bound;
    c.add("|B(n) - B(n/2)| / B(n), n=" + num(ns.back()), rel, 0, 0.01, rel < 0.01);
    const double ra = tv_bound_discrete(remainder_a, 1.0).remainder, rb = tv_bound_discrete(remainder_b, 1.0).remainder,
                 rc = tv_bound_discrete(remainder_c, 1.0).remainder;
    c.add("R(n) strictly decreasing over {" + num(remainder_a) + "," + num(remainder_b) + "," + num(remainder_c) + "}",
          rc, rb, 0, rc < rb && rb < ra,
          "R=" + format_double(ra) + "," + format_double(rb) + "," + format_double(rc));
    const auto b4 = tv_bound_discrete(ns.back(), 4.0, c.workers());
    c.add("B(n, T=4) == 2 B(n, T=1)", b4.bound, 2.0 * b_last.bound, 0, b4.bound == 2.0 * b_last.bound);
    c.near("B(n) vs sqrt(2/pi), relative, n=" + num(ns.back()), b_last.bound / limit - 1.0, 0.0, 0.02,
           "interior=" + format_double(b_last.interior) + " remainder=" + format_double(b_last.remainder));
}

std::vector<std::size_t> tv_ladder() {
    std::vector<std::size_t> ns;
    for (std::size_t n = 100; n <= 2000; n += 100) ns.push_back(n);
    return ns;
}

void limit_checks(Checks& c, std::size_t riemann_n) {
    const auto q = limit_integral();
    c.near("limit integral = 2 pi", q.value, 2.0 * std::numbers::pi, 1e-6,
           "error_estimate=" + format_double(q.error) + " converged=" + (q.converged ? "true" : "false"));
    c.add("limit integral error estimate < 1e-8", q.error, 0, 1e-8, q.converged && q.error < 1e-8);
    c.near("limit inner integral t=0.3 = pi", limit_inner_integral(0.3).value, std::numbers::pi, 1e-8);
    const double r = limit_riemann_sum(riemann_n, c.workers());
    c.near("Riemann sum / limit integral - 1, n=" + num(riemann_n), r / q.value - 1.0, 0.0, 0.05,
           "sum=" + format_double(r));
}

void concentration_checks(Checks& c, std::size_t n, std::size_t samples, bool regression) {
    const TimeGrid grid(n, 1.0);
    const std::vector<double> eps_ladder{0.4, 0.2, 0.1, 0.05, 0.02};
    const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
    const std::vector<double> eps_list = [&] {
        auto e = eps_ladder;
        e.push_back(0.01);
        return e;
    }();
    const auto s = concentration_sweep(n / 2, eps_list, 0.05, 0.01, deltas, grid, samples, c.seed(1300), c.workers());

    std::size_t not_increasing = 0, violations = 0;
    std::string series;
    for (std::size_t i = 0; i < s.witnesses.size(); ++i) {
        series += (i ? " " : "") + format_double(s.witnesses[i].fraction.mean);
        violations += s.witnesses[i].separation_violations;
        if (i && i < eps_ladder.size() && !(s.witnesses[i].fraction.mean > s.witnesses[i - 1].fraction.mean))
            ++not_increasing;
    }
    c.add("both-excess fraction increases as eps decreases (0.4..0.02)", double(not_increasing), 0, 0,
          not_increasing == 0, "fractions(eps=0.4..0.01)=" + series);
    c.add("argmax separation when both excesses > delta", double(violations), 0, 0, violations == 0);

    std::size_t not_decreasing = 0;
    series.clear();
    for (std::size_t i = 0; i < s.ladder.estimates.size(); ++i) {
        series += (i ? " " : "") + format_double(s.ladder.estimates[i].mean);
        if (i && !(s.ladder.estimates[i].mean < s.ladder.estimates[i - 1].mean)) ++not_decreasing;
    }
    c.add("excess_conditional strictly decreasing along delta ladder", double(not_decreasing), 0, 0,
          not_decreasing == 0 && !s.ladder.flagged,
          "estimates=" + series + " conditioned=" + num(s.ladder.conditioned) +
              " split_atoms=" + num(s.ladder.split_atoms));
    if (regression) {
        const auto& w = s.witnesses.back();
        // Regression floor pinned from the first full run (0.8968, std error 0.0024).
        c.add("both-excess fraction eps=0.01 delta=0.05 (regression)", w.fraction.mean, 0.89, 0,
              w.fraction.mean > 0.89, "conditioned=" + num(w.conditioned) + " split_atoms=" + num(w.split_atoms));
    }

    const auto t = unique_max_check(grid, samples, c.seed(1301), {1e-1, 1e-2, 1e-3, 1e-4}, c.workers());
    c.add("exact ties of the discrete maximum", double(t.exact_ties), 0, 0, t.exact_ties == 0);
    const auto f = t.fractions();
    std::size_t atom_like = 0;
    series.clear();
    for (std::size_t i = 0; i < f.size(); ++i) {
        series += (i ? " " : "") + format_double(f[i]);
        if (i && !(f[i] < f[i - 1])) ++atom_like;
    }
    c.add("top-two gap: fraction(G < delta/10) < fraction(G < delta)", double(atom_like), 0, 0, atom_like == 0,
          "fractions(delta=1e-1..1e-4)=" + series);
    c.add("top-two gap: fraction(G < 1e-4) small", f.back(), 0, 0.01, f.back() < 0.01);
}

}  // namespace

Preset parse_preset(const std::string& s) {
    if (s == "quick") return Preset::quick;
    if (s == "full") return Preset::full;
    throw std::invalid_argument("unknown preset '" + s + "' (expected quick or full)");
}

std::string criterion_title(int number) {
    static const char* titles[kCriterionCount] = {
        "Andersen exact identity",
        "Bridge stay probability 1/n",
        "Bridge argmax uniformity",
        "Halfspace and restricted perimeter",
        "Stay-probability bounds and asymptote",
        "Gradient identity",
        "Singularity signature",
        "Double integration by parts",
        "Chain-max cross-check",
        "Density of Delta_t M at 0",
        "TV bound",
        "Limit integral",
        "Concentration trends",
        "Reproducibility",
    };
    if (number < 1 || number > kCriterionCount) throw std::out_of_range("criterion number out of range");
    return titles[number - 1];
}

std::vector<CheckResult> run_quick(const VerifyOptions& opt) {
    FaultScope fault(opt.corrupt_halfline);
    Checks c(0, opt);
    andersen_checks(c, 64);
    bridge_stay_checks(c, {2, 5}, 20000);
    argmax_checks(c, 10, 20000);
    perimeter_checks(c, 0.05, 100000, {2, 10}, 20000);
    stay_bound_checks(c);
    grad_max_checks(c, 200, 200);
    second_difference_checks(c, 200);
    ibp_checks(c, 32, 10000);
    lt_zero_checks(c);
    tv_checks(c, tv_ladder(), 100, 1000, 2000);
    limit_checks(c, 2000);
    return c.take();
}

std::vector<CheckResult> run_criterion(int number, const VerifyOptions& opt) {
    FaultScope fault(opt.corrupt_halfline);
    Checks c(number, opt);
    switch (number) {
        case 1: andersen_checks(c, 64); break;
        case 2: bridge_stay_checks(c, {2, 5, 10, 100}, 1000000); break;
        case 3: argmax_checks(c, 20, 100000); break;
        case 4: perimeter_checks(c, 0.01, 1000000, {2, 10, 100}, 1000000); break;
        case 5: stay_bound_checks(c); break;
        case 6: grad_max_checks(c, 1000, 1000); break;
        case 7: second_difference_checks(c, 1000); break;
        case 8: ibp_checks(c, 256, 100000); break;
        case 9: chain_max_checks(c, 1000, 1000000); break;
        case 10:
            lt_zero_checks(c);
            kde_check(c, 2000, 1000000);
            break;
        case 11: tv_checks(c, tv_ladder(), 100, 1000, 2000); break;
        case 12: limit_checks(c, 2000); break;
        case 13: concentration_checks(c, 1000, 1000000, true); break;
        case 14: {
            VerifyOptions base = opt;
            base.corrupt_halfline = false;
            base.workers = 1;
            const std::string first = checks_csv(run_quick(base));
            const std::string second = checks_csv(run_quick(base));
            c.add("quick preset twice: result CSV byte-identical", first == second ? 0 : 1, 0, 0, first == second,
                  "bytes=" + num(first.size()));
            VerifyOptions wide = base;
            wide.workers = 8;
            const std::string eight = checks_csv(run_quick(wide));
            c.add("quick preset workers 1 vs 8: identical results", first == eight ? 0 : 1, 0, 0, first == eight);
            const TimeGrid grid(500, 1.0);
            const auto h = Direction::constant(grid, 1.0);
            const auto k = Direction::indicator(grid, 0.25, 0.75);
            const auto g = CylindricalFunction::constant();
            const auto a = d2m_weak_estimator(g, k, h, grid, 50000, c.seed(1400), 1);
            const auto b = d2m_weak_estimator(g, k, h, grid, 50000, c.seed(1400), 8);
            c.add("mc estimate workers 1 vs 8: identical mean and std error", a.mean, b.mean, 0,
                  a.mean == b.mean && a.std_error == b.std_error);
            break;
        }
        default: throw std::out_of_range("criterion number out of range");
    }
    return c.take();
}

std::vector<CheckResult> run_preset(Preset preset, const VerifyOptions& opt) {
    if (preset == Preset::quick) return run_quick(opt);
    std::vector<CheckResult> all;
    for (int i = 1; i <= kCriterionCount; ++i) {
        auto part = run_criterion(i, opt);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

bool all_passed(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& r) { return r.passed; });
}

void write_checks_csv(std::ostream& os, const std::vector<CheckResult>& checks) {
    CsvWriter csv(os);
    csv.row("criterion", "check", "observed", "expected", "tolerance", "passed", "detail");
    for (const auto& r : checks) csv.row(r.criterion, r.name, r.observed, r.expected, r.tolerance, r.passed, r.detail);
}

std::string checks_csv(const std::vector<CheckResult>& checks) {
    std::ostringstream os;
    write_checks_csv(os, checks);
    return os.str();
}

}  // namespace maxbv
