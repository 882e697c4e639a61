#include "cli_ops.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cli_config.hpp"
#include "maxbv/concentration.hpp"
#include "maxbv/csv.hpp"
#include "maxbv/density_tv.hpp"
#include "maxbv/fluctuation.hpp"
#include "maxbv/gaussian_bv.hpp"
#include "maxbv/malliavin_fd.hpp"
#include "maxbv/sampling.hpp"

namespace maxbv::cli {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        out.push_back(a == std::string::npos ? "" : item.substr(a, b - a + 1));
    }
    return out;
}

double parse_real(const std::string& v, const std::string& field) {
    double out = 0.0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(field, "expected a number, got '" + v + "'");
    return out;
}

std::size_t parse_count(const std::string& v, const std::string& field) {
    std::size_t out = 0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size())
        throw ConfigError(field, "expected a non-negative integer, got '" + v + "'");
    return out;
}

void check_range(const ParamSpec& spec, double v, const std::string& field) {
    if (v < spec.min || v > spec.max)
        throw ConfigError(field, "value " + format_double(v) + " outside [" + format_double(spec.min) + ", " +
                                     format_double(spec.max) + "]");
}

// ---- parameter helpers ----

ParamSpec count(std::string key, std::string def, double lo, double hi, std::string help) {
    return {std::move(key), ParamKind::count, std::move(def), lo, hi, {}, std::move(help)};
}
ParamSpec real(std::string key, std::string def, double lo, double hi, std::string help) {
    return {std::move(key), ParamKind::real, std::move(def), lo, hi, {}, std::move(help)};
}
ParamSpec counts(std::string key, std::string def, double lo, double hi, std::string help) {
    return {std::move(key), ParamKind::count_list, std::move(def), lo, hi, {}, std::move(help)};
}
ParamSpec reals(std::string key, std::string def, double lo, double hi, std::string help) {
    return {std::move(key), ParamKind::real_list, std::move(def), lo, hi, {}, std::move(help)};
}
ParamSpec choice(std::string key, std::string def, std::vector<std::string> options, std::string help) {
    return {std::move(key), ParamKind::choice, std::move(def), 0, 0, std::move(options), std::move(help)};
}

const ParamSpec kSamples = count("samples", "100000", 1, 1e9, "Monte Carlo sample count");
const ParamSpec kHorizon = real("T", "1", 1e-6, 1e6, "time horizon");
const std::vector<std::string> kDirections{"constant", "indicator", "cosine"};
const std::vector<std::string> kFunctions{"const", "point", "product", "cubic", "bump", "sigmoid"};
const std::vector<std::string> kKernels{"triangular", "gaussian"};

std::size_t index_of(const std::vector<std::string>& options, const std::string& v) {
    return static_cast<std::size_t>(std::find(options.begin(), options.end(), v) - options.begin());
}

KernelKind kernel_of(const Params& p) {
    return p.text("kernel") == "gaussian" ? KernelKind::gaussian : KernelKind::triangular;
}

/// Split index for a fraction of the horizon; must fall strictly inside the grid.
std::size_t split_index(const TimeGrid& grid, double fraction) {
    const auto j = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(grid.steps())));
    if (j == 0 || j >= grid.steps())
        throw std::invalid_argument("split fraction " + format_double(fraction) + " does not fall inside the grid");
    return j;
}

// ---- row helpers ----

ResultRow value_row(std::string quantity, std::optional<double> x, double estimate, double std_error = 0.0) {
    ResultRow r;
    r.quantity = std::move(quantity);
    r.x = x;
    r.estimate = estimate;
    r.std_error = std_error;
    return r;
}

ResultRow near_row(std::string quantity, std::optional<double> x, double estimate, double std_error,
                   double reference, double tolerance) {
    ResultRow r = value_row(std::move(quantity), x, estimate, std_error);
    r.reference = reference;
    r.tolerance = tolerance;
    r.passed = std::abs(estimate - reference) <= tolerance;
    return r;
}

ResultRow mc_row(std::string quantity, std::optional<double> x, const MCEstimate& e, double reference,
                 double slack = 0.0) {
    return near_row(std::move(quantity), x, e.mean, e.std_error, reference, 3.0 * e.std_error + slack);
}

/// A pass/fail row whose estimate is the observed statistic and reference the threshold.
ResultRow threshold_row(std::string quantity, std::optional<double> x, double observed, double threshold,
                        bool passed, std::string note = {}) {
    ResultRow r = value_row(std::move(quantity), x, observed);
    r.reference = threshold;
    r.passed = passed;
    r.note = std::move(note);
    return r;
}

// ---- operations ----

ExperimentOutput andersen(const Params& p, SeedSpec, unsigned) {
    const std::size_t order = p.count("order");
    const auto chk = andersen_series_check(order);
    ExperimentOutput out;
    bool all = true;
    for (std::size_t n = 0; n <= order; ++n) {
        const ExactRational exact = halfline_prob_exact(n);
        const bool lhs_ok = chk.lhs.coefficients[n] == exact;
        const bool rhs_ok = chk.rhs.coefficients[n] == exact;
        all = all && lhs_ok && rhs_ok;
        ResultRow r = value_row("coefficient", double(n), static_cast<double>(chk.lhs.coefficients[n]));
        r.reference = static_cast<double>(exact);
        r.tolerance = 0.0;
        r.passed = lhs_ok && rhs_ok;
        r.note = to_string(chk.lhs.coefficients[n]);
        out.rows.push_back(std::move(r));
    }
    all = all && chk.exact_match();
    out.rows.push_back(threshold_row("exact match", std::nullopt, all ? 1.0 : 0.0, 1.0, all,
                                     std::string("exact match: ") + (all ? "true" : "false")));
    return out;
}

ExperimentOutput halfline(const Params& p, SeedSpec, unsigned) {
    ExperimentOutput out;
    for (auto n : p.counts("ns")) {
        const double g = halfline_prob(n);
        out.rows.push_back(value_row("gamma(A_n)", double(n), g));
        if (n >= 1) {
            const double bound = 1.0 / std::sqrt(double(n));
            out.rows.push_back(threshold_row("gamma(A_n) <= n^-1/2", double(n), g, bound, g <= bound));
        }
    }
    return out;
}

ExperimentOutput mc_halfline(const Params& p, SeedSpec seed, unsigned workers) {
    ExperimentOutput out;
    std::uint64_t i = 0;
    for (auto n : p.counts("ns")) {
        const auto e = mc_halfline_prob(n, p.count("samples"), seed.substream(i++), workers);
        out.rows.push_back(mc_row("P(stay <= 0)", double(n), e, halfline_prob(n)));
    }
    return out;
}

ExperimentOutput asymptotic(const Params& p, SeedSpec, unsigned) {
    ExperimentOutput out;
    for (auto n : p.counts("ns")) {
        const auto a = asymptotic_match(n);
        ResultRow r = value_row("sqrt(n) gamma(A_n)", double(n), a.scaled);
        r.reference = a.limit;
        out.rows.push_back(std::move(r));
        out.rows.push_back(value_row("relative gap", double(n), a.relative_gap));
    }
    return out;
}

ExperimentOutput bridge_stay(const Params& p, SeedSpec seed, unsigned workers) {
    ExperimentOutput out;
    std::uint64_t i = 0;
    for (auto n : p.counts("ns")) {
        const auto e = mc_bridge_stay_prob(n, p.count("samples"), seed.substream(i++), workers);
        out.rows.push_back(mc_row("P(bridge stays <= 0)", double(n), e, 1.0 / double(n)));
    }
    return out;
}

ExperimentOutput bridge_argmax(const Params& p, SeedSpec seed, unsigned workers) {
    const std::size_t n = p.count("n");
    const auto h = bridge_argmax_histogram(n, p.count("samples"), seed, workers);
    ExperimentOutput out;
    for (std::size_t i = 0; i < n; ++i) {
        ResultRow r = value_row("argmax frequency", double(i), double(h.counts[i]) / double(h.samples));
        r.reference = 1.0 / double(n);
        out.rows.push_back(std::move(r));
    }
    out.rows.push_back(threshold_row("chi-square p-value", std::nullopt, h.p_value, 1e-3, h.p_value > 1e-3,
                                     "chi2=" + format_double(h.chi_square) + " dof=" + std::to_string(h.dof)));
    out.rows.push_back(threshold_row("exact ties", std::nullopt, double(h.ties), 0.0, h.ties == 0));
    return out;
}

HalfspaceSpec halfspace_of(const Params& p) { return {p.reals("normal"), p.real("offset")}; }

ExperimentOutput halfspace(const Params& p, SeedSpec, unsigned) {
    const auto spec = halfspace_of(p);
    const auto e = halfspace_perimeter(spec);
    ExperimentOutput out;
    out.rows.push_back(near_row("perimeter", std::nullopt, e.value, 0.0, std_normal_pdf(spec.distance()), 1e-15));
    return out;
}

ExperimentOutput tube(const Params& p, SeedSpec seed, unsigned workers) {
    const auto spec = halfspace_of(p);
    const auto e = tube_perimeter(spec, p.real("eps"), p.count("samples"), seed, workers);
    ExperimentOutput out;
    out.rows.push_back(near_row("tube perimeter", p.real("eps"), e.value, e.std_error,
                                halfspace_perimeter(spec).value, 3.0 * e.std_error + 1e-4));
    out.rows.push_back(value_row("exact tube bias", p.real("eps"), tube_bias_exact(spec, p.real("eps"))));
    return out;
}

ExperimentOutput restricted(const Params& p, SeedSpec seed, unsigned workers) {
    ExperimentOutput out;
    std::uint64_t i = 0;
    for (auto n : p.counts("ns")) {
        const auto e = restricted_perimeter_bridge(n, p.count("samples"), seed.substream(i++), workers);
        const double ref = kInvSqrt2Pi / double(n);
        out.rows.push_back(near_row("restricted perimeter", double(n), e.value, e.std_error, ref, 3.0 * e.std_error));
        out.rows.push_back(threshold_row("|D I|(A_n) <= 1/n", double(n), e.value, 1.0 / double(n),
                                         e.value - 3.0 * e.std_error <= 1.0 / double(n)));
    }
    return out;
}

ExperimentOutput offband(const Params& p, SeedSpec seed, unsigned workers) {
    ExperimentOutput out;
    const auto m = concentration_offband_mass(p.count("n"), p.real("eps"), p.real("band"), p.count("samples"), seed,
                                              workers);
    ResultRow r = value_row("offband fraction", p.real("eps"), m.fraction, m.std_error);
    r.note = "tube_samples=" + std::to_string(m.tube_samples);
    out.rows.push_back(std::move(r));
    return out;
}

ExperimentOutput grad_max(const Params& p, SeedSpec seed, unsigned workers) {
    const TimeGrid grid(p.count("n"), p.real("T"));
    const auto dirs = direction_catalog(grid);
    const auto& h = dirs[index_of(kDirections, p.text("direction"))];
    FDConfig cfg = FDConfig::first_order(grid.horizon());
    if (p.real("eps") > 0) cfg.eps = p.real("eps");
    cfg.tolerance = p.real("tolerance");
    const auto r = verify_grad_max(grid, h, p.count("samples"), seed, cfg, workers);
    ExperimentOutput out;
    out.rows.push_back(threshold_row("fraction within tolerance", std::nullopt, r.fraction(), 0.99,
                                     r.fraction() >= 0.99,
                                     "evaluated=" + std::to_string(r.evaluated) +
                                         " excluded=" + std::to_string(r.excluded) +
                                         " max_abs_error=" + format_double(r.max_abs_error)));
    return out;
}

ExperimentOutput second_difference(const Params& p, SeedSpec seed, unsigned workers) {
    const TimeGrid grid(p.count("n"), p.real("T"));
    const auto dirs = direction_catalog(grid);
    const auto& h = dirs[index_of(kDirections, p.text("h"))];
    const auto& k = dirs[index_of(kDirections, p.text("k"))];
    const auto cfg = FDConfig::second_order(grid.horizon());
    const auto r = verify_second_difference_zero(grid, h, k, p.count("samples"), seed, cfg, 0x1.0p-32, workers);
    ExperimentOutput out;
    out.rows.push_back(threshold_row("exact zero fraction", std::nullopt, r.fraction(), 0.99, r.fraction() >= 0.99,
                                     "evaluated=" + std::to_string(r.evaluated) +
                                         " excluded=" + std::to_string(r.excluded)));
    return out;
}

ExperimentOutput tied_peak(const Params& p, SeedSpec, unsigned) {
    const auto path = tied_peak_path();
    const auto h = tied_peak_direction();
    FDConfig cfg;
    cfg.eps = p.real("eps");
    ExperimentOutput out;
    double prev = 0.0;
    for (std::size_t j = 0; j < p.count("halvings") + 1; ++j) {
        FDConfig e = cfg;
        e.eps = std::ldexp(cfg.eps, -static_cast<int>(j));
        const double v = std::abs(fd_second(functionals::running_maximum(), path, h, h, e));
        out.rows.push_back(value_row("|second difference|", e.eps, v));
        if (j) out.rows.push_back(near_row("ratio per halving", e.eps, v / prev, 0.0, 2.0, 0.3));
        prev = v;
    }
    return out;
}

ExperimentOutput ibp(const Params& p, SeedSpec seed, unsigned workers) {
    const TimeGrid grid(p.count("n"), p.real("T"));
    const auto dirs = direction_catalog(grid);
    const auto& h = dirs[index_of(kDirections, p.text("h"))];
    const auto& k = dirs[index_of(kDirections, p.text("k"))];
    ExperimentOutput out;
    std::uint64_t i = 0;
    for (const auto& g : cylindrical_catalog(grid)) {
        const auto e = mc_run([&](Rng& rng) { return skorokhod_second_adjoint(g, k, h, sample_brownian(grid, rng)); },
                              p.count("samples"), workers, seed.substream(i++));
        ResultRow r = mc_row("E[d*_k d*_h g]", std::nullopt, e, 0.0);
        r.label = g.id();
        out.rows.push_back(std::move(r));
    }
    return out;
}

ExperimentOutput cross_check(const Params& p, SeedSpec seed, unsigned workers) {
    const TimeGrid grid(p.count("n"), p.real("T"));
    const auto dirs = direction_catalog(grid);
    const auto& h = dirs[index_of(kDirections, p.text("h"))];
    const auto& k = dirs[index_of(kDirections, p.text("k"))];
    const auto catalog = cylindrical_catalog(grid);
    std::vector<CylindricalFunction> gs;
    for (const auto& name : split_list(p.text("g"))) gs.push_back(catalog[index_of(kFunctions, name)]);
    KernelConfig kc;
    kc.kernel = kernel_of(p);
    kc.bandwidth = p.real("bandwidth");
    const auto rows = d2m_cross_check(gs, k, h, grid, kc, p.count("samples"), seed, workers);
    ExperimentOutput out;
    for (const auto& r : rows) {
        const double tol = 3.0 * std::hypot(r.weak.std_error, r.chain.std_error) + r.bias_diagnostic();
        ResultRow w = value_row("weak", std::nullopt, r.weak.mean, r.weak.std_error);
        w.label = r.g_id;
        out.rows.push_back(std::move(w));
        ResultRow half = value_row("chain half bandwidth", r.bandwidth / 2, r.chain_half.mean, r.chain_half.std_error);
        half.label = r.g_id;
        out.rows.push_back(std::move(half));
        ResultRow c = near_row("chain", r.bandwidth, r.chain.mean, r.chain.std_error, r.weak.mean, tol);
        c.label = r.g_id;
        out.rows.push_back(std::move(c));
    }
    return out;
}

ExperimentOutput sigma_fd(const Params& p, SeedSpec seed, unsigned workers) {
    const TimeGrid grid(p.count("n"), p.real("T"));
    const auto dirs = direction_catalog(grid);
    const auto& h = dirs[index_of(kDirections, p.text("direction"))];
    const auto r = verify_sigma_fd(grid, h, p.count("samples"), seed, FDConfig::first_order(grid.horizon()), workers);
    ExperimentOutput out;
    out.rows.push_back(threshold_row("sigma first difference zero fraction", std::nullopt, r.fraction(), 0.99,
                                     r.fraction() >= 0.99, "evaluated=" + std::to_string(r.evaluated)));
    return out;
}

ExperimentOutput lt_zero_op(const Params& p, SeedSpec, unsigned) {
    const double T = p.real("T");
    const double ref = lt_zero_closed_form(T);
    ExperimentOutput out;
    for (double t : p.reals("t")) {
        const auto q = lt_zero(t * T, T);
        out.rows.push_back(near_row("l_t(0)", t, q.value, q.error, ref, 1e-10));
    }
    return out;
}

ExperimentOutput delta_density_op(const Params& p, SeedSpec seed, unsigned workers) {
    const TimeGrid grid(p.count("n"), p.real("T"));
    KernelConfig kc;
    kc.kernel = kernel_of(p);
    kc.bandwidth = p.real("bandwidth");
    const auto d = delta_density(grid, split_index(grid, p.real("t")), kc, p.count("samples"), seed, workers);
    const double ref = lt_zero_closed_form(grid.horizon());
    ExperimentOutput out;
    ResultRow r = near_row("density of Delta_t M at 0", p.real("t"), d.estimate.mean, d.estimate.std_error, ref,
                           p.real("relative_tolerance") * ref);
    r.note = "bandwidth=" + format_double(d.bandwidth) + " effective=" + std::to_string(d.effective_samples);
    out.rows.push_back(std::move(r));
    return out;
}

ExperimentOutput tv_bound(const Params& p, SeedSpec, unsigned workers) {
    ExperimentOutput out;
    std::vector<TVBoundRow> rows;
    for (auto n : p.counts("ns")) rows.push_back(tv_bound_discrete(n, p.real("T"), workers));
    for (const auto& r : rows) {
        out.rows.push_back(value_row("B(n)", double(r.n), r.bound));
        out.rows.push_back(value_row("interior", double(r.n), r.interior));
        out.rows.push_back(value_row("R(n)", double(r.n), r.remainder));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        decreasing = decreasing && (rows[i].n <= rows[i - 1].n || rows[i].remainder < rows[i - 1].remainder);
    out.rows.push_back(threshold_row("R(n) strictly decreasing", std::nullopt, decreasing ? 1.0 : 0.0, 1.0, decreasing));
    if (rows.size() >= 2) {
        const auto& a = rows[rows.size() - 2];
        const auto& b = rows.back();
        const double change = std::abs(b.bound - a.bound) / b.bound;
        out.rows.push_back(threshold_row("relative change of B over last step", double(b.n), change, 0.01, change < 0.01));
    }
    return out;
}

ExperimentOutput limit_integral_op(const Params&, SeedSpec, unsigned) {
    const auto q = limit_integral();
    ExperimentOutput out;
    out.rows.push_back(near_row("limit integral", std::nullopt, q.value, q.error, 2.0 * std::numbers::pi, 1e-6));
    return out;
}

ExperimentOutput riemann(const Params& p, SeedSpec, unsigned workers) {
    ExperimentOutput out;
    const double ref = 2.0 * std::numbers::pi;
    for (auto n : p.counts("ns")) {
        const double v = limit_riemann_sum(n, workers);
        out.rows.push_back(near_row("Riemann sum", double(n), v, 0.0, ref, p.real("relative_tolerance") * ref));
    }
    return out;
}

ExperimentOutput segment_curve(const Params& p, SeedSpec, unsigned) {
    const auto c = segment_max_curve(p.real("length"), p.real("y_max"), p.count("points"));
    ExperimentOutput out;
    out.rows.push_back(near_row("total mass", std::nullopt, c.total_mass_check, 0.0, 1.0, p.real("mass_tolerance")));
    std::ostringstream os;
    CsvWriter w(os);
    w.row("y", "density");
    for (std::size_t i = 0; i < c.abscissae.size(); ++i) w.row(c.abscissae[i], c.values[i]);
    out.extra_csv["curve"] = os.str();
    return out;
}

ExperimentOutput unique_max(const Params& p, SeedSpec seed, unsigned workers) {
    const TimeGrid grid(p.count("n"), p.real("T"));
    const auto ts = unique_max_check(grid, p.count("samples"), seed, p.reals("deltas"), workers);
    const auto f = ts.fractions();
    ExperimentOutput out;
    out.rows.push_back(threshold_row("exact ties", std::nullopt, double(ts.exact_ties), 0.0, ts.exact_ties == 0));
    for (std::size_t i = 0; i < f.size(); ++i) out.rows.push_back(value_row("P(gap < delta)", ts.deltas[i], f[i]));
    // No atom at 0: the small-gap fraction keeps shrinking with delta.
    bool shrinking = true;
    for (std::size_t i = 1; i < f.size(); ++i)
        shrinking = shrinking && (ts.deltas[i] >= ts.deltas[i - 1] || f[i] < f[i - 1]);
    out.rows.push_back(threshold_row("gap fraction shrinks with delta", std::nullopt, shrinking ? 1.0 : 0.0, 1.0,
                                     shrinking));
    return out;
}

ExperimentOutput excess(const Params& p, SeedSpec seed, unsigned workers) {
    const TimeGrid grid(p.count("n"), p.real("T"));
    const auto deltas = p.reals("deltas");
    const auto l = excess_conditional(split_index(grid, p.real("t")), p.real("eps"), deltas, grid, p.count("samples"),
                                      seed, workers);
    ExperimentOutput out;
    for (std::size_t i = 0; i < l.deltas.size(); ++i)
        out.rows.push_back(value_row("P(min excess < delta | window)", l.deltas[i], l.estimates[i].mean,
                                     l.estimates[i].std_error));
    bool decreasing = true;
    for (std::size_t i = 1; i < l.estimates.size(); ++i)
        decreasing = decreasing && (l.deltas[i] >= l.deltas[i - 1] || l.estimates[i].mean < l.estimates[i - 1].mean);
    out.rows.push_back(threshold_row("strictly decreasing along delta ladder", std::nullopt, decreasing ? 1.0 : 0.0, 1.0,
                                     decreasing && !l.flagged,
                                     "conditioned=" + std::to_string(l.conditioned) +
                                         " split_atoms=" + std::to_string(l.split_atoms)));
    return out;
}

ExperimentOutput witness(const Params& p, SeedSpec seed, unsigned workers) {
    const TimeGrid grid(p.count("n"), p.real("T"));
    const std::size_t j = split_index(grid, p.real("t"));
    const auto eps = p.reals("eps");
    const auto sweep = concentration_sweep(j, eps, p.real("delta"), eps.back(), {p.real("delta")}, grid,
                                           p.count("samples"), seed, workers);
    ExperimentOutput out;
    std::size_t violations = 0;
    for (const auto& w : sweep.witnesses) {
        ResultRow r = value_row("both-excess fraction", w.eps, w.fraction.mean, w.fraction.std_error);
        r.note = "conditioned=" + std::to_string(w.conditioned) + " split_atoms=" + std::to_string(w.split_atoms);
        out.rows.push_back(std::move(r));
        violations += w.separation_violations;
    }
    // Trend check along decreasing eps.
    bool increasing = true;
    for (std::size_t i = 1; i < sweep.witnesses.size(); ++i) {
        const auto& a = sweep.witnesses[i - 1];
        const auto& b = sweep.witnesses[i];
        increasing = increasing && (b.eps >= a.eps || b.fraction.mean > a.fraction.mean);
    }
    out.rows.push_back(threshold_row("fraction increases as eps shrinks", std::nullopt, increasing ? 1.0 : 0.0, 1.0,
                                     increasing));
    out.rows.push_back(threshold_row("separation violations", std::nullopt, double(violations), 0.0, violations == 0));

    const auto& last = sweep.witnesses.back();
    std::ostringstream os;
    CsvWriter w(os);
    w.row("left_excess", "right_excess");
    for (const auto& [l, r] : last.scatter) w.row(l, r);
    out.extra_csv["scatter"] = os.str();
    return out;
}

std::vector<OpSpec> build_registry() {
    const auto n_param = [](std::string def, double lo = 1) {
        return count("n", std::move(def), lo, 1e6, "grid steps / walk length");
    };
    const auto dir = [](std::string key, std::string def) {
        return choice(std::move(key), std::move(def), kDirections, "catalog direction");
    };
    const auto kernel = choice("kernel", "triangular", kKernels, "density kernel");
    const auto bandwidth = real("bandwidth", "0", 0, 1e3, "kernel bandwidth, 0 for the pilot-run default");
    const auto split = real("t", "0.5", 0, 1, "split point as a fraction of T");

    return {
        {"fluctuation.andersen_series_check", "exact-rational generating-function identity",
         {count("order", "64", 1, 512, "series order")}, andersen},
        {"fluctuation.halfline_prob", "exact stay probabilities and the n^-1/2 bound",
         {counts("ns", "1,2,5,10,20,50,64", 0, 1e6, "walk lengths")}, halfline},
        {"fluctuation.mc_halfline_prob", "Monte Carlo stay probability of the walk",
         {counts("ns", "1,2,5,10", 1, 1e5, "walk lengths"), kSamples}, mc_halfline},
        {"fluctuation.asymptotic_match", "sqrt(n) gamma(A_n) against 1/sqrt(pi)",
         {counts("ns", "10,100,1000,10000", 1, 1e7, "walk lengths")}, asymptotic},
        {"fluctuation.bridge_stay_prob", "bridge stay probability against 1/n",
         {counts("ns", "2,5,10,100", 2, 1e5, "bridge lengths"), kSamples}, bridge_stay},
        {"fluctuation.bridge_argmax_histogram", "uniformity of the bridge argmax",
         {n_param("20", 2), kSamples}, bridge_argmax},
        {"gaussian-bv.halfspace_perimeter", "exact Gaussian perimeter of a halfspace",
         {reals("normal", "1", -1e6, 1e6, "normal vector"), real("offset", "0", -1e3, 1e3, "offset")}, halfspace},
        {"gaussian-bv.tube_perimeter", "tube estimate of the halfspace perimeter",
         {reals("normal", "1", -1e6, 1e6, "normal vector"), real("offset", "0", -1e3, 1e3, "offset"),
          real("eps", "0.01", 1e-8, 1, "tube half-width"), kSamples},
         tube},
        {"gaussian-bv.restricted_perimeter", "restricted perimeter from sampled bridges",
         {counts("ns", "2,10,100", 2, 1e5, "bridge lengths"), kSamples}, restricted},
        {"gaussian-bv.offband_mass", "off-band mass inside a level-set tube",
         {n_param("10"), real("eps", "0.1", 1e-8, 10, "tube half-width"), real("band", "0.05", 0, 10, "band"),
          kSamples},
         offband},
        {"malliavin-fd.grad_max", "finite-difference gradient of the maximum against h(sigma)",
         {n_param("1000", 2), kHorizon, kSamples, dir("direction", "constant"),
          real("eps", "0", 0, 1, "bump size, 0 for 1e-5 sqrt(T)"), real("tolerance", "1e-6", 0, 1, "pointwise tolerance")},
         grad_max},
        {"malliavin-fd.second_difference_zero", "exact-zero second differences of the maximum",
         {n_param("1024", 2), kHorizon, kSamples, dir("h", "constant"), dir("k", "indicator")}, second_difference},
        {"malliavin-fd.tied_peak", "second difference on a path with two maxima",
         {real("eps", "0x1p-10", 1e-12, 0.1, "initial bump size"), count("halvings", "2", 1, 20, "eps halvings")},
         tied_peak},
        {"malliavin-fd.ibp", "second Skorokhod adjoints have mean zero",
         {n_param("32", 2), kHorizon, kSamples, dir("h", "constant"), dir("k", "indicator")}, ibp},
        {"malliavin-fd.cross_check", "weak second derivative against the chain-max estimator",
         {n_param("200", 4), kHorizon, kSamples, dir("h", "constant"), dir("k", "indicator"),
          {"g", ParamKind::choice, "const,point", 0, 0, kFunctions, "comma-separated catalog functions"}, kernel,
          bandwidth},
         cross_check},
        {"malliavin-fd.sigma_fd", "first differences of the argmax time vanish",
         {n_param("1000", 2), kHorizon, kSamples, dir("direction", "constant")}, sigma_fd},
        {"density-tv.lt_zero", "density of Delta_t M at 0 by quadrature",
         {reals("t", "0.25,0.5,0.75", 1e-6, 1 - 1e-6, "split fractions"), kHorizon}, lt_zero_op},
        {"density-tv.delta_density", "kernel density of Delta_t M at 0 against the closed form",
         {n_param("2000", 2), kHorizon, split, kSamples, kernel, bandwidth,
          real("relative_tolerance", "0.02", 0, 1, "relative tolerance")},
         delta_density_op},
        {"density-tv.tv_bound", "exact-factor total-variation bound B(n)",
         {counts("ns", "100,200,500,1000,2000", 1, 1e5, "grid sizes"), kHorizon}, tv_bound},
        {"density-tv.limit_integral", "the limiting double integral", {}, limit_integral_op},
        {"density-tv.riemann_sum", "Riemann sum of the limiting double integral",
         {counts("ns", "2000", 3, 1e5, "grid sizes"), real("relative_tolerance", "0.05", 0, 1, "relative tolerance")},
         riemann},
        {"density-tv.segment_max_curve", "density of a segment maximum",
         {real("length", "1", 1e-6, 1e6, "segment length"), real("y_max", "5", 1e-6, 1e3, "abscissa range"),
          count("points", "201", 2, 1e6, "abscissae"), real("mass_tolerance", "1e-3", 0, 1, "mass tolerance")},
         segment_curve},
        {"concentration.unique_max_check", "exact ties and the small-gap profile of the maximum",
         {n_param("1000", 2), kHorizon, kSamples, reals("deltas", "1e-1,1e-2,1e-3,1e-4", 0, 1e3, "gap thresholds")},
         unique_max},
        {"concentration.excess_conditional", "small-excess probability in the Delta_t M window",
         {n_param("1000", 2), kHorizon, split, real("eps", "0.01", 1e-8, 10, "window half-width"), kSamples,
          reals("deltas", "0.2,0.1,0.05,0.025", 0, 1e3, "excess thresholds")},
         excess},
        {"concentration.double_max_witness", "both-excess fraction along an eps ladder",
         {n_param("1000", 2), kHorizon, split, reals("eps", "0.4,0.2,0.1,0.05,0.02", 1e-8, 10, "window ladder"),
          real("delta", "0.05", 0, 1e3, "excess threshold"), kSamples},
         witness},
    };
}

}  // namespace

std::size_t Params::count(const std::string& key) const { return parse_count(text(key), key); }
double Params::real(const std::string& key) const { return parse_real(text(key), key); }

std::vector<std::size_t> Params::counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& v : split_list(text(key))) out.push_back(parse_count(v, key));
    return out;
}

std::vector<double> Params::reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& v : split_list(text(key))) out.push_back(parse_real(v, key));
    return out;
}

const std::string& Params::text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::logic_error("parameter '" + key + "' not configured");
    return it->second;
}

std::string canonical_value(const ParamSpec& spec, const std::string& raw, const std::string& field) {
    const auto items = split_list(raw);
    const bool list = spec.kind == ParamKind::count_list || spec.kind == ParamKind::real_list ||
                      (spec.kind == ParamKind::choice && spec.key == "g");
    if (items.empty() || (!list && items.size() != 1)) throw ConfigError(field, "expected a single value");
    std::string out;
    for (const auto& item : items) {
        std::string v;
        switch (spec.kind) {
            case ParamKind::count:
            case ParamKind::count_list: {
                const std::size_t c = parse_count(item, field);
                check_range(spec, double(c), field);
                v = std::to_string(c);
                break;
            }
            case ParamKind::real:
            case ParamKind::real_list: {
                double x = 0.0;
                if (item.rfind("0x", 0) == 0) {
                    auto [end, ec] = std::from_chars(item.data() + 2, item.data() + item.size(), x, std::chars_format::hex);
                    if (ec != std::errc() || end != item.data() + item.size())
                        throw ConfigError(field, "expected a number, got '" + item + "'");
                } else {
                    x = parse_real(item, field);
                }
                check_range(spec, x, field);
                v = format_double(x);
                break;
            }
            case ParamKind::choice:
                if (std::find(spec.choices.begin(), spec.choices.end(), item) == spec.choices.end()) {
                    std::string opts;
                    for (const auto& c : spec.choices) opts += (opts.empty() ? "" : "|") + c;
                    throw ConfigError(field, "expected one of " + opts + ", got '" + item + "'");
                }
                v = item;
                break;
        }
        out += (out.empty() ? "" : ",") + v;
    }
    return out;
}

const std::vector<OpSpec>& op_registry() {
    static const std::vector<OpSpec> registry = build_registry();
    return registry;
}

const OpSpec* find_op(const std::string& name) {
    for (const auto& op : op_registry())
        if (op.name == name) return &op;
    return nullptr;
}

}  // namespace maxbv::cli
