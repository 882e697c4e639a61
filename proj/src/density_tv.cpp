#include "maxbv/density_tv.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "maxbv/fluctuation.hpp"
#include "maxbv/gaussian_bv.hpp"

namespace maxbv {

double segment_max_density(double y, double length) {
    if (!(length > 0.0)) throw std::invalid_argument("segment_max_density: length must be > 0");
    if (y < 0.0) return 0.0;
    const double s = std::sqrt(length);
    return 2.0 * std_normal_pdf(y / s) / s;
}

DensityCurve segment_max_curve(double length, double y_max, std::size_t points) {
    if (points < 2 || !(y_max > 0.0)) throw std::invalid_argument("segment_max_curve: need >= 2 points on (0, y_max]");
    DensityCurve c;
    c.abscissae.resize(points);
    c.values.resize(points);
    const double dy = y_max / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        c.abscissae[i] = dy * static_cast<double>(i);
        c.values[i] = segment_max_density(c.abscissae[i], length);
    }
    double mass = 0.0;
    for (std::size_t i = 1; i < points; ++i) mass += 0.5 * dy * (c.values[i - 1] + c.values[i]);
    c.total_mass_check = mass + 2.0 * (1.0 - std_normal_cdf(y_max / std::sqrt(length)));
    return c;
}

QuadResult lt_zero(double t, double horizon) {
    if (!(horizon > 0.0) || !(t > 0.0) || !(t < horizon))
        throw std::invalid_argument("lt_zero: need 0 < t < T");
    // M' = M_[t,T] - W_t and R = M_[0,t] - W_t are independent half-normals
    // (lengths T - t and t); Delta = M' - R has density int f_M'(y) f_R(y) dy at 0.
    return integrate_to_infinity(
        [=](double y) { return segment_max_density(y, horizon - t) * segment_max_density(y, t); }, 0.0,
        {1e-14, 1e-13, 4000});
}

double lt_zero_closed_form(double horizon) { return std::sqrt(2.0 / (std::numbers::pi * horizon)); }

namespace {

std::vector<double> halfline_table(std::size_t n) {
    std::vector<double> g(n + 1);
    for (std::size_t m = 0; m <= n; ++m) g[m] = halfline_prob(m);
    return g;
}

void check_tv_args(std::size_t n, double horizon) {
    if (n < 3) throw std::invalid_argument("tv_bound_discrete: n must be >= 3");
    if (!(horizon > 0.0)) throw std::invalid_argument("tv_bound_discrete: T must be > 0");
}

// Terms of one m row; separates the k = n boundary term.
struct TvRow {
    double all = 0.0;
    double boundary = 0.0;
};

TvRow tv_row(std::size_t m, std::size_t n, const std::vector<double>& g) {
    TvRow r;
    for (std::size_t k = m + 1; k <= n; ++k) {
        const double v = g[m] * g[n - k] / std::sqrt(static_cast<double>(k - m));
        r.all += v;
        if (m == 0 || k == n) r.boundary += v;
    }
    return r;
}

TVBoundRow assemble(std::size_t n, double horizon, double all, double boundary) {
    const double scale = std::sqrt(horizon / static_cast<double>(n)) / std::sqrt(2.0 * std::numbers::pi);
    TVBoundRow row;
    row.n = n;
    row.horizon = horizon;
    row.bound = scale * all;
    row.remainder = scale * boundary;
    row.interior = scale * (all - boundary);
    return row;
}

}  // namespace

TVBoundRow tv_bound_discrete(std::size_t n, double horizon, unsigned workers) {
    check_tv_args(n, horizon);
    const auto g = halfline_table(n);
    std::vector<TvRow> rows(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers)
    for (std::size_t m = 0; m < n; ++m) rows[m] = tv_row(m, n, g);
    double all = 0.0, boundary = 0.0;
    for (const auto& r : rows) {
        all += r.all;
        boundary += r.boundary;
    }
    return assemble(n, horizon, all, boundary);
}

TVBoundRow tv_bound_discrete_serial(std::size_t n, double horizon) {
    check_tv_args(n, horizon);
    const auto g = halfline_table(n);
    double all = 0.0, boundary = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t k = m + 1; k <= n; ++k) {
            const double v = g[m] * g[n - k] / std::sqrt(static_cast<double>(k - m));
            all += v;
            if (m == 0 || k == n) boundary += v;
        }
    }
    return assemble(n, horizon, all, boundary);
}

namespace {

// Integrands in terms of a = s - t and b = 1 - s.
double limit_integrand(double t, double a, double b) { return 1.0 / std::sqrt(t * a * b); }
double inner_integrand(double, double a, double b) { return 1.0 / std::sqrt(a * b); }

// s = t + (1 - t) sin^2(theta) removes both square-root singularities of the
// inner integrand at s = t and s = 1. a and b are formed directly so that
// neither is lost to cancellation near the endpoints.
template <class F>
double substituted(F&& f, double t, double theta) {
    const double sn = std::sin(theta), cs = std::cos(theta);
    const double a = (1.0 - t) * sn * sn, b = (1.0 - t) * cs * cs;
    return f(t, a, b) * 2.0 * (1.0 - t) * sn * cs;
}

}  // namespace

QuadResult limit_inner_integral(double t) {
    if (!(t >= 0.0) || !(t < 1.0)) throw std::invalid_argument("limit_inner_integral: need 0 <= t < 1");
    return integrate([t](double th) { return substituted(inner_integrand, t, th); }, 0.0,
                     0.5 * std::numbers::pi, {1e-14, 1e-14, 200});
}

QuadResult limit_integral() {
    // Outer t = u^2 removes the t^{-1/2} singularity at t = 0.
    double inner_error = 0.0;
    std::size_t inner_evals = 0;
    bool inner_ok = true;
    QuadResult outer = integrate(
        [&](double u) {
            const double t = u * u;
            const auto in = integrate([&](double th) { return 2.0 * u * substituted(limit_integrand, t, th); }, 0.0,
                                      0.5 * std::numbers::pi, {1e-13, 1e-13, 200});
            inner_error += in.error;
            inner_evals += in.evaluations;
            inner_ok = inner_ok && in.converged;
            return in.value;
        },
        0.0, 1.0, {1e-12, 1e-12, 200});
    // Inner errors summed over every outer node (weights are below one).
    outer.error += inner_error;
    outer.evaluations += inner_evals;
    outer.converged = outer.converged && inner_ok && outer.error < 1e-8;
    return outer;
}

double limit_riemann_sum_serial(std::size_t n) {
    if (n < 3) throw std::invalid_argument("limit_riemann_sum: n must be >= 3");
    const double nd = static_cast<double>(n);
    double s = 0.0;
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t k = m + 1; k < n; ++k)
            s += 1.0 / std::sqrt((static_cast<double>(m) / nd) * (static_cast<double>(k - m) / nd) *
                                 (static_cast<double>(n - k) / nd));
    return s / (nd * nd);
}

double limit_riemann_sum(std::size_t n, unsigned workers) {
    if (n < 3) throw std::invalid_argument("limit_riemann_sum: n must be >= 3");
    const double nd = static_cast<double>(n);
    std::vector<double> rows(n, 0.0);
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers)
    for (std::size_t m = 1; m < n; ++m) {
        double r = 0.0;
        for (std::size_t k = m + 1; k < n; ++k)
            r += 1.0 / std::sqrt((static_cast<double>(m) / nd) * (static_cast<double>(k - m) / nd) *
                                 (static_cast<double>(n - k) / nd));
        rows[m] = r;
    }
    double s = 0.0;
    for (double r : rows) s += r;
    return s / (nd * nd);
}

AsymptoticMatch asymptotic_match(std::size_t n) {
    if (n < 1) throw std::invalid_argument("asymptotic_match: n must be >= 1");
    AsymptoticMatch a;
    a.n = n;
    a.scaled = std::sqrt(static_cast<double>(n)) * halfline_prob(n);
    a.limit = 1.0 / std::sqrt(std::numbers::pi);
    a.relative_gap = std::abs(a.scaled / a.limit - 1.0);
    return a;
}

}  // namespace maxbv
