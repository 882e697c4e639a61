#include "maxbv/fluctuation.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

#include "maxbv/sampling.hpp"

namespace maxbv {

using boost::multiprecision::cpp_int;

std::string to_string(const ExactRational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

ExactRational parse_rational(const std::string& s) {
    auto integer = [&](const std::string& part) {
        const std::size_t start = !part.empty() && (part[0] == '-' || part[0] == '+') ? 1 : 0;
        if (part.size() == start || part.find_first_not_of("0123456789", start) != std::string::npos)
            throw std::invalid_argument("parse_rational: not a rational: '" + s + "'");
        return cpp_int(part[0] == '+' ? part.substr(1) : part);
    };
    const auto slash = s.find('/');
    if (slash == std::string::npos) return ExactRational(integer(s));
    const cpp_int q = integer(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("parse_rational: zero denominator");
    return ExactRational(integer(s.substr(0, slash)), q);
}

bool AndersenCheck::exact_match() const {
    return lhs.order == rhs.order && lhs.coefficients == rhs.coefficients;
}

SeriesCoefficients series_exp(const std::vector<ExactRational>& a, std::size_t order) {
    if (!a.empty() && a[0] != 0) throw std::invalid_argument("series_exp: a_0 must be 0");
    SeriesCoefficients c{order, std::vector<ExactRational>(order + 1)};
    c.coefficients[0] = 1;
    for (std::size_t n = 1; n <= order; ++n) {
        ExactRational s = 0;
        for (std::size_t k = 1; k <= n && k < a.size(); ++k)
            s += ExactRational(static_cast<long long>(k)) * a[k] * c.coefficients[n - k];
        c.coefficients[n] = s / static_cast<long long>(n);
    }
    return c;
}

namespace {
std::atomic<bool> halfline_fault{false};
}

void set_halfline_fault(bool enabled) { halfline_fault = enabled; }

ExactRational halfline_prob_exact(std::size_t n) {
    cpp_int binom = 1;  // C(2n, n) built as prod (n+i)/i
    for (std::size_t i = 1; i <= n; ++i) binom = binom * (n + i) / i;
    const cpp_int pow4 = cpp_int(1) << (2 * n);
    ExactRational r(binom, pow4);
    if (n >= 1 && halfline_fault) r += ExactRational(1, cpp_int(1) << 40);
    return r;
}

double log_halfline_prob(std::size_t n) {
    const double m = static_cast<double>(n);
    return std::lgamma(2.0 * m + 1.0) - 2.0 * std::lgamma(m + 1.0) - m * std::log(4.0);
}

double halfline_prob(std::size_t n) {
    if (n <= 64) return static_cast<double>(halfline_prob_exact(n));
    return std::exp(log_halfline_prob(n));
}

AndersenCheck andersen_series_check(std::size_t order) {
    if (order < 1) throw std::invalid_argument("andersen_series_check: order must be >= 1");
    // P(W_k <= 0) = 1/2 for the symmetric Gaussian walk.
    std::vector<ExactRational> a(order + 1);
    for (std::size_t k = 1; k <= order; ++k) a[k] = ExactRational(1, 2 * static_cast<long long>(k));
    AndersenCheck out{series_exp(a, order), {order, std::vector<ExactRational>(order + 1)}};
    // (1-t)^{-1/2} = sum r_n t^n with r_n = r_{n-1} (2n-1)/(2n).
    auto& r = out.rhs.coefficients;
    r[0] = 1;
    for (std::size_t n = 1; n <= order; ++n)
        r[n] = r[n - 1] * ExactRational(static_cast<long long>(2 * n - 1), static_cast<long long>(2 * n));
    return out;
}

ExactRational bridge_stay_prob_exact(std::size_t n) {
    if (n == 0) throw std::invalid_argument("bridge_stay_prob_exact: n must be >= 1");
    return ExactRational(1, static_cast<long long>(n));
}

MCEstimate mc_halfline_prob(std::size_t n, std::size_t samples, SeedSpec seed, unsigned workers) {
    if (n == 0) throw std::invalid_argument("mc_halfline_prob: n must be >= 1");
    return mc_run(
        [n](Rng& rng) {
            double w = 0.0;
            bool stays = true;
            // Draw every increment so the stream layout does not depend on the outcome.
            for (std::size_t k = 0; k < n; ++k) {
                w += rng.normal();
                stays = stays && w <= 0.0;
            }
            return stays ? 1.0 : 0.0;
        },
        samples, workers, seed);
}

MCEstimate mc_bridge_stay_prob(std::size_t n, std::size_t samples, SeedSpec seed, unsigned workers) {
    if (n < 2) throw std::invalid_argument("mc_bridge_stay_prob: n must be >= 2");
    return mc_run(
        [n](Rng& rng) {
            std::vector<double> w(n + 1);
            fill_bridge(rng, w);
            return std::all_of(w.begin(), w.end(), [](double v) { return v <= 0.0; }) ? 1.0 : 0.0;
        },
        samples, workers, seed);
}

double chi_square_uniform(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double chi = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi += d * d / expected;
    }
    return chi;
}

double chi_square_sf(double statistic, std::size_t dof) {
    return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

namespace {

struct HistogramAcc {
    std::vector<std::size_t> counts;
    std::size_t ties = 0;
    void merge(const HistogramAcc& o) {
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
        ties += o.ties;
    }
};

}  // namespace

ArgmaxHistogram bridge_argmax_histogram(std::size_t n, std::size_t samples, SeedSpec seed,
                                        unsigned workers) {
    if (n < 2) throw std::invalid_argument("bridge_argmax_histogram: n must be >= 2");
    const HistogramAcc zero{std::vector<std::size_t>(n, 0), 0};
    const auto acc = mc_reduce(samples, workers, seed, zero, [n](HistogramAcc& a, Rng& rng, std::size_t) {
        std::vector<double> w(n + 1);
        fill_bridge(rng, w);
        const auto top = running_max(std::span<const double>(w).first(n), 0, n - 1);
        const auto hits = std::count(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n), top.max_value);
        ++a.counts[top.argmax_index];
        if (hits > 1) ++a.ties;
        return true;
    });
    ArgmaxHistogram h;
    h.counts = acc.counts;
    h.samples = samples;
    h.ties = acc.ties;
    h.chi_square = chi_square_uniform(h.counts);
    h.dof = n - 1;
    h.p_value = chi_square_sf(h.chi_square, h.dof);
    h.seed = seed;
    return h;
}

}  // namespace maxbv
