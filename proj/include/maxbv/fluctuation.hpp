#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <string>
#include <vector>

#include "maxbv/mc.hpp"

namespace maxbv {

/// Reduced p/q with q > 0.
using ExactRational = boost::multiprecision::cpp_rational;

/// Always "p/q", including integers ("1/1").
std::string to_string(const ExactRational& r);
ExactRational parse_rational(const std::string& s);

struct SeriesCoefficients {
    std::size_t order = 0;
    std::vector<ExactRational> coefficients;  // c_0 .. c_order
};

struct AndersenCheck {
    SeriesCoefficients lhs;  // exp(sum_k t^k P(W_k <= 0) / k)
    SeriesCoefficients rhs;  // (1 - t)^{-1/2}
    bool exact_match() const;
};

/// exp(a(t)) for a formal series with a_0 = 0, via n c_n = sum_k k a_k c_{n-k}.
SeriesCoefficients series_exp(const std::vector<ExactRational>& a, std::size_t order);

/// C(2n, n) / 4^n; 1 for n = 0.
ExactRational halfline_prob_exact(std::size_t n);

/// Fault injection for the verification suite: while enabled,
/// halfline_prob_exact(n) is off by 2^-40 for n >= 1.
void set_halfline_fault(bool enabled);

/// log of C(2n, n) / 4^n, finite for any n.
double log_halfline_prob(std::size_t n);
/// halfline_prob_exact as a double: exact rationals up to n = 64, log-gamma beyond.
double halfline_prob(std::size_t n);

AndersenCheck andersen_series_check(std::size_t order);

ExactRational bridge_stay_prob_exact(std::size_t n);

/// P(W_k <= 0 for k = 0..n) for the Gaussian walk.
MCEstimate mc_halfline_prob(std::size_t n, std::size_t samples, SeedSpec seed, unsigned workers = 1);

/// P(W_k <= 0 for k = 0..n | W_n = 0) from sampled bridges.
MCEstimate mc_bridge_stay_prob(std::size_t n, std::size_t samples, SeedSpec seed, unsigned workers = 1);

struct ArgmaxHistogram {
    std::vector<std::size_t> counts;  // first argmax of (W_0..W_{n-1})
    std::size_t samples = 0;
    std::size_t ties = 0;
    double chi_square = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    SeedSpec seed;
};

ArgmaxHistogram bridge_argmax_histogram(std::size_t n, std::size_t samples, SeedSpec seed,
                                        unsigned workers = 1);

/// Pearson statistic against the uniform law on counts.size() cells.
double chi_square_uniform(const std::vector<std::size_t>& counts);
/// Upper tail of the chi-square law.
double chi_square_sf(double statistic, std::size_t dof);

}  // namespace maxbv
