#pragma once

#include <cstddef>
#include <vector>

#include "maxbv/quadrature.hpp"

namespace maxbv {

/// Density of the maximum of a Brownian path on an interval of the given
/// length (half-normal by reflection): 2 phi(y / sqrt(L)) / sqrt(L) for y >= 0.
double segment_max_density(double y, double length);

struct DensityCurve {
    std::vector<double> abscissae;
    std::vector<double> values;
    double total_mass_check = 0.0;  // trapezoid mass on the range + analytic tail
};

/// segment_max_density on `points` equispaced abscissae in [0, y_max].
DensityCurve segment_max_curve(double length, double y_max, std::size_t points);

/// Density l_t(0) of Delta_t M = M_[t,T] - M_[0,t] at 0, by quadrature of the
/// convolution of the two independent half-normal excesses.
QuadResult lt_zero(double t, double horizon);
/// sqrt(2 / (pi T)), the closed form of the same convolution.
double lt_zero_closed_form(double horizon);

struct TVBoundRow {
    std::size_t n = 0;
    double horizon = 1.0;
    double bound = 0.0;      // B(n), every 0 <= m < k <= n
    double interior = 0.0;   // 0 < m < k < n
    double remainder = 0.0;  // R(n): terms with m = 0 or k = n
};

/// Exact-factor bound on |D^2 M_n|(Omega):
/// B(n) = sqrt(T/n) sum_{0<=m<k<=n} sqrt(k-m) gamma(A_m) gamma(A_{n-k}) (2 pi)^{-1/2} / (k-m).
/// The double sum is OpenMP-parallel over m with an ordered reduction.
TVBoundRow tv_bound_discrete(std::size_t n, double horizon, unsigned workers = 1);
/// Straight serial double loop; reference for the parallel kernel.
TVBoundRow tv_bound_discrete_serial(std::size_t n, double horizon);

/// integral_0^1 dt integral_t^1 ds / sqrt(t (s - t) (1 - s)).
QuadResult limit_integral();
/// integral_t^1 ds / sqrt((s - t)(1 - s)).
QuadResult limit_inner_integral(double t);

/// sum_{0<m<k<n} n^-2 / sqrt((m/n)((k-m)/n)((n-k)/n)).
double limit_riemann_sum(std::size_t n, unsigned workers = 1);
double limit_riemann_sum_serial(std::size_t n);

struct AsymptoticMatch {
    std::size_t n = 0;
    double scaled = 0.0;        // sqrt(n) gamma(A_n)
    double limit = 0.0;         // 1 / sqrt(pi)
    double relative_gap = 0.0;  // |scaled / limit - 1|
};

AsymptoticMatch asymptotic_match(std::size_t n);

}  // namespace maxbv
