#pragma once

#include <cstddef>
#include <functional>

namespace maxbv {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
    bool converged = false;
};

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    std::size_t max_intervals = 2000;
};

/// Globally adaptive Gauss-Kronrod (7/15 point) on a finite interval: the
/// interval with the largest error estimate is bisected until the total
/// estimate meets max(abs_tol, rel_tol * |value|).
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt = {});

/// Integral over [a, infinity) via y = a + u / (1 - u).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, const QuadOptions& opt = {});

}  // namespace maxbv
