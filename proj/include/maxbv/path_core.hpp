#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace maxbv {

/// Uniform grid t_i = i*T/n on [0, T].
class TimeGrid {
public:
    TimeGrid(std::size_t steps, double horizon);

    std::size_t steps() const { return steps_; }
    double horizon() const { return horizon_; }
    double dt() const { return horizon_ / static_cast<double>(steps_); }
    double time(std::size_t i) const;

    bool operator==(const TimeGrid&) const = default;

private:
    std::size_t steps_;
    double horizon_;
};

/// Brownian path sampled on a grid; values[0] == 0.
class DiscretePath {
public:
    DiscretePath(TimeGrid grid, std::vector<double> values);

    const TimeGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t steps() const { return grid_.steps(); }

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

struct SegmentMaxStat {
    std::size_t a = 0;
    std::size_t b = 0;
    double max_value = 0.0;
    std::size_t argmax_index = 0;  // first attainment
};

/// Left/right excesses around a split index t: the decomposition of
/// M_[t,T] - M_[0,t] used when conditioning on the two segment maxima.
struct DeltaStat {
    std::size_t t_index = 0;
    double delta = 0.0;         // right_excess - left_excess
    double left_excess = 0.0;   // M_[0,t] - W_t
    double right_excess = 0.0;  // M_[t,T] - W_t
};

/// Max over the inclusive index range [a, b] with the smallest attaining index.
SegmentMaxStat running_max(std::span<const double> values, std::size_t a, std::size_t b);
SegmentMaxStat running_max(const DiscretePath& path, std::size_t a, std::size_t b);

DeltaStat delta_stat(const DiscretePath& path, std::size_t t_index);

/// M minus the largest value at any other grid index (0 for exact ties).
double top_two_gap(std::span<const double> values);

/// Cameron-Martin direction with step-function density h' (one value per
/// grid interval) and its exact discrete primitive h.
class Direction {
public:
    Direction(TimeGrid grid, std::vector<double> density);

    static Direction constant(const TimeGrid& grid, double value);
    /// h' = 1 on intervals [t_i, t_{i+1}) contained in [from, to).
    static Direction indicator(const TimeGrid& grid, double from, double to);
    /// h' sampled at interval midpoints.
    template <class F>
    static Direction from_function(const TimeGrid& grid, F&& f) {
        std::vector<double> d(grid.steps());
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = f(0.5 * (grid.time(i) + grid.time(i + 1)));
        return Direction(grid, std::move(d));
    }

    const TimeGrid& grid() const { return grid_; }
    std::span<const double> density() const { return density_; }
    std::span<const double> primitive() const { return primitive_; }
    double at(std::size_t i) const { return primitive_[i]; }
    double sup_norm() const;

private:
    TimeGrid grid_;
    std::vector<double> density_;
    std::vector<double> primitive_;
};

/// <h', k'> in L^2(0, T) for step densities.
double inner_product(const Direction& h, const Direction& k);

/// Left-endpoint Wiener integral sum_i h'_i (w_{i+1} - w_i).
double wiener_integral(const Direction& h, const DiscretePath& path);

/// The shifted path w + eps * h.
DiscretePath bump(const DiscretePath& path, const Direction& h, double eps);

/// Smooth cylindrical functional g = phi(W_{t_1}, ..., W_{t_d}) drawn from a
/// closed catalog with analytic gradient and Hessian.
class CylindricalFunction {
public:
    enum class Kind {
        constant,        // phi = 1
        point,           // phi = x_1
        product,         // phi = x_1 x_2
        cubic,           // phi = x_1^2 x_2
        bump,            // phi = exp(-|x|^2 / 2)
        sigmoid_product  // phi = s(x_1) s(x_2), s the logistic function
    };

    CylindricalFunction(Kind kind, std::vector<std::size_t> points);

    static CylindricalFunction constant() { return {Kind::constant, {}}; }

    Kind kind() const { return kind_; }
    std::span<const std::size_t> points() const { return points_; }
    std::string id() const;

    double value(const DiscretePath& path) const;
    /// d_h g
    double derivative(const DiscretePath& path, const Direction& h) const;
    /// d_k d_h g
    double second_derivative(const DiscretePath& path, const Direction& k,
                             const Direction& h) const;

    /// phi, grad phi and Hessian at the coordinates x (size d).
    double phi(std::span<const double> x) const;
    void gradient(std::span<const double> x, std::span<double> out) const;
    void hessian(std::span<const double> x, std::span<double> out) const;  // row-major d x d

private:
    void gather(const DiscretePath& path, std::span<double> x) const;

    Kind kind_;
    std::vector<std::size_t> points_;
};

/// The enumerable catalog used by the adjoint checks; evaluation points are
/// placed at fixed fractions of the grid.
std::vector<CylindricalFunction> cylindrical_catalog(const TimeGrid& grid);

/// Fixed test directions: h' = 1, h' = 1 on [T/4, 3T/4), h' = cos(2 pi t / T).
std::vector<Direction> direction_catalog(const TimeGrid& grid);

/// d*_h g = d_h g - g * I(h)
double adjoint_apply(const CylindricalFunction& g, const Direction& h, const DiscretePath& path);

/// CSV with columns index,time,value. Directions write their primitive.
void write_csv(std::ostream& os, const DiscretePath& path);
void write_csv(std::ostream& os, const Direction& h);

}  // namespace maxbv
