#include "maxbv/path_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "maxbv/csv.hpp"

namespace maxbv {

TimeGrid::TimeGrid(std::size_t steps, double horizon) : steps_(steps), horizon_(horizon) {
    if (steps == 0) throw std::invalid_argument("TimeGrid: steps must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("TimeGrid: horizon must be positive and finite");
}

double TimeGrid::time(std::size_t i) const {
    if (i == steps_) return horizon_;
    return static_cast<double>(i) * horizon_ / static_cast<double>(steps_);
}

DiscretePath::DiscretePath(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.steps() + 1)
        throw std::invalid_argument("DiscretePath: expected n+1 values");
    if (values_[0] != 0.0) throw std::invalid_argument("DiscretePath: w_0 must be 0");
}

SegmentMaxStat running_max(std::span<const double> values, std::size_t a, std::size_t b) {
    if (a > b || b >= values.size())
        throw std::out_of_range("running_max: need 0 <= a <= b <= n");
    SegmentMaxStat s{a, b, values[a], a};
    for (std::size_t i = a + 1; i <= b; ++i) {
        if (values[i] > s.max_value) {
            s.max_value = values[i];
            s.argmax_index = i;
        }
    }
    return s;
}

SegmentMaxStat running_max(const DiscretePath& path, std::size_t a, std::size_t b) {
    return running_max(path.values(), a, b);
}

DeltaStat delta_stat(const DiscretePath& path, std::size_t t_index) {
    const std::size_t n = path.steps();
    if (t_index > n) throw std::out_of_range("delta_stat: t_index > n");
    const double wt = path[t_index];
    const double left = running_max(path, 0, t_index).max_value - wt;
    const double right = running_max(path, t_index, n).max_value - wt;
    return {t_index, right - left, left, right};
}

double top_two_gap(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("top_two_gap: need at least two values");
    const auto top = running_max(values, 0, values.size() - 1);
    double second = -INFINITY;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (i != top.argmax_index) second = std::max(second, values[i]);
    return top.max_value - second;
}

Direction::Direction(TimeGrid grid, std::vector<double> density)
    : grid_(grid), density_(std::move(density)), primitive_(grid_.steps() + 1, 0.0) {
    if (density_.size() != grid_.steps())
        throw std::invalid_argument("Direction: expected one density value per interval");
    const double dt = grid_.dt();
    for (std::size_t i = 0; i < density_.size(); ++i) {
        if (!std::isfinite(density_[i])) throw std::invalid_argument("Direction: non-finite density");
        primitive_[i + 1] = primitive_[i] + density_[i] * dt;
    }
}

Direction Direction::constant(const TimeGrid& grid, double value) {
    return Direction(grid, std::vector<double>(grid.steps(), value));
}

Direction Direction::indicator(const TimeGrid& grid, double from, double to) {
    const double n = static_cast<double>(grid.steps());
    const auto lo = static_cast<long>(std::ceil(from / grid.horizon() * n - 1e-9));
    const auto hi = static_cast<long>(std::floor(to / grid.horizon() * n + 1e-9));
    std::vector<double> d(grid.steps(), 0.0);
    for (long i = std::max(lo, 0L); i < std::min(hi, static_cast<long>(grid.steps())); ++i)
        d[static_cast<std::size_t>(i)] = 1.0;
    return Direction(grid, std::move(d));
}

double Direction::sup_norm() const {
    double s = 0.0;
    for (double v : primitive_) s = std::max(s, std::abs(v));
    return s;
}

namespace {

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

constexpr std::size_t kMaxArity = 2;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double inner_product(const Direction& h, const Direction& k) {
    require_same_grid(h.grid(), k.grid(), "inner_product");
    double s = 0.0;
    for (std::size_t i = 0; i < h.density().size(); ++i) s += h.density()[i] * k.density()[i];
    return s * h.grid().dt();
}

double wiener_integral(const Direction& h, const DiscretePath& path) {
    require_same_grid(h.grid(), path.grid(), "wiener_integral");
    const auto w = path.values();
    double s = 0.0;
    for (std::size_t i = 0; i < h.density().size(); ++i) s += h.density()[i] * (w[i + 1] - w[i]);
    return s;
}

DiscretePath bump(const DiscretePath& path, const Direction& h, double eps) {
    require_same_grid(h.grid(), path.grid(), "bump");
    if (!std::isfinite(eps)) throw std::invalid_argument("bump: eps must be finite");
    std::vector<double> v(path.values().begin(), path.values().end());
    const auto p = h.primitive();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += eps * p[i];
    return DiscretePath(path.grid(), std::move(v));
}

CylindricalFunction::CylindricalFunction(Kind kind, std::vector<std::size_t> points)
    : kind_(kind), points_(std::move(points)) {
    std::size_t arity = 0;
    switch (kind_) {
        case Kind::constant: arity = 0; break;
        case Kind::point: arity = 1; break;
        case Kind::product:
        case Kind::cubic:
        case Kind::sigmoid_product: arity = 2; break;
        case Kind::bump:
            if (points_.empty() || points_.size() > kMaxArity)
                throw std::invalid_argument("CylindricalFunction: bump takes 1 or 2 points");
            arity = points_.size();
            break;
    }
    if (points_.size() != arity)
        throw std::invalid_argument("CylindricalFunction: wrong number of evaluation points");
}

std::string CylindricalFunction::id() const {
    static constexpr std::array names{"const", "point", "product", "cubic", "bump", "sigmoid"};
    std::ostringstream os;
    os << names[static_cast<std::size_t>(kind_)];
    if (!points_.empty()) {
        os << '[';
        for (std::size_t i = 0; i < points_.size(); ++i) os << (i ? "," : "") << points_[i];
        os << ']';
    }
    return os.str();
}

double CylindricalFunction::phi(std::span<const double> x) const {
    switch (kind_) {
        case Kind::constant: return 1.0;
        case Kind::point: return x[0];
        case Kind::product: return x[0] * x[1];
        case Kind::cubic: return x[0] * x[0] * x[1];
        case Kind::bump: {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return std::exp(-0.5 * r2);
        }
        case Kind::sigmoid_product: return logistic(x[0]) * logistic(x[1]);
    }
    return 0.0;
}

void CylindricalFunction::gradient(std::span<const double> x, std::span<double> out) const {
    switch (kind_) {
        case Kind::constant: break;
        case Kind::point: out[0] = 1.0; break;
        case Kind::product:
            out[0] = x[1];
            out[1] = x[0];
            break;
        case Kind::cubic:
            out[0] = 2.0 * x[0] * x[1];
            out[1] = x[0] * x[0];
            break;
        case Kind::bump: {
            const double p = phi(x);
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i] * p;
            break;
        }
        case Kind::sigmoid_product: {
            const double s0 = logistic(x[0]), s1 = logistic(x[1]);
            out[0] = s0 * (1.0 - s0) * s1;
            out[1] = s0 * s1 * (1.0 - s1);
            break;
        }
    }
}

void CylindricalFunction::hessian(std::span<const double> x, std::span<double> out) const {
    const std::size_t d = points_.size();
    std::fill(out.begin(), out.end(), 0.0);
    switch (kind_) {
        case Kind::constant:
        case Kind::point: break;
        case Kind::product:
            out[1] = out[2] = 1.0;
            break;
        case Kind::cubic:
            out[0] = 2.0 * x[1];
            out[1] = out[2] = 2.0 * x[0];
            break;
        case Kind::bump: {
            const double p = phi(x);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    out[i * d + j] = (x[i] * x[j] - (i == j ? 1.0 : 0.0)) * p;
            break;
        }
        case Kind::sigmoid_product: {
            const double s0 = logistic(x[0]), s1 = logistic(x[1]);
            const double d0 = s0 * (1.0 - s0), d1 = s1 * (1.0 - s1);
            out[0] = d0 * (1.0 - 2.0 * s0) * s1;
            out[1] = out[2] = d0 * d1;
            out[3] = s0 * d1 * (1.0 - 2.0 * s1);
            break;
        }
    }
}

void CylindricalFunction::gather(const DiscretePath& path, std::span<double> x) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i] > path.steps())
            throw std::out_of_range("CylindricalFunction: evaluation point beyond grid");
        x[i] = path[points_[i]];
    }
}

double CylindricalFunction::value(const DiscretePath& path) const {
    std::array<double, kMaxArity> x{};
    gather(path, std::span(x).first(points_.size()));
    return phi(std::span<const double>(x).first(points_.size()));
}

double CylindricalFunction::derivative(const DiscretePath& path, const Direction& h) const {
    require_same_grid(h.grid(), path.grid(), "CylindricalFunction::derivative");
    const std::size_t d = points_.size();
    std::array<double, kMaxArity> x{}, g{};
    gather(path, std::span(x).first(d));
    gradient(std::span<const double>(x).first(d), std::span(g).first(d));
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a) s += g[a] * h.at(points_[a]);
    return s;
}

double CylindricalFunction::second_derivative(const DiscretePath& path, const Direction& k,
                                              const Direction& h) const {
    require_same_grid(h.grid(), path.grid(), "CylindricalFunction::second_derivative");
    require_same_grid(k.grid(), path.grid(), "CylindricalFunction::second_derivative");
    const std::size_t d = points_.size();
    std::array<double, kMaxArity> x{};
    std::array<double, kMaxArity * kMaxArity> hess{};
    gather(path, std::span(x).first(d));
    hessian(std::span<const double>(x).first(d), std::span(hess).first(d * d));
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) s += hess[a * d + b] * k.at(points_[a]) * h.at(points_[b]);
    return s;
}

std::vector<CylindricalFunction> cylindrical_catalog(const TimeGrid& grid) {
    using K = CylindricalFunction::Kind;
    const std::size_t n = grid.steps();
    const auto at = [n](std::size_t num, std::size_t den) { return std::max<std::size_t>(1, n * num / den); };
    return {
        {K::constant, {}},
        {K::point, {at(1, 2)}},
        {K::product, {at(1, 4), at(3, 4)}},
        {K::cubic, {at(1, 3), n}},
        {K::bump, {at(1, 2), n}},
        {K::sigmoid_product, {at(1, 4), n}},
    };
}

std::vector<Direction> direction_catalog(const TimeGrid& grid) {
    const double T = grid.horizon();
    return {
        Direction::constant(grid, 1.0),
        Direction::indicator(grid, 0.25 * T, 0.75 * T),
        Direction::from_function(grid, [T](double t) { return std::cos(2.0 * std::numbers::pi * t / T); }),
    };
}

double adjoint_apply(const CylindricalFunction& g, const Direction& h, const DiscretePath& path) {
    return g.derivative(path, h) - g.value(path) * wiener_integral(h, path);
}

void write_csv(std::ostream& os, const DiscretePath& path) {
    CsvWriter csv(os);
    csv.row("index", "time", "value");
    for (std::size_t i = 0; i <= path.steps(); ++i) csv.row(i, path.grid().time(i), path[i]);
}

void write_csv(std::ostream& os, const Direction& h) {
    CsvWriter csv(os);
    csv.row("index", "time", "value");
    for (std::size_t i = 0; i <= h.grid().steps(); ++i) csv.row(i, h.grid().time(i), h.at(i));
}

}  // namespace maxbv
