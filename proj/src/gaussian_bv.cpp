#include "maxbv/gaussian_bv.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "maxbv/fluctuation.hpp"

namespace maxbv {

double HalfspaceSpec::normal_norm() const {
    double s = 0.0;
    for (double v : normal) s += v * v;
    return std::sqrt(s);
}

std::string to_string(SurfaceMethod m) {
    switch (m) {
        case SurfaceMethod::exact: return "exact";
        case SurfaceMethod::tube: return "tube";
        case SurfaceMethod::bridge_mc: return "bridge-MC";
    }
    return "?";
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

void validate(const HalfspaceSpec& spec) {
    if (spec.normal.empty() || !(spec.normal_norm() > 0.0))
        throw std::invalid_argument("HalfspaceSpec: normal must be non-zero");
    if (std::isnan(spec.offset)) throw std::invalid_argument("HalfspaceSpec: offset is NaN");
}

}  // namespace

SurfaceMeasureEstimate halfspace_perimeter(const HalfspaceSpec& spec) {
    validate(spec);
    const double c = spec.distance();
    return {std::isfinite(c) ? std_normal_pdf(c) : 0.0, SurfaceMethod::exact, 0.0, 0, 0.0};
}

SurfaceMeasureEstimate restricted_perimeter_bridge(std::size_t n, std::size_t samples, SeedSpec seed,
                                                   unsigned workers) {
    const auto p = mc_bridge_stay_prob(n, samples, seed, workers);
    const double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return {scale * p.mean, SurfaceMethod::bridge_mc, 3.0 * scale * p.std_error, p.samples,
            scale * p.std_error};
}

double tube_bias_exact(const HalfspaceSpec& spec, double eps) {
    validate(spec);
    const double c = spec.distance();
    return (std_normal_cdf(c + eps) - std_normal_cdf(c - eps)) / (2.0 * eps) - std_normal_pdf(c);
}

SurfaceMeasureEstimate tube_perimeter(const HalfspaceSpec& spec, double eps, std::size_t samples,
                                      SeedSpec seed, unsigned workers) {
    validate(spec);
    if (!(eps > 0.0)) throw std::invalid_argument("tube_perimeter: eps must be > 0");
    const double norm = spec.normal_norm();
    const double c = spec.distance();
    const auto hit = mc_run(
        [&](Rng& rng) {
            double u = 0.0;
            for (double a : spec.normal) u += a * rng.normal();
            return std::abs(u / norm - c) < eps ? 1.0 : 0.0;
        },
        samples, workers, seed);
    const double scale = 1.0 / (2.0 * eps);
    const double bias_bound = std_normal_pdf(0.0) * eps * eps / 6.0;
    return {scale * hit.mean, SurfaceMethod::tube, 3.0 * scale * hit.std_error + bias_bound, hit.samples,
            scale * hit.std_error};
}

namespace {

struct OffbandAcc {
    std::size_t tube = 0;
    std::size_t off = 0;
    void merge(const OffbandAcc& o) {
        tube += o.tube;
        off += o.off;
    }
};

}  // namespace

OffbandMass concentration_offband_mass(std::size_t n, double eps, double band, std::size_t samples,
                                       SeedSpec seed, unsigned workers) {
    if (n == 0) throw std::invalid_argument("concentration_offband_mass: n must be >= 1");
    if (!(eps > 0.0) || !(band > 0.0))
        throw std::invalid_argument("concentration_offband_mass: eps and band must be > 0");
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const auto acc = mc_reduce(samples, workers, seed, OffbandAcc{}, [&](OffbandAcc& a, Rng& rng, std::size_t) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += rng.normal();
        const double x = std::abs(s * inv_sqrt_n);
        if (x < eps) {
            ++a.tube;
            if (x > band) ++a.off;
        }
        return true;
    });
    OffbandMass out;
    out.samples = samples;
    out.tube_samples = acc.tube;
    if (acc.tube > 0) {
        const double p = static_cast<double>(acc.off) / static_cast<double>(acc.tube);
        out.fraction = p;
        out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(acc.tube));
    }
    return out;
}

}  // namespace maxbv
