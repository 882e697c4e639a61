#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "maxbv/mc.hpp"

namespace maxbv {

/// The halfspace {x : <normal, x> > offset} in R^n.
struct HalfspaceSpec {
    std::vector<double> normal;
    double offset = 0.0;

    double normal_norm() const;
    /// Signed distance of the boundary hyperplane from the origin.
    double distance() const { return offset / normal_norm(); }
};

enum class SurfaceMethod { exact, tube, bridge_mc };
std::string to_string(SurfaceMethod m);

struct SurfaceMeasureEstimate {
    double value = 0.0;
    SurfaceMethod method = SurfaceMethod::exact;
    double error_bound = 0.0;
    std::size_t samples = 0;
    double std_error = 0.0;
};

double std_normal_pdf(double x);
double std_normal_cdf(double x);

/// Gaussian perimeter phi(offset / |normal|), reduced to one dimension by
/// rotational invariance.
SurfaceMeasureEstimate halfspace_perimeter(const HalfspaceSpec& spec);

/// |D_gamma I_{W_n > 0}|(A_n) = (2 pi)^{-1/2} P(bridge stays <= 0).
SurfaceMeasureEstimate restricted_perimeter_bridge(std::size_t n, std::size_t samples, SeedSpec seed,
                                                   unsigned workers = 1);

/// gamma(eps-tube around the boundary) / (2 eps) from samples in R^n.
/// error_bound = 3 std errors + the second-order tube bias bound phi(0) eps^2 / 6.
SurfaceMeasureEstimate tube_perimeter(const HalfspaceSpec& spec, double eps, std::size_t samples,
                                      SeedSpec seed, unsigned workers = 1);

/// Exact tube average minus the perimeter: (Phi(c+eps) - Phi(c-eps)) / (2 eps) - phi(c).
double tube_bias_exact(const HalfspaceSpec& spec, double eps);

struct OffbandMass {
    double fraction = 0.0;
    double std_error = 0.0;
    std::size_t tube_samples = 0;
    std::size_t samples = 0;
};

/// Among samples in the tube |X - t| < eps around the level set of
/// X = (x_1 + ... + x_n)/sqrt(n) at t = 0, the fraction with |X - t| > band.
OffbandMass concentration_offband_mass(std::size_t n, double eps, double band, std::size_t samples,
                                       SeedSpec seed, unsigned workers = 1);

}  // namespace maxbv
