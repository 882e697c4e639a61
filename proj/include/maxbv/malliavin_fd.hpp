#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "maxbv/mc.hpp"
#include "maxbv/path_core.hpp"

namespace maxbv {

using PathFunctional = std::function<double(const DiscretePath&)>;

namespace functionals {
PathFunctional terminal_value();
PathFunctional running_maximum();
/// sigma: time of the first global maximum.
PathFunctional argmax_time();
PathFunctional constant(double c);
}  // namespace functionals

enum class FdScheme { central };

struct FDConfig {
    double eps = 1e-5;
    FdScheme scheme = FdScheme::central;
    double tolerance = 1e-6;

    /// 1e-5 sqrt(T) for first differences.
    static FDConfig first_order(double horizon);
    /// 2^-10 sqrt(T) (about 1e-3 sqrt(T)) for second differences; a power of two
    /// keeps bump arithmetic exact on dyadic grids.
    static FDConfig second_order(double horizon);
};

/// (F(w + eps h) - F(w - eps h)) / (2 eps)
double fd_directional(const PathFunctional& f, const DiscretePath& path, const Direction& h,
                      const FDConfig& cfg);

/// (F(+h+k) - F(+h-k) - F(-h+k) + F(-h-k)) / (4 eps^2)
double fd_second(const PathFunctional& f, const DiscretePath& path, const Direction& h,
                 const Direction& k, const FDConfig& cfg);

/// Paths whose top-two gap is at most this are excluded from FD checks.
double tie_gap_threshold(const FDConfig& cfg, double bump_sup_norm);
/// Every bump w +- eps h +- eps k moves each value by at most
/// eps (|h| + |k|), so a top-two gap above twice that keeps the argmax fixed.
double second_difference_gap_threshold(const FDConfig& cfg, const Direction& h, const Direction& k);

struct GradMaxCheck {
    std::size_t samples = 0;
    std::size_t evaluated = 0;
    std::size_t excluded = 0;
    std::size_t passed = 0;
    double max_abs_error = 0.0;
    double fraction() const { return evaluated ? double(passed) / double(evaluated) : 0.0; }
};

/// Fraction of sampled paths with |fd_directional(M, h) - h(sigma)| <= tolerance.
GradMaxCheck verify_grad_max(const TimeGrid& grid, const Direction& h, std::size_t samples,
                             SeedSpec seed, const FDConfig& cfg, unsigned workers = 1);

struct ZeroCheck {
    std::size_t samples = 0;
    std::size_t evaluated = 0;
    std::size_t excluded = 0;
    std::size_t exact_zero = 0;
    double fraction() const { return evaluated ? double(exact_zero) / double(evaluated) : 0.0; }
};

/// Counts paths on which fd_second(M, h, k) == 0 exactly, excluding paths
/// below second_difference_gap_threshold. Paths are rounded
/// to multiples of `quantum` (0 disables) so that, together with a dyadic grid
/// and a power-of-two eps, every bumped value is computed without rounding.
ZeroCheck verify_second_difference_zero(const TimeGrid& grid, const Direction& h, const Direction& k,
                                        std::size_t samples, SeedSpec seed, const FDConfig& cfg,
                                        double quantum = 0x1.0p-32, unsigned workers = 1);

/// Path on 8 steps of [0, 1] whose maximum 1 is attained at indices 2 and 4.
DiscretePath tied_peak_path();
/// Direction with h(t_2) = 0 and h(t_4) = 1 on the grid of tied_peak_path().
Direction tied_peak_direction();

/// d*_k(d*_h g) = d_k d_h g - d_k g I(h) - g <k', h'> - I(k) (d_h g - g I(h)).
double skorokhod_second_adjoint(const CylindricalFunction& g, const Direction& k, const Direction& h,
                                const DiscretePath& path);

/// E[M d*_k(d*_h g)], the pairing of D^2 M with g k' (x) h'.
MCEstimate d2m_weak_estimator(const CylindricalFunction& g, const Direction& k, const Direction& h,
                              const TimeGrid& grid, std::size_t samples, SeedSpec seed,
                              unsigned workers = 1);

enum class KernelKind { triangular, gaussian };

struct KernelConfig {
    double bandwidth = 0.0;  // <= 0 selects samples^{-1/5} * std(Delta)
    KernelKind kernel = KernelKind::triangular;
    double target = 0.0;
};

/// K(x / b) / b for the normalised kernel.
double kernel_weight(KernelKind kind, double x, double bandwidth);

struct ChainMaxEstimate {
    MCEstimate estimate;        // bandwidth b
    MCEstimate half_bandwidth;  // bandwidth b/2
    double bandwidth = 0.0;
    double bias_diagnostic = 0.0;  // |estimate(b) - estimate(b/2)|
    std::size_t effective_samples = 0;
    bool flagged = false;  // fewer than 100 effective samples
};

/// Unnormalised Nadaraya-Watson average of g (h(sigma_[t,T]) - h(sigma_[0,t])) K_b(Delta_t M),
/// estimating l_t(0) E[g (h(sigma_[t,T]) - h(sigma_[0,t])) | Delta_t M = 0].
ChainMaxEstimate chain_max_estimator(const CylindricalFunction& g, const Direction& h,
                                     std::size_t t_index, const TimeGrid& grid, const KernelConfig& kcfg,
                                     std::size_t samples, SeedSpec seed, unsigned workers = 1);

/// The chain-max right-hand side integrated against h'(t) dt over every grid
/// interval: for t in (t_j, t_{j+1}) the split is [0..j] | [j+1..n], which is
/// the exact discrete counterpart of d_t M = 1{sigma > t}. Estimates the same
/// quantity as d2m_weak_estimator(g, k, h).
ChainMaxEstimate chain_max_integrated(const CylindricalFunction& g, const Direction& k,
                                      const Direction& h, const TimeGrid& grid, const KernelConfig& kcfg,
                                      std::size_t samples, SeedSpec seed, unsigned workers = 1);

/// Default bandwidth from a pilot run: samples^{-1/5} * std(Delta_t M).
double default_bandwidth(const TimeGrid& grid, std::size_t t_index, std::size_t samples, SeedSpec seed);

struct CrossCheckRow {
    std::string g_id;
    MCEstimate weak;
    MCEstimate chain;       // bandwidth b
    MCEstimate chain_half;  // bandwidth b/2
    double bandwidth = 0.0;
    double bias_diagnostic() const { return std::abs(chain.mean - chain_half.mean); }
};

/// Weak and integrated chain-max estimators for several g on common paths.
std::vector<CrossCheckRow> d2m_cross_check(const std::vector<CylindricalFunction>& gs, const Direction& k,
                                           const Direction& h, const TimeGrid& grid,
                                           const KernelConfig& kcfg, std::size_t samples, SeedSpec seed,
                                           unsigned workers = 1);

struct SigmaCheck {
    double sigma = 0.0;
    double riemann_sigma = 0.0;  // sum_i 1{sigma > t_i} dt
    bool consistent = false;     // within one grid cell
};

SigmaCheck sigma_functional(const DiscretePath& path);

/// Fraction of paths on which fd_directional(sigma, h) is exactly 0 (gap rule applied).
ZeroCheck verify_sigma_fd(const TimeGrid& grid, const Direction& h, std::size_t samples, SeedSpec seed,
                          const FDConfig& cfg, unsigned workers = 1);

}  // namespace maxbv
