#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "maxbv/malliavin_fd.hpp"
#include "maxbv/mc.hpp"
#include "maxbv/path_core.hpp"

namespace maxbv {

/// Per-path statistics around the split index t.
struct ConditionedSample {
    DeltaStat delta;
    double max_value = 0.0;
    std::size_t sigma_index = 0;
    std::size_t left_argmax = 0;   // sigma_[0,t]
    std::size_t right_argmax = 0;  // sigma_[t,T]
    double top_gap = 0.0;
    double kernel_weight = 0.0;  // window kernel 1{|Delta_t M| < eps}
};

ConditionedSample condition_stats(const DiscretePath& path, std::size_t t_index, double eps);

struct TieStats {
    std::size_t samples = 0;
    std::size_t exact_ties = 0;
    std::vector<double> deltas;               // in path units (multiples of sqrt(T))
    std::vector<std::size_t> below;           // #{G_n < delta}
    std::vector<double> fractions() const;
};

/// Exact ties of the discrete maximum and the small-gap profile of the top-two gap G_n.
TieStats unique_max_check(const TimeGrid& grid, std::size_t samples, SeedSpec seed,
                          const std::vector<double>& delta_multipliers = {1e-1, 1e-2, 1e-3, 1e-4},
                          unsigned workers = 1);

struct ExcessLadder {
    double eps = 0.0;
    std::vector<double> deltas;
    std::vector<MCEstimate> estimates;  // P(min excess < delta | |Delta_t M| < eps)
    std::size_t conditioned = 0;
    std::size_t samples = 0;
    std::size_t split_atoms = 0;  // excluded: W_t is the global maximum
    bool flagged = false;  // fewer than 100 conditioned samples
};

ExcessLadder excess_conditional(std::size_t t_index, double eps, const std::vector<double>& deltas,
                                const TimeGrid& grid, std::size_t samples, SeedSpec seed, unsigned workers = 1);

struct WitnessSummary {
    double eps = 0.0;
    double delta = 0.0;
    std::size_t samples = 0;
    std::size_t conditioned = 0;
    std::size_t split_atoms = 0;  // excluded: W_t is the global maximum
    std::size_t both_excess = 0;
    MCEstimate fraction;  // P(left > delta and right > delta | |Delta_t M| < eps)
    std::size_t separation_violations = 0;  // both > delta but not sigma_L < t < sigma_R
    std::vector<std::pair<double, double>> scatter;  // (left_excess, right_excess), first samples in order
};

WitnessSummary double_max_witness(std::size_t t_index, double eps, double delta, const TimeGrid& grid,
                                  std::size_t samples, SeedSpec seed, std::size_t scatter_limit = 10000,
                                  unsigned workers = 1);

/// Both-excess fractions along an eps ladder and excess_conditional along a
/// delta ladder, all from one pass over the same paths.
///
/// On a grid, Delta_t M has an atom at 0 from paths whose global maximum sits
/// exactly at the split index (probability gamma(A_j) gamma(A_{n-j}), zero in
/// the continuum). Those paths are left out of every conditioned set and
/// counted in split_atoms.
struct ConcentrationSweep {
    std::vector<WitnessSummary> witnesses;  // one per eps
    ExcessLadder ladder;                    // at ladder_eps
};

ConcentrationSweep concentration_sweep(std::size_t t_index, const std::vector<double>& eps_ladder, double delta,
                                       double ladder_eps, const std::vector<double>& deltas, const TimeGrid& grid,
                                       std::size_t samples, SeedSpec seed, unsigned workers = 1);

struct DeltaDensityEstimate {
    MCEstimate estimate;
    double bandwidth = 0.0;
    std::size_t effective_samples = 0;  // samples with non-zero kernel weight
};

/// Kernel density estimate of Delta_t M at kcfg.target.
DeltaDensityEstimate delta_density(const TimeGrid& grid, std::size_t t_index, const KernelConfig& kcfg,
                                   std::size_t samples, SeedSpec seed, unsigned workers = 1);

}  // namespace maxbv
