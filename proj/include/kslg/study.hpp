/// @file study.hpp
/// @brief Epsilon continuation of the truncated system and self-convergence
/// under simultaneous grid and time-step refinement.

#pragma once

#include "kslg/exponents.hpp"
#include "kslg/problem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kslg {

struct SweepSpec {
    RunConfig base;  ///< the truncation epsilon is overwritten per schedule entry
    exponents::ParamConfig params;  ///< selects the mixed norm (p~, kappa~)
    double epsilon0 = 1.0;
    int levels = 4;             ///< K: entries epsilon0 2^-k for k = 0..K
    std::size_t sample_every = 1;  ///< stride of the time levels kept for the norms

    std::vector<double> schedule() const;
    /// Throws std::invalid_argument: fixed dt policy, epsilon0 in (0, 1],
    /// levels >= 0, params consistent with base.kappa.
    void validate() const;
};

struct SweepEntry {
    int k = 0;
    double epsilon = 0.0;
    bool completed = false;
    std::string failure;
    double max_u = 0.0;         ///< max over t and x
    bool trunc_inactive = false;  ///< max_u <= 1/epsilon
    double wallclock_s = 0.0;
};

/// Differences between entries k and k+1; NaN when either run failed.
struct SweepPair {
    int k = 0;
    double grad_v_diff_L2 = 0.0;  ///< || grad v_k - grad v_k+1 ||_{L2(Omega x (0,T))}
    double u_diff_mixed = 0.0;    ///< || u_k - u_k+1 ||_{L^kappa~((0,T); L^p~)}
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    std::vector<SweepPair> pairs;
    std::optional<int> onset;  ///< first k with trunc_inactive
    Rational p_tilde;
    Rational kappa_tilde;
    /// k of active pairs (k < onset) whose grad v difference exceeds that of
    /// pair k-1. Flagged only; subsequences are all that convergence promises.
    std::vector<int> nonmonotone;

    /// True when the last `count` active pairs exist and have nonincreasing
    /// grad v differences.
    bool tail_nonincreasing(int count) const;
};

struct Trajectory;

/// Norms of the differences of two trajectories recorded at identical time
/// levels (NaN otherwise); trapezoidal in time.
SweepPair compare_trajectories(int k, const Trajectory& a, const Trajectory& b, double p_tilde, double kappa_tilde);

/// Runs the schedule on a bounded worker pool; results in schedule order.
SweepReport epsilon_sweep(const SweepSpec& spec);

/// Header k,epsilon,grad_v_diff_L2,u_diff_mixed,trunc_inactive,wallclock_s.
/// Row k carries the pair (k, k+1); the last row leaves both differences
/// empty. Wallclock is written as 0 unless requested, keeping the file
/// reproducible byte for byte.
std::string sweep_csv(const SweepReport& report, bool with_wallclock = false);

struct RefinementLevel {
    int level = 0;
    GridSpec grid;
    double dt = 0.0;
    bool completed = false;
    std::string failure;
    Field u_final;
};

struct RefinementReport {
    std::vector<RefinementLevel> levels;
    std::vector<double> differences;  ///< L1 norm of u_l(T) - restricted u_l+1(T)
    std::vector<double> orders;       ///< log2 of successive difference ratios
    bool exact = false;               ///< all differences negligible
    bool monotone = true;             ///< differences strictly decreasing
    double observed_order = 0.0;      ///< orders.back()

    /// exact, or monotone with observed_order >= min_order.
    bool passes(double min_order = 0.8) const;
    std::string summary() const;
};

/// Averages the 2 (1D) or 4 (2D) children of each coarse cell.
Field restrict_to(const Field& fine, const GridSpec& coarse);

/// Solves `problem` on `levels` >= 3 grids, each halving h and dt, in
/// parallel. Throws std::invalid_argument for fewer than three levels or an
/// adaptive time policy.
RefinementReport refinement_study(const ProblemSpec& problem, int levels);

std::string refinement_csv(const RefinementReport& report);

}  // namespace kslg
