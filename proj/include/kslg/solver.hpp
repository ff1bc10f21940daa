/// @file solver.hpp
/// @brief IMEX finite-volume integrator for the truncated chemotaxis-logistic
/// system with zero-flux boundaries.
///
/// One step, in order:
///   1. v:  (1 + dt) v' - dt L v' = v + dt u            (CG)
///   2. u*: explicit donor-cell chemotaxis flux f_eps(u_upwind) * chi * grad v
///   3. u**: (I - dt L) u** = u*                        (CG)
///   4. u': u** (1 + dt lambda+) / (1 + dt (lambda- + mu u**^(kappa-1)))
/// L is the face-difference Laplacian, so every transport term telescopes and
/// only step 4 changes the total mass.

#pragma once

#include "kslg/grid.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace kslg {

class StabilityViolation : public std::runtime_error {
public:
    StabilityViolation(double dt, double bound);
    double dt;
    double bound;
};

class BlowUp : public std::runtime_error {
public:
    BlowUp(double t, const std::string& what);
    double t;
};

enum class Cutoff { quintic, linear };

/// 6x^5 - 15x^4 + 10x^3 clamped to [0, 1].
double smoothstep5(double x);

/// f_eps(s) = s for eps*s <= 1, s*sigma(2 - eps*s) in between, 0 for eps*s >= 2.
/// `linear` replaces sigma by the identity ramp (continuous, not C^1).
double f_eps(double s, double eps, Cutoff cutoff = Cutoff::quintic);

struct TruncationSpec {
    double epsilon = 1.0;
    Cutoff cutoff = Cutoff::quintic;

    double operator()(double s) const { return f_eps(s, epsilon, cutoff); }
};

struct State {
    Field u;
    Field v;
    double t = 0.0;
};

enum class DtPolicy { fixed, adaptive };

struct TimeStepping {
    DtPolicy policy = DtPolicy::fixed;
    double dt = 1e-3;     ///< fixed step, or the initial step for `adaptive`
    double cfl = 0.45;
};

struct RunConfig {
    GridSpec grid;
    CoefficientField coefficients;
    double kappa = 2.0;
    TruncationSpec truncation;
    double chi = 1.0;  ///< chemotactic sensitivity, 1 for the model itself
    Field u0;
    Field v0;
    double T = 1.0;
    TimeStepping time;
    double cg_tol = 1e-10;

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
};

struct StepInfo {
    double dt = 0.0;
    /// dt * production - dt * damping is the exact change of total u mass,
    /// up to the linear-solver residual and `clipped`.
    double production = 0.0;  ///< integral of lambda+ u** - lambda- u'
    double damping = 0.0;     ///< integral of mu u**^(kappa-1) u'
    double clipped = 0.0;     ///< mass added by zeroing solver round-off negatives
    int cg_iterations_v = 0;
    int cg_iterations_u = 0;
};

/// Largest dt for which the donor-cell chemotaxis update keeps u >= 0:
/// cfl / sum_axis (max |chi grad v| on axis faces / h_axis). Infinite when
/// grad v vanishes.
double stability_bound(const Field& v, double chi, double cfl);

/// (L f)_c with zero boundary flux.
Field apply_laplacian(const Field& f);

struct CgResult {
    int iterations = 0;
    double residual = 0.0;  ///< final ||r|| / ||rhs||
};

/// Solves a x - b L x = rhs in place, starting from the incoming x.
CgResult solve_shifted(double a, double b, const Field& rhs, Field& x, double tol, int max_iterations = 10000);

/// Advances one step. Throws StabilityViolation when dt exceeds the bound for
/// `cfg.time.cfl`, BlowUp on nonfinite values or values above 1e12.
State step(const State& state, const RunConfig& cfg, double dt, StepInfo* info = nullptr);

/// Called with the initial state (info == nullptr) and after every step.
using StepObserver = std::function<void(const State&, const StepInfo*)>;

struct RunOutcome {
    State final_state;
    std::size_t steps = 0;
    bool completed = false;
    std::string failure;  ///< empty when completed
    double max_u = 0.0;   ///< max over all cells and all time levels
};

/// Integrates from (u0, v0) at t = 0 to T. Step errors end the run early with
/// completed = false and the last good state; a fixed dt that violates the
/// stability bound is reported the same way.
RunOutcome run(const RunConfig& cfg, const StepObserver& observer = {});

}  // namespace kslg
