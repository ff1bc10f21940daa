/// @file weakcheck.hpp
/// @brief Residuals of the generalized-solution relations on a discrete
/// trajectory, tested against a finite family of smooth test functions.
///
/// Three relations are checked:
///   mass_subsolution   int u(T) - int u0 - int_0^T int lambda u + int_0^T int mu u^kappa <= tol
///   log_supersolution  the weak inequality for ln(u+1), slack = left - right >= -tol
///   v_weak             |weak form of the v equation| <= tol
/// Space integrals use cell centers for undifferentiated terms and interior
/// face midpoints for gradient terms; time integrals are trapezoidal over the
/// recorded time levels.

#pragma once

#include "kslg/solver.hpp"

#include <array>
#include <string>
#include <vector>

namespace kslg {

struct Trajectory {
    std::vector<State> states;  ///< increasing times, states.front() is the initial datum
    CoefficientField coefficients;
    double kappa = 2.0;

    /// Largest gap between recorded time levels.
    double max_dt() const;
    /// Throws std::invalid_argument when empty, unordered or off-grid.
    void validate() const;
};

/// Observer that appends every `stride`-th state (and always the first).
class TrajectoryRecorder {
public:
    TrajectoryRecorder(const RunConfig& cfg, std::size_t stride = 1);
    void operator()(const State& state, const StepInfo* info);
    /// Appends the last observed state if the stride skipped it.
    Trajectory finish();

private:
    Trajectory traj_;
    std::size_t stride_;
    std::size_t seen_ = 0;
    State last_;
};

/// Quintic bump sigma(1 - |xi|) per axis, xi = (x - center)/halfwidth, or
/// identically one when `constant`.
struct SpatialBump {
    bool constant = true;
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> halfwidth{1.0, 1.0};

    double value(double x, double y, int dim) const;
    std::array<double, 2> gradient(double x, double y, int dim) const;
};

/// sigma(1 - |t - center|/halfwidth) restricted to t >= 0.
struct TimeProfile {
    double center = 0.0;
    double halfwidth = 1.0;

    double value(double t) const;
    double derivative(double t) const;
    double support_end() const { return center + halfwidth; }
};

/// phi(x, t) = sum_k amplitude_k B_k(x) tau_k(t).
struct TestFunction {
    struct Term {
        double amplitude = 1.0;
        SpatialBump space;
        TimeProfile time;
    };
    std::string id;
    std::vector<Term> terms;

    static TestFunction product(std::string id, const SpatialBump& b, const TimeProfile& tau);
    TestFunction scaled(double a) const;
    TestFunction plus(const TestFunction& other) const;

    bool nonnegative() const;
    /// Throws std::invalid_argument when a bump leaves the domain, the time
    /// support reaches T, or (when required) an amplitude is negative.
    void validate(const GridSpec& grid, double T, bool require_nonnegative) const;
};

/// Eight functions: {constant, centered, offcenter, anisotropic} x {early, late}.
/// The early profile starts at 1 and vanishes from 0.75 T on; the late one is
/// supported in [0.15 T, 0.75 T].
std::vector<TestFunction> weak_test_catalogue(const GridSpec& grid, double T);

struct WeakRow {
    std::string relation;
    std::string test_id;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Signed quantity and the sum of magnitudes of its constituent integrals.
struct WeakValue {
    double value = 0.0;
    double scale = 0.0;
};

/// One row per recorded time after the first; test_id is "t=<time>".
std::vector<WeakRow> mass_subsolution_check(const Trajectory& traj, double c_tol);

WeakValue log_supersolution_slack(const Trajectory& traj, const TestFunction& phi);
std::vector<WeakRow> log_supersolution_check(const Trajectory& traj, const std::vector<TestFunction>& tests,
                                             double c_tol);

WeakValue v_weak_residual(const Trajectory& traj, const TestFunction& phi);
std::vector<WeakRow> v_weak_check(const Trajectory& traj, const std::vector<TestFunction>& tests, double c_tol);

/// tol = c_tol (h + dt) scale with h the largest spacing and dt the largest
/// recorded time gap.
double weak_tolerance(const Trajectory& traj, double c_tol, double scale);

std::string weakcheck_csv(const std::vector<WeakRow>& rows);

}  // namespace kslg
