/// @file diagnostics.hpp
/// @brief Time series of the a priori functionals along a discrete run and the
/// inequality checks built on them.
///
/// Tolerances follow tol = c_tol (h + dt) |scale| with scale the right-hand
/// side of the inequality being checked; h is the largest grid spacing and dt
/// the largest step taken.

#pragma once

#include "kslg/exponents.hpp"
#include "kslg/solver.hpp"

#include <string>
#include <vector>

namespace kslg {

/// Exponents the functionals are evaluated with, as doubles.
struct FunctionalExponents {
    double kappa = 2.0;
    double p = 1.0;      ///< L^p norm of u, p = kappa s/(s+1)
    double q = 2.0;      ///< L^q norm of v in the time-integrated bound
    double gamma = 2.0;  ///< time exponent paired with q
    double r = 1.0;      ///< L^r norm of v

    static FunctionalExponents from(const exponents::ParamConfig& params, const exponents::ExponentSet& set);
};

struct DiagnosticsSample {
    double t = 0.0;
    double mass_u = 0.0;
    double mass_v = 0.0;
    double damping_cum = 0.0;        ///< int_0^t int mu u^kappa
    double lp_u_cum = 0.0;           ///< int_0^t (int u^p)^(kappa/p)
    double lr_v = 0.0;               ///< ||v(t)||_r
    double grad_v_sq_cum = 0.0;      ///< int_0^t int |grad v|^2
    double log_dirichlet_cum = 0.0;  ///< int_0^t int |grad ln(u+1)|^2
    double entropy = 0.0;            ///< int ln(u+1)
    double energy_residual = 0.0;    ///< left minus right side of the integrated v energy identity

    double lq_v_cum = 0.0;          ///< int_0^t (int v^q)^(gamma/q)
    double half_v_sq = 0.0;         ///< 1/2 int v^2
    double v_sq_cum = 0.0;          ///< int_0^t int v^2
    double uv_cum = 0.0;            ///< int_0^t int u v
    double log_damping_cum = 0.0;   ///< int_0^t int mu u^kappa/(u+1)
};

struct DiagnosticsReport {
    std::vector<DiagnosticsSample> samples;  ///< one per time level, starting at t = 0
    FunctionalExponents exponents;
    double h = 0.0;
    double dt_max = 0.0;
    double domain_volume = 0.0;
    double lambda1 = 0.0;
    double u0_mass = 0.0;
    double v0_mass = 0.0;
    double mass_identity_error = 0.0;  ///< max over steps of |dm - dt (production - damping)|
    bool completed = true;

    double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
    double tolerance(double c_tol, double scale) const;
};

/// Pointwise-in-time functionals of one state (the integrands of the
/// cumulative series, before time quadrature).
struct InstantFunctionals {
    double mass_u, mass_v, damping, lp_u, lr_v, grad_v_sq, log_dirichlet, entropy, lq_v, half_v_sq, v_sq, uv,
        log_damping;
};
InstantFunctionals evaluate_functionals(const State& s, const CoefficientField& coeffs, const FunctionalExponents& e);

/// Builds the report step by step; usable directly as a StepObserver.
class DiagnosticsAccumulator {
public:
    DiagnosticsAccumulator(const RunConfig& cfg, const FunctionalExponents& exponents);

    void operator()(const State& state, const StepInfo* info);
    const DiagnosticsReport& report() const { return report_; }
    DiagnosticsReport& report() { return report_; }

private:
    const CoefficientField* coeffs_;
    DiagnosticsReport report_;
    InstantFunctionals prev_{};
    double prev_mass_ = 0.0;
    bool started_ = false;
};

struct Verdict {
    std::string check;
    double bound = 0.0;  ///< right-hand side plus tolerance
    double value = 0.0;
    double margin = 0.0;  ///< bound - value
    bool pass = false;
};

Verdict make_verdict(std::string check, double bound, double value);

/// Mass of u, mass of v and cumulative damping against their exponential
/// bounds built from the projected initial masses.
std::vector<Verdict> check_mass_bounds(const DiagnosticsReport& report, double lambda1, double u0_mass, double v0_mass,
                                       double T, double c_tol);

/// Discrete Hoelder constant (sum over cells with mu > 0 of mu^-s vol)^((kappa-p)/p).
double holder_constant(const Field& mu, double s, double kappa, double p);

/// int_0^T (int u^p)^(kappa/p) <= c2 int_0^T int mu u^kappa. Throws
/// ExponentError unless p/(kappa-p) equals s exactly.
Verdict check_lkappa_lp(const DiagnosticsReport& report, const exponents::ParamConfig& params,
                        const exponents::ExponentSet& set, const Field& mu, double c_tol);

/// Integrated v energy budget, plus finiteness of the (q, gamma) and
/// (p, kappa) time integrals.
std::vector<Verdict> check_grad_v_and_lq(const DiagnosticsReport& report, double c_tol);

/// 1/2 int int |grad ln(u+1)|^2 <= 1/2 int int |grad v|^2 + int u(T) + lambda1 T |Omega|
///                                 + int int mu u^kappa/(u+1).
Verdict check_log_dirichlet(const DiagnosticsReport& report, double lambda1, double T, double domain_volume,
                            double c_tol);

/// Records sup_t ||v||_r; passes when finite. Throws ExponentError when r lies
/// outside the admissible range for (n, p, kappa).
Verdict lr_norm_bound(const DiagnosticsReport& report, int n, const Rational& r,
                      const Rational& p, const Rational& kappa);

/// Least-squares slope of ||v||_r over samples with t >= t_end/2.
double lr_trend_slope(const DiagnosticsReport& report);

/// int ln(u+1) <= int u at every sample.
Verdict check_entropy(const DiagnosticsReport& report);

/// |dm - dt (production - damping)| <= 1e-9 max(1, max mass) at every step.
Verdict check_mass_identity(const DiagnosticsReport& report);

/// Every check above, in a fixed order.
std::vector<Verdict> all_checks(const DiagnosticsReport& report, const RunConfig& cfg,
                                const exponents::ParamConfig& params, const exponents::ExponentSet& set,
                                double c_tol);

/// Rows at every `every`-th sample plus the last one.
std::string diagnostics_csv(const DiagnosticsReport& report, std::size_t every = 1);
std::string verdicts_csv(const std::vector<Verdict>& verdicts);

}  // namespace kslg
