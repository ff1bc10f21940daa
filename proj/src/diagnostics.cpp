#include "kslg/diagnostics.hpp"

#include "kslg/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kslg {

FunctionalExponents FunctionalExponents::from(const exponents::ParamConfig& params, const exponents::ExponentSet& set) {
    FunctionalExponents e;
    e.kappa = to_double(params.kappa);
    e.p = to_double(set.p);
    e.q = to_double(set.q);
    e.gamma = to_double(set.gamma);
    e.r = to_double(set.r);
    return e;
}

double DiagnosticsReport::tolerance(double c_tol, double scale) const {
    return c_tol * (h + dt_max) * std::abs(scale);
}

InstantFunctionals evaluate_functionals(const State& s, const CoefficientField& coeffs, const FunctionalExponents& e) {
    const GridSpec& g = s.u.grid();
    const double vol = g.cell_volume();
    const auto& mu = coeffs.mu_vals;
    InstantFunctionals f{};
    double up = 0.0, vr = 0.0, vq = 0.0;
    Field log_u(g);
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        const double u = s.u[i], v = s.v[i];
        const double uk = std::pow(u, e.kappa);
        f.mass_u += u;
        f.mass_v += v;
        f.damping += mu[i] * uk;
        f.log_damping += mu[i] * uk / (u + 1.0);
        up += std::pow(u, e.p);
        vr += std::pow(v, e.r);
        vq += std::pow(v, e.q);
        log_u[i] = std::log1p(u);
        f.entropy += log_u[i];
        f.v_sq += v * v;
        f.uv += u * v;
    }
    f.mass_u *= vol;
    f.mass_v *= vol;
    f.damping *= vol;
    f.log_damping *= vol;
    f.entropy *= vol;
    f.v_sq *= vol;
    f.uv *= vol;
    f.half_v_sq = 0.5 * f.v_sq;
    f.lp_u = std::pow(up * vol, e.kappa / e.p);
    f.lr_v = std::pow(vr * vol, 1.0 / e.r);
    f.lq_v = std::pow(vq * vol, e.gamma / e.q);
    f.grad_v_sq = grad_sq_faces(s.v);
    f.log_dirichlet = grad_sq_faces(log_u);
    return f;
}

DiagnosticsAccumulator::DiagnosticsAccumulator(const RunConfig& cfg, const FunctionalExponents& exponents)
    : coeffs_(&cfg.coefficients) {
    report_.exponents = exponents;
    report_.h = cfg.grid.max_spacing();
    report_.domain_volume = cfg.grid.domain_volume();
    report_.lambda1 = cfg.coefficients.lambda_sup;
}

void DiagnosticsAccumulator::operator()(const State& state, const StepInfo* info) {
    const InstantFunctionals now = evaluate_functionals(state, *coeffs_, report_.exponents);
    DiagnosticsSample s;
    s.t = state.t;
    s.mass_u = now.mass_u;
    s.mass_v = now.mass_v;
    s.lr_v = now.lr_v;
    s.entropy = now.entropy;
    s.half_v_sq = now.half_v_sq;
    if (!started_) {
        started_ = true;
        report_.u0_mass = now.mass_u;
        report_.v0_mass = now.mass_v;
    } else {
        const DiagnosticsSample& p = report_.samples.back();
        const double half_dt = 0.5 * (state.t - p.t);
        auto trap = [&](double cum, double a, double b) { return cum + half_dt * (a + b); };
        s.damping_cum = trap(p.damping_cum, prev_.damping, now.damping);
        s.lp_u_cum = trap(p.lp_u_cum, prev_.lp_u, now.lp_u);
        s.grad_v_sq_cum = trap(p.grad_v_sq_cum, prev_.grad_v_sq, now.grad_v_sq);
        s.log_dirichlet_cum = trap(p.log_dirichlet_cum, prev_.log_dirichlet, now.log_dirichlet);
        s.lq_v_cum = trap(p.lq_v_cum, prev_.lq_v, now.lq_v);
        s.v_sq_cum = trap(p.v_sq_cum, prev_.v_sq, now.v_sq);
        s.uv_cum = trap(p.uv_cum, prev_.uv, now.uv);
        s.log_damping_cum = trap(p.log_damping_cum, prev_.log_damping, now.log_damping);
        if (info) {
            report_.dt_max = std::max(report_.dt_max, info->dt);
            const double err = std::abs(now.mass_u - prev_mass_ - info->dt * (info->production - info->damping));
            report_.mass_identity_error = std::max(report_.mass_identity_error, err);
        }
    }
    const double half_v0_sq = report_.samples.empty() ? now.half_v_sq : report_.samples.front().half_v_sq;
    s.energy_residual = s.half_v_sq - half_v0_sq + s.grad_v_sq_cum + s.v_sq_cum - s.uv_cum;
    report_.samples.push_back(s);
    prev_ = now;
    prev_mass_ = now.mass_u;
}

Verdict make_verdict(std::string check, double bound, double value) {
    Verdict v;
    v.check = std::move(check);
    v.bound = bound;
    v.value = value;
    v.margin = bound - value;
    v.pass = std::isfinite(value) && value <= bound;
    return v;
}

std::vector<Verdict> check_mass_bounds(const DiagnosticsReport& report, double lambda1, double u0_mass, double v0_mass,
                                       double T, double c_tol) {
    const double growth = std::exp(lambda1 * T) * (u0_mass + 1.0);
    double max_u = 0.0, max_v = 0.0;
    for (const auto& s : report.samples) {
        max_u = std::max(max_u, s.mass_u);
        max_v = std::max(max_v, s.mass_v);
    }
    const double damping = report.samples.empty() ? 0.0 : report.samples.back().damping_cum;
    const double v_bound = v0_mass + 1.0 + growth;
    return {
        make_verdict("mass_u", growth + report.tolerance(c_tol, growth), max_u),
        make_verdict("mass_v", v_bound + report.tolerance(c_tol, v_bound), max_v),
        make_verdict("damping", growth + report.tolerance(c_tol, growth), damping),
    };
}

double holder_constant(const Field& mu, double s, double kappa, double p) {
    double sum = 0.0;
    for (double m : mu.values()) {
        if (m > 0.0) sum += std::pow(m, -s);
    }
    sum *= mu.grid().cell_volume();
    return std::pow(sum, (kappa - p) / p);
}

Verdict check_lkappa_lp(const DiagnosticsReport& report, const exponents::ParamConfig& params,
                        const exponents::ExponentSet& set, const Field& mu, double c_tol) {
    const Rational ratio = set.p / (params.kappa - set.p);
    if (ratio != params.s) {
        throw exponents::ExponentError("p/(kappa - p) = " + to_string(ratio) + " differs from s = " +
                                       to_string(params.s));
    }
    const double c2 = holder_constant(mu, to_double(params.s), to_double(params.kappa), to_double(set.p));
    const auto& last = report.samples.back();
    const double rhs = c2 * last.damping_cum;
    return make_verdict("lkappa_lp", rhs + report.tolerance(c_tol, rhs), last.lp_u_cum);
}

std::vector<Verdict> check_grad_v_and_lq(const DiagnosticsReport& report, double c_tol) {
    const auto& first = report.samples.front();
    const auto& last = report.samples.back();
    const double rhs = first.half_v_sq + last.uv_cum;
    const double lhs = last.half_v_sq + last.grad_v_sq_cum + last.v_sq_cum;
    const double inf = std::numeric_limits<double>::infinity();
    return {
        make_verdict("energy_budget", rhs + report.tolerance(c_tol, rhs), lhs),
        make_verdict("grad_v_sq_finite", inf, last.grad_v_sq_cum),
        make_verdict("lq_v_finite", inf, last.lq_v_cum),
        make_verdict("lp_u_finite", inf, last.lp_u_cum),
    };
}

Verdict check_log_dirichlet(const DiagnosticsReport& report, double lambda1, double T, double domain_volume,
                            double c_tol) {
    const auto& last = report.samples.back();
    const double rhs = 0.5 * last.grad_v_sq_cum + last.mass_u + lambda1 * T * domain_volume + last.log_damping_cum;
    return make_verdict("log_dirichlet", rhs + report.tolerance(c_tol, rhs), 0.5 * last.log_dirichlet_cum);
}

Verdict lr_norm_bound(const DiagnosticsReport& report, int n, const Rational& r, const Rational& p,
                      const Rational& kappa) {
    const auto range = exponents::r_admissible_range(n, p, kappa);
    if (!range.contains(r)) {
        throw exponents::ExponentError("r = " + to_string(r) + " lies outside the admissible range [" +
                                       to_string(range.lower) + ", " + to_string(range.upper) + ")");
    }
    double sup = 0.0;
    for (const auto& s : report.samples) sup = std::max(sup, s.lr_v);
    return make_verdict("lr_v_sup_finite", std::numeric_limits<double>::infinity(), sup);
}

double lr_trend_slope(const DiagnosticsReport& report) {
    const double half = 0.5 * report.t_end();
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (const auto& s : report.samples) {
        if (s.t < half) continue;
        n += 1;
        st += s.t;
        sy += s.lr_v;
        stt += s.t * s.t;
        sty += s.t * s.lr_v;
    }
    const double denom = n * stt - st * st;
    if (n < 2 || denom == 0.0) return 0.0;
    return (n * sty - st * sy) / denom;
}

Verdict check_entropy(const DiagnosticsReport& report) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : report.samples) worst = std::max(worst, s.entropy - s.mass_u);
    return make_verdict("entropy", 0.0, worst);
}

Verdict check_mass_identity(const DiagnosticsReport& report) {
    double scale = 1.0;
    for (const auto& s : report.samples) scale = std::max(scale, s.mass_u);
    return make_verdict("mass_identity", 1e-9 * scale, report.mass_identity_error);
}

std::vector<Verdict> all_checks(const DiagnosticsReport& report, const RunConfig& cfg,
                                const exponents::ParamConfig& params, const exponents::ExponentSet& set,
                                double c_tol) {
    const double T = report.t_end();
    std::vector<Verdict> out = check_mass_bounds(report, report.lambda1, report.u0_mass, report.v0_mass, T, c_tol);
    out.push_back(check_lkappa_lp(report, params, set, cfg.coefficients.mu_vals, c_tol));
    for (auto& v : check_grad_v_and_lq(report, c_tol)) out.push_back(std::move(v));
    out.push_back(check_log_dirichlet(report, report.lambda1, T, report.domain_volume, c_tol));
    out.push_back(lr_norm_bound(report, params.n, set.r, set.p, params.kappa));
    out.push_back(check_entropy(report));
    out.push_back(check_mass_identity(report));
    return out;
}

std::string diagnostics_csv(const DiagnosticsReport& report, std::size_t every) {
    io::CsvWriter csv({"t", "mass_u", "mass_v", "damping_cum", "lp_u_cum", "lr_v", "grad_v_sq_cum",
                       "log_dirichlet_cum", "entropy", "energy_residual"});
    const std::size_t n = report.samples.size();
    if (every == 0) every = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % every != 0 && i + 1 != n) continue;
        const auto& s = report.samples[i];
        csv.row({io::format_double(s.t), io::format_double(s.mass_u), io::format_double(s.mass_v),
                 io::format_double(s.damping_cum), io::format_double(s.lp_u_cum), io::format_double(s.lr_v),
                 io::format_double(s.grad_v_sq_cum), io::format_double(s.log_dirichlet_cum),
                 io::format_double(s.entropy), io::format_double(s.energy_residual)});
    }
    return csv.str();
}

std::string verdicts_csv(const std::vector<Verdict>& verdicts) {
    io::CsvWriter csv({"check", "bound", "value", "margin", "pass"});
    for (const auto& v : verdicts) {
        csv.row({v.check, io::format_double(v.bound), io::format_double(v.value), io::format_double(v.margin),
                 v.pass ? "true" : "false"});
    }
    return csv.str();
}

}  // namespace kslg
