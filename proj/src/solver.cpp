#include "kslg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kslg {

namespace {

constexpr double kBlowUpLevel = 1e12;

std::string describe_stability(double dt, double bound) {
    std::ostringstream ss;
    ss.precision(6);
    ss << "dt = " << dt << " exceeds the chemotaxis stability bound " << bound;
    return ss.str();
}

std::string at_time(double t) {
    std::ostringstream ss;
    ss.precision(10);
    ss << t;
    return ss.str();
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_finite(const Field& f, const char* name, double t) {
    for (double x : f.values()) {
        if (!std::isfinite(x)) throw BlowUp(t, std::string(name) + " became nonfinite at t = " + at_time(t));
        if (x > kBlowUpLevel) throw BlowUp(t, std::string(name) + " exceeded 1e12 at t = " + at_time(t));
    }
}

}  // namespace

StabilityViolation::StabilityViolation(double dt_, double bound_)
    : std::runtime_error(describe_stability(dt_, bound_)), dt(dt_), bound(bound_) {}

BlowUp::BlowUp(double t_, const std::string& what) : std::runtime_error(what), t(t_) {}

double smoothstep5(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

double f_eps(double s, double eps, Cutoff cutoff) {
    const double z = eps * s;
    if (z <= 1.0) return s;
    if (z >= 2.0) return 0.0;
    const double x = 2.0 - z;
    return s * (cutoff == Cutoff::quintic ? smoothstep5(x) : x);
}

void RunConfig::validate() const {
    grid.validate();
    auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
    if (!(kappa > 1.0)) fail("kappa must exceed 1");
    if (!(truncation.epsilon > 0.0 && truncation.epsilon <= 1.0)) fail("epsilon must lie in (0, 1]");
    if (!(T > 0.0) || !std::isfinite(T)) fail("T must be positive and finite");
    if (!(time.dt > 0.0)) fail("dt must be positive");
    if (!(time.cfl > 0.0 && time.cfl <= 1.0)) fail("cfl must lie in (0, 1]");
    if (!(cg_tol > 0.0)) fail("cg_tol must be positive");
    if (!std::isfinite(chi)) fail("chi must be finite");
    for (const Field* f : {&u0, &v0, &coefficients.lambda_vals, &coefficients.mu_vals}) {
        if (!(f->grid() == grid)) fail("initial data and coefficients must live on the run grid");
        if (!f->all_finite()) fail("initial data and coefficients must be finite");
    }
    if (u0.min() < 0.0) fail("u0 must be nonnegative");
    if (v0.min() < 0.0) fail("v0 must be nonnegative");
    if (coefficients.mu_vals.min() < 0.0) fail("mu must be nonnegative");
}

double stability_bound(const Field& v, double chi, double cfl) {
    const GridSpec& g = v.grid();
    std::array<double, 2> gmax{0.0, 0.0};
    const std::array<double, 2> inv_h{1.0 / g.spacing(0), g.dim == 2 ? 1.0 / g.spacing(1) : 0.0};
    for_each_interior_face(g, [&](const InteriorFace& f) {
        const double grad = std::abs(chi * (v[f.hi] - v[f.lo]) * inv_h[f.axis]);
        gmax[f.axis] = std::max(gmax[f.axis], grad);
    });
    const double rate = gmax[0] * inv_h[0] + gmax[1] * inv_h[1];
    if (rate == 0.0) return std::numeric_limits<double>::infinity();
    return cfl / rate;
}

Field apply_laplacian(const Field& f) {
    const GridSpec& g = f.grid();
    const std::array<double, 2> inv_h2{1.0 / (g.spacing(0) * g.spacing(0)),
                                       g.dim == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0};
    Field out(g);
    for_each_interior_face(g, [&](const InteriorFace& face) {
        const double flux = (f[face.hi] - f[face.lo]) * inv_h2[face.axis];
        out[face.lo] += flux;
        out[face.hi] -= flux;
    });
    return out;
}

CgResult solve_shifted(double a, double b, const Field& rhs, Field& x, double tol, int max_iterations) {
    const std::size_t n = rhs.size();
    auto apply = [&](const Field& p) {
        Field lp = apply_laplacian(p);
        for (std::size_t i = 0; i < n; ++i) lp[i] = a * p[i] - b * lp[i];
        return lp;
    };
    CgResult result;
    const double rhs_norm = std::sqrt(dot(rhs.values(), rhs.values()));
    if (rhs_norm == 0.0) {
        x = Field(rhs.grid());
        return result;
    }
    Field ax = apply(x);
    Field r(rhs.grid());
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
    double rr = dot(r.values(), r.values());
    const double target = tol * rhs_norm;
    Field p = r;
    while (std::sqrt(rr) > target && result.iterations < max_iterations) {
        const Field ap = apply(p);
        const double alpha = rr / dot(p.values(), ap.values());
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dot(r.values(), r.values());
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        ++result.iterations;
    }
    result.residual = std::sqrt(rr) / rhs_norm;
    return result;
}

State step(const State& state, const RunConfig& cfg, double dt, StepInfo* info) {
    const GridSpec& g = state.u.grid();
    const std::size_t n = state.u.size();
    const double bound = stability_bound(state.v, cfg.chi, cfg.time.cfl);
    if (dt > bound * (1.0 + 1e-12)) throw StabilityViolation(dt, bound);

    StepInfo local;
    local.dt = dt;
    State next;
    next.t = state.t + dt;

    Field vrhs(g);
    for (std::size_t i = 0; i < n; ++i) vrhs[i] = state.v[i] + dt * state.u[i];
    next.v = state.v;
    local.cg_iterations_v = solve_shifted(1.0 + dt, dt, vrhs, next.v, cfg.cg_tol).iterations;

    Field ustar = state.u;
    if (cfg.chi != 0.0) {
        const std::array<double, 2> inv_h{1.0 / g.spacing(0), g.dim == 2 ? 1.0 / g.spacing(1) : 0.0};
        for_each_interior_face(g, [&](const InteriorFace& face) {
            const double grad = cfg.chi * (state.v[face.hi] - state.v[face.lo]) * inv_h[face.axis];
            const double donor = grad > 0.0 ? state.u[face.lo] : state.u[face.hi];
            const double moved = dt * cfg.truncation(donor) * grad * inv_h[face.axis];
            ustar[face.lo] -= moved;
            ustar[face.hi] += moved;
        });
    }

    Field udiff = ustar;
    local.cg_iterations_u = solve_shifted(1.0, dt, ustar, udiff, cfg.cg_tol).iterations;

    const double vol = g.cell_volume();
    next.u = Field(g);
    const auto& lambda = cfg.coefficients.lambda_vals;
    const auto& mu = cfg.coefficients.mu_vals;
    double production = 0.0, damping = 0.0, clipped = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = udiff[i];
        if (w < 0.0) {
            clipped -= w;
            w = 0.0;
        }
        const double lp = std::max(lambda[i], 0.0);
        const double lm = std::max(-lambda[i], 0.0);
        const double decay = mu[i] * std::pow(w, cfg.kappa - 1.0);
        const double un = w * (1.0 + dt * lp) / (1.0 + dt * (lm + decay));
        next.u[i] = un;
        production += lp * w - lm * un;
        damping += decay * un;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (next.v[i] < 0.0) next.v[i] = 0.0;
    }
    local.production = production * vol;
    local.damping = damping * vol;
    local.clipped = clipped * vol;

    check_finite(next.u, "u", next.t);
    check_finite(next.v, "v", next.t);
    if (info) *info = local;
    return next;
}

RunOutcome run(const RunConfig& cfg, const StepObserver& observer) {
    cfg.validate();
    RunOutcome out;
    State s{cfg.u0, cfg.v0, 0.0};
    out.max_u = s.u.max();
    if (observer) observer(s, nullptr);

    const bool fixed = cfg.time.policy == DtPolicy::fixed;
    const std::size_t fixed_steps =
        fixed ? static_cast<std::size_t>(std::ceil(cfg.T / cfg.time.dt * (1.0 - 1e-12))) : 0;
    double dt = cfg.time.dt;

    while (true) {
        double t_next;
        if (fixed) {
            if (out.steps >= fixed_steps) break;
            t_next = out.steps + 1 == fixed_steps ? cfg.T : static_cast<double>(out.steps + 1) * dt;
        } else {
            const double remaining = cfg.T - s.t;
            if (remaining <= 0.0) break;
            const double bound = stability_bound(s.v, cfg.chi, cfg.time.cfl);
            while (dt > bound) dt *= 0.5;
            if (dt < 1e-14 * cfg.T) {
                out.failure = "adaptive step underflow at t = " + at_time(s.t);
                break;
            }
            t_next = remaining <= dt * (1.0 + 1e-9) ? cfg.T : s.t + dt;
        }
        StepInfo info;
        try {
            State next = step(s, cfg, t_next - s.t, &info);
            next.t = t_next;
            s = std::move(next);
        } catch (const StabilityViolation& e) {
            out.failure = std::string(e.what()) + " at t = " + at_time(s.t);
            break;
        } catch (const BlowUp& e) {
            out.failure = e.what();
            break;
        }
        ++out.steps;
        out.max_u = std::max(out.max_u, s.u.max());
        if (observer) observer(s, &info);
    }
    out.completed = out.failure.empty();
    out.final_state = std::move(s);
    return out;
}

}  // namespace kslg
