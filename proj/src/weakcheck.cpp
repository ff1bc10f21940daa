#include "kslg/weakcheck.hpp"

#include "kslg/io.hpp"
#include "kslg/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace kslg {

namespace {

double smoothstep5_slope(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double y = x * (1.0 - x);
    return 30.0 * y * y;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double trapezoid(const std::vector<State>& states, const std::vector<double>& f) {
    double sum = 0.0;
    for (std::size_t n = 0; n + 1 < states.size(); ++n) {
        sum += 0.5 * (states[n + 1].t - states[n].t) * (f[n] + f[n + 1]);
    }
    return sum;
}

/// Cell-center values of B and face-midpoint values of B and its normal derivative.
struct BumpSamples {
    std::vector<double> cell;
    std::vector<double> face;
    std::vector<double> face_normal_grad;
};

BumpSamples sample_bump(const GridSpec& g, const SpatialBump& b) {
    BumpSamples s;
    s.cell.resize(g.cell_count());
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const auto x = g.center(c);
        s.cell[c] = b.value(x[0], x[1], g.dim);
    }
    for_each_interior_face(g, [&](const InteriorFace& f) {
        s.face.push_back(b.value(f.midpoint[0], f.midpoint[1], g.dim));
        s.face_normal_grad.push_back(b.gradient(f.midpoint[0], f.midpoint[1], g.dim)[f.axis]);
    });
    return s;
}

std::array<double, 2> inverse_spacing(const GridSpec& g) {
    return {1.0 / g.spacing(0), g.dim == 2 ? 1.0 / g.spacing(1) : 0.0};
}

}  // namespace

double Trajectory::max_dt() const {
    double m = 0.0;
    for (std::size_t n = 1; n < states.size(); ++n) m = std::max(m, states[n].t - states[n - 1].t);
    return m;
}

void Trajectory::validate() const {
    if (states.empty()) throw std::invalid_argument("trajectory is empty");
    const GridSpec& g = states.front().u.grid();
    for (std::size_t n = 0; n < states.size(); ++n) {
        if (!(states[n].u.grid() == g) || !(states[n].v.grid() == g))
            throw std::invalid_argument("trajectory states live on different grids");
        if (n > 0 && !(states[n].t > states[n - 1].t))
            throw std::invalid_argument("trajectory times must increase strictly");
    }
    if (!(coefficients.lambda_vals.grid() == g) || !(coefficients.mu_vals.grid() == g))
        throw std::invalid_argument("trajectory coefficients live on a different grid");
}

TrajectoryRecorder::TrajectoryRecorder(const RunConfig& cfg, std::size_t stride) : stride_(std::max<std::size_t>(1, stride)) {
    traj_.coefficients = cfg.coefficients;
    traj_.kappa = cfg.kappa;
}

void TrajectoryRecorder::operator()(const State& state, const StepInfo*) {
    if (seen_ % stride_ == 0) traj_.states.push_back(state);
    last_ = state;
    ++seen_;
}

Trajectory TrajectoryRecorder::finish() {
    if (seen_ > 0 && (traj_.states.empty() || traj_.states.back().t != last_.t)) traj_.states.push_back(last_);
    return std::move(traj_);
}

double SpatialBump::value(double x, double y, int dim) const {
    if (constant) return 1.0;
    const double bx = smoothstep5(1.0 - std::abs((x - center[0]) / halfwidth[0]));
    if (dim == 1) return bx;
    return bx * smoothstep5(1.0 - std::abs((y - center[1]) / halfwidth[1]));
}

std::array<double, 2> SpatialBump::gradient(double x, double y, int dim) const {
    if (constant) return {0.0, 0.0};
    const double xi = (x - center[0]) / halfwidth[0];
    const double bx = smoothstep5(1.0 - std::abs(xi));
    const double dbx = -sign(xi) / halfwidth[0] * smoothstep5_slope(1.0 - std::abs(xi));
    if (dim == 1) return {dbx, 0.0};
    const double eta = (y - center[1]) / halfwidth[1];
    const double by = smoothstep5(1.0 - std::abs(eta));
    const double dby = -sign(eta) / halfwidth[1] * smoothstep5_slope(1.0 - std::abs(eta));
    return {dbx * by, bx * dby};
}

double TimeProfile::value(double t) const { return smoothstep5(1.0 - std::abs(t - center) / halfwidth); }

double TimeProfile::derivative(double t) const {
    const double z = (t - center) / halfwidth;
    return -sign(z) / halfwidth * smoothstep5_slope(1.0 - std::abs(z));
}

TestFunction TestFunction::product(std::string id, const SpatialBump& b, const TimeProfile& tau) {
    return TestFunction{std::move(id), {Term{1.0, b, tau}}};
}

TestFunction TestFunction::scaled(double a) const {
    TestFunction out = *this;
    for (auto& term : out.terms) term.amplitude *= a;
    return out;
}

TestFunction TestFunction::plus(const TestFunction& other) const {
    TestFunction out = *this;
    out.id += "+" + other.id;
    out.terms.insert(out.terms.end(), other.terms.begin(), other.terms.end());
    return out;
}

bool TestFunction::nonnegative() const {
    for (const auto& term : terms)
        if (term.amplitude < 0.0) return false;
    return true;
}

void TestFunction::validate(const GridSpec& grid, double T, bool require_nonnegative) const {
    if (terms.empty()) throw std::invalid_argument("test function " + id + " has no terms");
    if (require_nonnegative && !nonnegative()) throw std::invalid_argument("test function " + id + " is not nonnegative");
    for (const auto& term : terms) {
        if (!(term.time.halfwidth > 0.0)) throw std::invalid_argument("test function " + id + " has an empty time support");
        if (!(term.time.support_end() < T)) {
            throw std::invalid_argument("test function " + id + " is not supported strictly before T");
        }
        if (term.space.constant) continue;
        for (int a = 0; a < grid.dim; ++a) {
            if (!(term.space.halfwidth[a] > 0.0) ||
                std::abs(term.space.center[a]) + term.space.halfwidth[a] > 0.5 * grid.extent[a] * (1.0 + 1e-12)) {
                throw std::invalid_argument("test function " + id + " is not supported inside the domain");
            }
        }
    }
}

std::vector<TestFunction> weak_test_catalogue(const GridSpec& grid, double T) {
    const double lx = grid.extent[0], ly = grid.extent[1];
    const auto bump = [](double cx, double cy, double wx, double wy) {
        SpatialBump b;
        b.constant = false;
        b.center = {cx, cy};
        b.halfwidth = {wx, wy};
        return b;
    };
    const std::pair<const char*, SpatialBump> spaces[] = {
        {"constant", SpatialBump{}},
        {"centered", bump(0.0, 0.0, 0.4 * lx, 0.4 * ly)},
        {"offcenter", bump(0.2 * lx, -0.15 * ly, 0.25 * lx, 0.3 * ly)},
        {"anisotropic", bump(-0.1 * lx, 0.05 * ly, 0.35 * lx, 0.15 * ly)},
    };
    const std::pair<const char*, TimeProfile> times[] = {
        {"early", TimeProfile{0.0, 0.75 * T}},
        {"late", TimeProfile{0.45 * T, 0.3 * T}},
    };
    std::vector<TestFunction> out;
    for (const auto& [tname, tau] : times)
        for (const auto& [sname, b] : spaces) out.push_back(TestFunction::product(std::string(sname) + "-" + tname, b, tau));
    return out;
}

double weak_tolerance(const Trajectory& traj, double c_tol, double scale) {
    const double h = traj.states.front().u.grid().max_spacing();
    return c_tol * (h + traj.max_dt()) * std::abs(scale);
}

std::vector<WeakRow> mass_subsolution_check(const Trajectory& traj, double c_tol) {
    traj.validate();
    const auto& lambda = traj.coefficients.lambda_vals;
    const auto& mu = traj.coefficients.mu_vals;
    const double vol = traj.states.front().u.grid().cell_volume();
    std::vector<WeakRow> rows;
    double growth = 0.0, growth_abs = 0.0, damping = 0.0;
    double prev_g = 0.0, prev_ga = 0.0, prev_d = 0.0;
    const double m0 = integrate(traj.states.front().u);
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        const State& s = traj.states[n];
        double g = 0.0, ga = 0.0, d = 0.0;
        for (std::size_t c = 0; c < s.u.size(); ++c) {
            g += lambda[c] * s.u[c];
            ga += std::abs(lambda[c]) * s.u[c];
            d += mu[c] * std::pow(s.u[c], traj.kappa);
        }
        g *= vol;
        ga *= vol;
        d *= vol;
        if (n > 0) {
            const double half_dt = 0.5 * (s.t - traj.states[n - 1].t);
            growth += half_dt * (prev_g + g);
            growth_abs += half_dt * (prev_ga + ga);
            damping += half_dt * (prev_d + d);
            const double m = integrate(s.u);
            WeakRow row;
            row.relation = "mass_subsolution";
            char label[40];
            std::snprintf(label, sizeof label, "t=%.9g", s.t);
            row.test_id = label;
            row.value = m - m0 - growth + damping;
            row.tol = weak_tolerance(traj, c_tol, m + m0 + growth_abs + damping);
            row.pass = std::isfinite(row.value) && row.value <= row.tol;
            rows.push_back(std::move(row));
        }
        prev_g = g;
        prev_ga = ga;
        prev_d = d;
    }
    return rows;
}

WeakValue log_supersolution_slack(const Trajectory& traj, const TestFunction& phi) {
    traj.validate();
    const GridSpec& g = traj.states.front().u.grid();
    phi.validate(g, traj.states.back().t, true);
    const std::size_t N = traj.states.size();
    const double vol = g.cell_volume();
    const auto inv_h = inverse_spacing(g);
    const auto& lambda = traj.coefficients.lambda_vals;
    const auto& mu = traj.coefficients.mu_vals;

    WeakValue out;
    for (const auto& term : phi.terms) {
        const BumpSamples B = sample_bump(g, term.space);
        // A[0] pairs with tau', A[1..6] with tau
        std::array<std::vector<double>, 7> A;
        for (auto& a : A) a.assign(N, 0.0);
        std::vector<double> w(g.cell_count()), frac(g.cell_count());
        for (std::size_t n = 0; n < N; ++n) {
            const State& s = traj.states[n];
            double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0, a7 = 0;
            for (std::size_t c = 0; c < s.u.size(); ++c) {
                const double u = s.u[c];
                w[c] = std::log1p(u);
                frac[c] = u / (u + 1.0);
                a1 += w[c] * B.cell[c];
                a6 += lambda[c] * frac[c] * B.cell[c];
                a7 += mu[c] * std::pow(u, traj.kappa) / (u + 1.0) * B.cell[c];
            }
            std::size_t k = 0;
            for_each_interior_face(g, [&](const InteriorFace& f) {
                const double dw = (w[f.hi] - w[f.lo]) * inv_h[f.axis];
                const double dv = (s.v[f.hi] - s.v[f.lo]) * inv_h[f.axis];
                const double rf = 0.5 * (frac[f.hi] + frac[f.lo]);
                a2 += dw * dw * B.face[k];
                a3 += dw * B.face_normal_grad[k];
                a4 += rf * dw * dv * B.face[k];
                a5 += rf * dv * B.face_normal_grad[k];
                ++k;
            });
            const double tau = term.time.value(s.t), dtau = term.time.derivative(s.t);
            A[0][n] = dtau * a1 * vol;
            A[1][n] = tau * a2 * vol;
            A[2][n] = tau * a3 * vol;
            A[3][n] = tau * a4 * vol;
            A[4][n] = tau * a5 * vol;
            A[5][n] = tau * a6 * vol;
            A[6][n] = tau * a7 * vol;
        }
        const double initial = term.time.value(traj.states.front().t) * [&] {
            double a = 0.0;
            const State& s0 = traj.states.front();
            for (std::size_t c = 0; c < s0.u.size(); ++c) a += std::log1p(s0.u[c]) * B.cell[c];
            return a * vol;
        }();
        std::array<double, 7> I;
        for (int i = 0; i < 7; ++i) I[i] = trapezoid(traj.states, A[i]);
        const double lhs = -I[0] - initial;
        const double rhs = I[1] - I[2] - I[3] + I[4] + I[5] - I[6];
        out.value += term.amplitude * (lhs - rhs);
        double mag = std::abs(initial);
        for (double x : I) mag += std::abs(x);
        out.scale += std::abs(term.amplitude) * mag;
    }
    return out;
}

WeakValue v_weak_residual(const Trajectory& traj, const TestFunction& phi) {
    traj.validate();
    const GridSpec& g = traj.states.front().u.grid();
    phi.validate(g, traj.states.back().t, false);
    const std::size_t N = traj.states.size();
    const double vol = g.cell_volume();
    const auto inv_h = inverse_spacing(g);

    WeakValue out;
    for (const auto& term : phi.terms) {
        const BumpSamples B = sample_bump(g, term.space);
        std::vector<double> dt_part(N), grad_part(N), v_part(N), u_part(N);
        double initial = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const State& s = traj.states[n];
            double v1 = 0.0, u1 = 0.0, v2 = 0.0;
            for (std::size_t c = 0; c < s.u.size(); ++c) {
                v1 += s.v[c] * B.cell[c];
                u1 += s.u[c] * B.cell[c];
            }
            std::size_t k = 0;
            for_each_interior_face(g, [&](const InteriorFace& f) {
                v2 += (s.v[f.hi] - s.v[f.lo]) * inv_h[f.axis] * B.face_normal_grad[k];
                ++k;
            });
            const double tau = term.time.value(s.t);
            dt_part[n] = term.time.derivative(s.t) * v1 * vol;
            grad_part[n] = tau * v2 * vol;
            v_part[n] = tau * v1 * vol;
            u_part[n] = tau * u1 * vol;
            if (n == 0) initial = tau * v1 * vol;
        }
        const double i_dt = trapezoid(traj.states, dt_part);
        const double i_grad = trapezoid(traj.states, grad_part);
        const double i_v = trapezoid(traj.states, v_part);
        const double i_u = trapezoid(traj.states, u_part);
        out.value += term.amplitude * (-i_dt - initial + i_grad + i_v - i_u);
        out.scale += std::abs(term.amplitude) *
                     (std::abs(i_dt) + std::abs(initial) + std::abs(i_grad) + std::abs(i_v) + std::abs(i_u));
    }
    return out;
}

std::vector<WeakRow> log_supersolution_check(const Trajectory& traj, const std::vector<TestFunction>& tests,
                                             double c_tol) {
    std::vector<WeakRow> rows(tests.size());
    parallel_for(tests.size(), worker_limit(), [&](std::size_t i) {
        const WeakValue w = log_supersolution_slack(traj, tests[i]);
        rows[i] = {"log_supersolution", tests[i].id, w.value, weak_tolerance(traj, c_tol, w.scale), false};
        rows[i].pass = std::isfinite(w.value) && w.value >= -rows[i].tol;
    });
    return rows;
}

std::vector<WeakRow> v_weak_check(const Trajectory& traj, const std::vector<TestFunction>& tests, double c_tol) {
    std::vector<WeakRow> rows(tests.size());
    parallel_for(tests.size(), worker_limit(), [&](std::size_t i) {
        const WeakValue w = v_weak_residual(traj, tests[i]);
        rows[i] = {"v_weak", tests[i].id, std::abs(w.value), weak_tolerance(traj, c_tol, w.scale), false};
        rows[i].pass = std::isfinite(w.value) && rows[i].value <= rows[i].tol;
    });
    return rows;
}

std::string weakcheck_csv(const std::vector<WeakRow>& rows) {
    io::CsvWriter csv({"relation", "test_id", "value", "tol", "pass"});
    for (const auto& r : rows) {
        csv.row({r.relation, r.test_id, io::format_double(r.value), io::format_double(r.tol), r.pass ? "true" : "false"});
    }
    return csv.str();
}

}  // namespace kslg
