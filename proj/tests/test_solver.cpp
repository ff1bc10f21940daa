#include "doctest.h"

#include "kslg/fieldspec.hpp"
#include "kslg/solver.hpp"
#include "support/run_builders.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace kslg;
using kslg::testing::make_run;
using kslg::testing::steady_state_run;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

RunConfig randomized_2d(int cells, double T, double dt, std::uint64_t seed) {
    auto cfg = make_run(GridSpec::rectangle(cells, cells, 2.0, 2.0), FieldSpec::parse("random -1 2"),
                        FieldSpec::parse("random 0 1"), FieldSpec::parse("random 0 3"), FieldSpec::parse("random 0 2"),
                        2.0, 0.05, T, dt, seed);
    cfg.time.policy = DtPolicy::adaptive;
    return cfg;
}

}  // namespace

TEST_CASE("f_eps bands") {
    CHECK(f_eps(0.5, 1.0) == 0.5);
    CHECK(f_eps(3.0, 1.0) == 0.0);
    CHECK(f_eps(1.5, 1.0) == doctest::Approx(0.75));
    CHECK(smoothstep5(0.5) == doctest::Approx(0.5));
    CHECK(f_eps(2.0, 1.0) == 0.0);
    CHECK(f_eps(1.0, 1.0) == 1.0);
    CHECK(f_eps(10.0, 0.1) == 10.0);
}

TEST_CASE("f_eps invariants for every cutoff") {
    for (Cutoff c : {Cutoff::quintic, Cutoff::linear}) {
        for (double eps : {1.0, 0.5, 0.1, 0.013}) {
            double prev_ratio = 1.0;
            for (int k = 0; k <= 4000; ++k) {
                const double s = 3.0 / eps * k / 4000.0;
                const double f = f_eps(s, eps, c);
                CHECK(f >= 0.0);
                CHECK(f <= s);
                if (eps * s <= 1.0) CHECK(f == s);
                if (eps * s >= 2.0) CHECK(f == 0.0);
                if (s > 0.0) {
                    CHECK(f / s <= prev_ratio + 1e-15);
                    prev_ratio = f / s;
                }
            }
        }
    }
}

TEST_CASE("quintic cutoff is continuous with continuous first and second derivatives") {
    const double eps = 0.5;
    for (double knot : {1.0 / eps, 2.0 / eps}) {
        const double d = 1e-4;
        const double fl = f_eps(knot - d, eps), f0 = f_eps(knot, eps), fr = f_eps(knot + d, eps);
        CHECK(std::abs(fl - f0) < 1e-3);
        CHECK(std::abs(fr - f0) < 1e-3);
        const double left_slope = (f0 - f_eps(knot - 2 * d, eps)) / (2 * d);
        const double right_slope = (f_eps(knot + 2 * d, eps) - f0) / (2 * d);
        CHECK(left_slope == doctest::Approx(right_slope).epsilon(1e-2).scale(1.0));
        const double left_curv = (f0 - 2 * fl + f_eps(knot - 2 * d, eps)) / (d * d);
        const double right_curv = (f_eps(knot + 2 * d, eps) - 2 * fr + f0) / (d * d);
        CHECK(std::abs(left_curv - right_curv) < 0.05);
    }
}

TEST_CASE("laplacian telescopes and annihilates constants") {
    const auto g = GridSpec::rectangle(7, 5, 1.0, 2.0);
    Field f = realize(FieldSpec::parse("random 0 1"), g, 3);
    Field lf = apply_laplacian(f);
    double sum = 0.0;
    for (double x : lf.values()) sum += x;
    CHECK(std::abs(sum) < 1e-10);
    CHECK(max_abs_diff(apply_laplacian(Field(g, 2.5)), Field(g)) == 0.0);
}

TEST_CASE("conjugate gradient solves the shifted system") {
    const auto g = GridSpec::rectangle(16, 12, 2.0, 1.0);
    Field rhs = realize(FieldSpec::parse("random -1 1"), g, 5);
    Field x(g);
    const CgResult r = solve_shifted(1.3, 0.02, rhs, x, 1e-12);
    CHECK(r.residual <= 1e-12);
    Field lx = apply_laplacian(x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(1.3 * x[i] - 0.02 * lx[i] == doctest::Approx(rhs[i]).epsilon(1e-9));
    Field zero(g, 7.0);
    solve_shifted(1.0, 0.1, Field(g), zero, 1e-10);
    CHECK(zero.max() == 0.0);
}

TEST_CASE("homogeneous steady state is preserved") {
    for (const GridSpec& g : {GridSpec::line(32, 1.0), GridSpec::rectangle(16, 16, 1.0, 1.0)}) {
        const RunConfig cfg = steady_state_run(g, 1.0, 1e-3);
        double worst = 0.0;
        State prev{cfg.u0, cfg.v0, 0.0};
        const RunOutcome out = run(cfg, [&](const State& s, const StepInfo* info) {
            if (!info) return;
            worst = std::max({worst, max_abs_diff(s.u, prev.u), max_abs_diff(s.v, prev.v)});
            prev = s;
        });
        CHECK(out.completed);
        CHECK(out.steps == 1000);
        CHECK(out.final_state.t == 1.0);
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("mass is conserved without reaction") {
    auto cfg = make_run(GridSpec::rectangle(24, 24, 2.0, 2.0), FieldSpec::constant(0.0), FieldSpec::constant(0.0),
                        FieldSpec::parse("gaussian 2 0.3 0.2 -0.1 0.1"), FieldSpec::parse("cosine 1 0.5 1 2"), 2.0,
                        0.1, 0.2, 2e-3);
    double prev = integrate(cfg.u0);
    double worst = 0.0;
    const RunOutcome out = run(cfg, [&](const State& s, const StepInfo* info) {
        if (!info) return;
        worst = std::max(worst, std::abs(integrate(s.u) - prev));
        prev = integrate(s.u);
    });
    CHECK(out.completed);
    CHECK(worst <= 1e-12);
}

TEST_CASE("single cosine mode decays at the discrete eigenvalue") {
    const double L = 2.0;
    const int cells = 32, k = 3;
    const double dt = 1e-3, T = 0.2;
    auto cfg = make_run(GridSpec::line(cells, L), FieldSpec::constant(0.0), FieldSpec::constant(0.0),
                        FieldSpec::constant(0.0), FieldSpec::parse("cosine 1 0.5 3"), 2.0, 1.0, T, dt);
    const double h = L / cells;
    const double s = std::sin(k * std::numbers::pi * h / (2.0 * L));
    const double eig = 4.0 / (h * h) * s * s;
    const int n = static_cast<int>(std::lround(T / dt));
    const double mean_factor = std::pow(1.0 + dt, -n);
    const double mode_factor = std::pow(1.0 + dt * (1.0 + eig), -n);
    const RunOutcome out = run(cfg);
    REQUIRE(out.completed);
    for (std::size_t c = 0; c < out.final_state.v.size(); ++c) {
        const double x = cfg.grid.center(c)[0] - cfg.grid.lower(0);
        const double expect = mean_factor + 0.5 * mode_factor * std::cos(k * std::numbers::pi * x / L);
        CHECK(out.final_state.v[c] == doctest::Approx(expect).epsilon(1e-8));
    }
    // and the discrete amplitude tracks the continuous-in-time decay to O(dt)
    const double exact = std::exp(-(1.0 + eig) * T);
    CHECK(std::abs(mode_factor - exact) <= 2.0 * dt * (1.0 + eig) * (1.0 + eig) * T * exact + 1e-12);
}

TEST_CASE("positivity over ten thousand randomized steps") {
    auto cfg = randomized_2d(12, 20.0, 1e-3, 42);
    std::size_t steps = 0;
    bool nonnegative = true;
    const RunOutcome out = run(cfg, [&](const State& s, const StepInfo* info) {
        if (!info) return;
        ++steps;
        if (s.u.min() < 0.0 || s.v.min() < 0.0) nonnegative = false;
    });
    CHECK(out.completed);
    CHECK(steps >= 10000);
    CHECK(nonnegative);
}

TEST_CASE("stability bound is enforced") {
    auto cfg = make_run(GridSpec::line(16, 1.0), FieldSpec::constant(0.0), FieldSpec::constant(0.0),
                        FieldSpec::constant(1.0), FieldSpec::parse("cosine 1 1 1"), 2.0, 0.1, 1.0, 0.5);
    const State s{cfg.u0, cfg.v0, 0.0};
    const double bound = stability_bound(s.v, 1.0, cfg.time.cfl);
    CHECK(std::isfinite(bound));
    CHECK_THROWS_AS(step(s, cfg, 2.0 * bound, nullptr), StabilityViolation);
    CHECK_NOTHROW(step(s, cfg, bound, nullptr));
    const RunOutcome fixed = run(cfg);
    CHECK_FALSE(fixed.completed);
    CHECK(fixed.failure.find("stability") != std::string::npos);
    cfg.time.policy = DtPolicy::adaptive;
    CHECK(run(cfg).completed);
    CHECK(stability_bound(Field(cfg.grid, 1.0), 1.0, 0.45) == std::numeric_limits<double>::infinity());
}

TEST_CASE("blow-up is flagged and the run halts") {
    auto cfg = make_run(GridSpec::line(8, 1.0), FieldSpec::constant(1000.0), FieldSpec::constant(0.0),
                        FieldSpec::constant(1.0), FieldSpec::constant(1.0), 2.0, 0.1, 1.0, 0.01);
    const RunOutcome out = run(cfg);
    CHECK_FALSE(out.completed);
    CHECK(out.failure.find("1e12") != std::string::npos);
    CHECK(out.final_state.t < 1.0);
    CHECK(out.final_state.u.all_finite());
}

TEST_CASE("discrete mass identity on a randomized 2D run") {
    auto cfg = randomized_2d(64, 0.05, 1e-3, 9);
    double prev = integrate(cfg.u0);
    double worst = 0.0;
    const RunOutcome out = run(cfg, [&](const State& s, const StepInfo* info) {
        if (!info) return;
        const double now = integrate(s.u);
        worst = std::max(worst, std::abs(now - prev - info->dt * (info->production - info->damping)));
        prev = now;
    });
    CHECK(out.completed);
    CHECK(worst <= 1e-9);
}

TEST_CASE("mass identity holds with active truncation") {
    auto cfg = make_run(GridSpec::rectangle(24, 24, 2.0, 2.0), FieldSpec::constant(1.0), FieldSpec::constant(0.5),
                        FieldSpec::parse("gaussian 4 0.3"), FieldSpec::parse("gaussian 3 0.2"), 2.0, 1.0, 0.1, 1e-3);
    cfg.time.policy = DtPolicy::adaptive;
    REQUIRE(cfg.u0.max() > 2.0 / cfg.truncation.epsilon);
    double prev = integrate(cfg.u0);
    double worst = 0.0;
    run(cfg, [&](const State& s, const StepInfo* info) {
        if (!info) return;
        worst = std::max(worst, std::abs(integrate(s.u) - prev - info->dt * (info->production - info->damping)));
        prev = integrate(s.u);
    });
    CHECK(worst <= 1e-9);
}

TEST_CASE("runs are bit-identical when truncation never engages") {
    auto a = randomized_2d(16, 0.1, 1e-3, 5);
    a.time.policy = DtPolicy::fixed;
    a.time.dt = 2e-4;
    auto b = a;
    b.truncation.epsilon = a.truncation.epsilon / 2.0;
    const RunOutcome ra = run(a), rb = run(b);
    REQUIRE(ra.completed);
    REQUIRE(ra.max_u * a.truncation.epsilon <= 1.0);
    CHECK(ra.final_state.u == rb.final_state.u);
    CHECK(ra.final_state.v == rb.final_state.v);
}

TEST_CASE("runs are deterministic") {
    const auto cfg = randomized_2d(16, 0.1, 1e-3, 77);
    const RunOutcome a = run(cfg), b = run(cfg);
    CHECK(a.steps == b.steps);
    CHECK(a.final_state.u == b.final_state.u);
    CHECK(a.final_state.v == b.final_state.v);
}

TEST_CASE("comparison principle without chemotaxis and damping") {
    auto cfg = make_run(GridSpec::rectangle(16, 16, 1.0, 1.0), FieldSpec::parse("random -0.5 1.5"),
                        FieldSpec::constant(0.0), FieldSpec::parse("random 0 2"), FieldSpec::parse("random 0 5"), 2.0,
                        0.1, 1.0, 1e-2, 3);
    cfg.chi = 0.0;
    const double umax0 = cfg.u0.max();
    const double lambda1 = cfg.coefficients.lambda_sup;
    bool ok = true;
    run(cfg, [&](const State& s, const StepInfo*) {
        if (s.u.max() > umax0 * std::exp(lambda1 * s.t) * (1.0 + cfg.time.dt)) ok = false;
    });
    CHECK(ok);
}

TEST_CASE("run config validation") {
    auto cfg = steady_state_run(GridSpec::line(8, 1.0), 1.0, 0.1);
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.kappa = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.truncation.epsilon = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.u0[0] = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.v0 = Field(GridSpec::line(9, 1.0), 1.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("field specs") {
    const auto g = GridSpec::line(8, 1.0);
    CHECK(FieldSpec::parse("constant 2.5").str() == "constant 2.5");
    CHECK_THROWS_AS(FieldSpec::parse("constnt 1"), FieldSpecError);
    CHECK_THROWS_AS(FieldSpec::parse("constant"), FieldSpecError);
    CHECK_THROWS_AS(FieldSpec::parse("random 2 1"), FieldSpecError);
    CHECK_THROWS_AS(FieldSpec::parse("cosine 1 1 1.5"), FieldSpecError);
    CHECK_THROWS_AS(FieldSpec::parse("gaussian 1 0"), FieldSpecError);
    const Field r1 = realize(FieldSpec::parse("random 0 1"), g, 3);
    const Field r2 = realize(FieldSpec::parse("random 0 1"), g, 3);
    const Field r3 = realize(FieldSpec::parse("random 0 1"), g, 4);
    CHECK(r1 == r2);
    CHECK_FALSE(r1 == r3);
    CHECK(r1.min() >= 0.0);
    CHECK(r1.max() < 1.0);
    CHECK(unit_interval(0) == 0.0);
    CHECK(unit_interval(~std::uint64_t{0}) < 1.0);
    const Field cosine = realize(FieldSpec::parse("cosine 1 2 1"), g, 0);
    CHECK(cosine[0] == doctest::Approx(1.0 + 2.0 * std::cos(std::numbers::pi / 16.0)));
}
