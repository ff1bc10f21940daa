#include "doctest.h"

#include "kslg/diagnostics.hpp"
#include "support/run_builders.hpp"

#include <cmath>

using namespace kslg;
using namespace kslg::exponents;
using kslg::testing::diagnose;
using kslg::testing::make_run;
using kslg::testing::steady_state_run;

namespace {

Rational rat(const char* s) { return parse_rational(s); }

ParamConfig params(int n, const char* s, const char* kappa) {
    ParamConfig p;
    p.n = n;
    p.s = rat(s);
    p.kappa = rat(kappa);
    return p;
}

bool all_pass(const std::vector<Verdict>& vs) {
    bool ok = true;
    for (const auto& v : vs) {
        if (!v.pass) {
            MESSAGE(v.check << " failed: value " << v.value << " bound " << v.bound);
            ok = false;
        }
    }
    return ok;
}

RunConfig prototype_run(double alpha, double kappa, int cells, std::uint64_t seed) {
    const auto grid = GridSpec::rectangle(cells, cells, 2.0, 2.0);
    auto cfg = make_run(grid, FieldSpec::parse("cosine 1 0.5 1 1"), FieldSpec::constant(1.0),
                        FieldSpec::parse("random 0 2"), FieldSpec::parse("gaussian 2 0.4 0.2 0.1 0.2"), kappa, 0.05,
                        1.0, 2e-3, seed);
    cfg.coefficients = CoefficientField::make(cfg.coefficients.lambda_vals, sample_prototype_mu(grid, 1.0, alpha));
    cfg.time.policy = DtPolicy::adaptive;
    return cfg;
}

}  // namespace

TEST_CASE("instant functionals match a hand evaluation") {
    // 1D, 4 cells of width 1/4; mu = 1, kappa = 2, p = 3/2, q = 4, gamma = 3, r = 2
    const auto g = GridSpec::line(4, 1.0);
    const State s{Field(g, std::vector<double>{0, 1, 2, 3}), Field(g, std::vector<double>{1, 1, 2, 2}), 0.0};
    const auto coeffs = CoefficientField::make(Field(g, 0.0), Field(g, 1.0));
    FunctionalExponents e;
    e.kappa = 2;
    e.p = 1.5;
    e.q = 4;
    e.gamma = 3;
    e.r = 2;
    const auto f = evaluate_functionals(s, coeffs, e);
    CHECK(f.mass_u == doctest::Approx(1.5));
    CHECK(f.mass_v == doctest::Approx(1.5));
    CHECK(f.damping == doctest::Approx((0 + 1 + 4 + 9) / 4.0));
    CHECK(f.lp_u == doctest::Approx(std::pow((1 + std::pow(2, 1.5) + std::pow(3, 1.5)) / 4.0, 2.0 / 1.5)));
    CHECK(f.lr_v == doctest::Approx(std::sqrt(10.0 / 4.0)));
    CHECK(f.lq_v == doctest::Approx(std::pow(34.0 / 4.0, 0.75)));
    // one interior jump of 1 in v: (1/h)^2 * h = 4
    CHECK(f.grad_v_sq == doctest::Approx(4.0));
    const double l1 = std::log(2.0), l2 = std::log(3.0), l3 = std::log(4.0);
    CHECK(f.log_dirichlet == doctest::Approx(4.0 * (l1 * l1 + (l2 - l1) * (l2 - l1) + (l3 - l2) * (l3 - l2))));
    CHECK(f.entropy == doctest::Approx((l1 + l2 + l3) / 4.0));
    CHECK(f.uv == doctest::Approx((0 + 1 + 4 + 6) / 4.0));
    CHECK(f.half_v_sq == doctest::Approx(0.5 * 10.0 / 4.0));
    CHECK(f.log_damping == doctest::Approx((1.0 / 2 + 4.0 / 3 + 9.0 / 4) / 4.0));
}

TEST_CASE("steady state passes every check with exact energy balance") {
    const auto p = params(2, "1", "5/2");
    const auto set = select_exponents(p);
    const auto cfg = steady_state_run(GridSpec::rectangle(8, 8, 1.0, 1.0), 1.0, 1e-2);
    const auto run = diagnose(cfg, FunctionalExponents::from(p, set));
    REQUIRE(run.outcome.completed);
    const auto& last = run.report.samples.back();
    CHECK(std::abs(last.energy_residual) <= 1e-12);
    CHECK(last.v_sq_cum == doctest::Approx(last.uv_cum).epsilon(1e-14));
    CHECK(last.lr_v == doctest::Approx(1.0));
    const auto verdicts = all_checks(run.report, cfg, p, set, 0.1);
    CHECK(all_pass(verdicts));
    CHECK(verdicts.front().margin > 1.0);
}

TEST_CASE("conservative run reduces the mass bound to initial mass plus one") {
    auto cfg = make_run(GridSpec::rectangle(16, 16, 1.0, 1.0), FieldSpec::constant(0.0), FieldSpec::constant(0.0),
                        FieldSpec::parse("gaussian 1 0.2"), FieldSpec::parse("constant 0.5"), 2.0, 0.1, 0.5, 5e-3);
    const auto run = diagnose(cfg, FunctionalExponents{});
    const auto vs = check_mass_bounds(run.report, 0.0, run.report.u0_mass, run.report.v0_mass, 0.5, 0.1);
    CHECK(all_pass(vs));
    CHECK(vs[0].value == doctest::Approx(run.report.u0_mass).epsilon(1e-12));
    CHECK(vs[0].bound >= run.report.u0_mass + 1.0);
    CHECK(vs[2].value == 0.0);
}

TEST_CASE("Hoelder bound is an equality for constant mu and constant u") {
    // lambda = mu u^(kappa-1) keeps u = 1 stationary; V = 1
    const auto p = params(2, "3", "2");
    const auto set = select_exponents(p);
    auto cfg = make_run(GridSpec::rectangle(8, 8, 1.0, 1.0), FieldSpec::constant(3.0), FieldSpec::constant(3.0),
                        FieldSpec::constant(1.0), FieldSpec::constant(1.0), 2.0, 0.1, 1.0, 0.05);
    const auto run = diagnose(cfg, FunctionalExponents::from(p, set));
    const auto v = check_lkappa_lp(run.report, p, set, cfg.coefficients.mu_vals, 0.0);
    CHECK(v.value == doctest::Approx(v.bound).epsilon(1e-12));
    // c2 = (mu1^-s V)^((kappa-p)/p) = 3^-1 here
    CHECK(holder_constant(cfg.coefficients.mu_vals, 3.0, 2.0, 1.5) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("zero population") {
    const auto p = params(2, "2", "2");
    const auto set = select_exponents(p);
    auto cfg = make_run(GridSpec::rectangle(16, 16, 2.0, 2.0), FieldSpec::constant(0.7), FieldSpec::constant(1.0),
                        FieldSpec::constant(0.0), FieldSpec::parse("cosine 1 0.8 2 1"), 2.0, 0.1, 1.0, 1e-2);
    const auto run = diagnose(cfg, FunctionalExponents::from(p, set));
    const auto lk = check_lkappa_lp(run.report, p, set, cfg.coefficients.mu_vals, 0.1);
    CHECK(lk.value == 0.0);
    CHECK(lk.pass);
    const auto ld = check_log_dirichlet(run.report, 0.7, 1.0, 4.0, 0.1);
    CHECK(ld.value == 0.0);
    CHECK(ld.bound >= 0.7 * 4.0);
    CHECK(ld.pass);
    for (std::size_t i = 1; i < run.report.samples.size(); ++i) {
        CHECK(run.report.samples[i].lr_v <= run.report.samples[i - 1].lr_v + 1e-14);
    }
    // pure decay: the residual is a first-order quadrature defect
    CHECK(std::abs(run.report.samples.back().energy_residual) <= 0.1 * (run.report.h + 1e-2) *
                                                                   run.report.samples.front().half_v_sq);
    CHECK(all_pass(check_grad_v_and_lq(run.report, 0.1)));
}

TEST_CASE("constant-u run has zero log-Dirichlet integral") {
    const auto cfg = steady_state_run(GridSpec::line(16, 1.0), 0.5, 1e-2);
    const auto run = diagnose(cfg, FunctionalExponents{});
    CHECK(run.report.samples.back().log_dirichlet_cum == 0.0);
    CHECK(check_log_dirichlet(run.report, 1.0, 0.5, 1.0, 0.1).pass);
}

TEST_CASE("randomized prototype runs pass every check") {
    for (double alpha : {0.0, 1.0}) {
        const auto p = params(2, alpha == 0.0 ? "2" : "3/2", "2");
        const auto set = select_exponents(p);
        const auto cfg = prototype_run(alpha, 2.0, 24, 17);
        const auto run = diagnose(cfg, FunctionalExponents::from(p, set));
        REQUIRE(run.outcome.completed);
        CHECK(all_pass(all_checks(run.report, cfg, p, set, 0.1)));
        CHECK(std::isfinite(lr_trend_slope(run.report)));
    }
}

TEST_CASE("cumulative series are nondecreasing and entropy stays below mass") {
    const auto p = params(2, "3/2", "5/2");
    const auto set = select_exponents(p);
    const auto cfg = prototype_run(1.0, 2.5, 16, 3);
    const auto run = diagnose(cfg, FunctionalExponents::from(p, set));
    const auto& s = run.report.samples;
    for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(s[i].damping_cum >= s[i - 1].damping_cum);
        CHECK(s[i].lp_u_cum >= s[i - 1].lp_u_cum);
        CHECK(s[i].grad_v_sq_cum >= s[i - 1].grad_v_sq_cum);
        CHECK(s[i].log_dirichlet_cum >= s[i - 1].log_dirichlet_cum);
        CHECK(s[i].lq_v_cum >= s[i - 1].lq_v_cum);
        CHECK(s[i].t > s[i - 1].t);
    }
    for (const auto& x : s) CHECK(x.entropy <= x.mass_u);
    CHECK(check_entropy(run.report).pass);
}

TEST_CASE("exponent inconsistency and inadmissible r are rejected") {
    const auto p = params(2, "1", "5/2");
    auto set = select_exponents(p);
    const auto cfg = steady_state_run(GridSpec::rectangle(8, 8, 1.0, 1.0), 0.1, 1e-2);
    const auto run = diagnose(cfg, FunctionalExponents::from(p, set));
    auto broken = set;
    broken.p = rat("6/5");
    CHECK_THROWS_AS(check_lkappa_lp(run.report, p, broken, cfg.coefficients.mu_vals, 0.1), ExponentError);

    // n = 3, p = 3/2, kappa = 2: admissible r lies in [1, 3)
    CHECK_THROWS_AS(lr_norm_bound(run.report, 3, rat("3"), rat("3/2"), rat("2")), ExponentError);
    CHECK_THROWS_AS(lr_norm_bound(run.report, 3, rat("1/2"), rat("3/2"), rat("2")), ExponentError);
    CHECK(lr_norm_bound(run.report, 3, rat("2"), rat("3/2"), rat("2")).pass);
}

TEST_CASE("energy residual is first order in dt") {
    std::vector<double> residuals;
    for (double dt : {0.02, 0.01, 0.005}) {
        auto cfg = make_run(GridSpec::rectangle(16, 16, 2.0, 2.0), FieldSpec::constant(1.0), FieldSpec::constant(1.0),
                            FieldSpec::parse("cosine 1 0.5 1 1"), FieldSpec::parse("cosine 1 0.3 1 0"), 2.0, 0.05, 1.0,
                            dt);
        residuals.push_back(diagnose(cfg, FunctionalExponents{}).report.samples.back().energy_residual);
    }
    for (std::size_t i = 1; i < residuals.size(); ++i) {
        const double ratio = std::abs(residuals[i - 1]) / std::abs(residuals[i]);
        CHECK(ratio >= 1.5);
        CHECK(ratio <= 3.0);
    }
}

TEST_CASE("reports and csv output are reproducible") {
    const auto p = params(2, "3/2", "2");
    const auto set = select_exponents(p);
    const auto cfg = prototype_run(1.0, 2.0, 12, 8);
    const auto a = diagnose(cfg, FunctionalExponents::from(p, set));
    const auto b = diagnose(cfg, FunctionalExponents::from(p, set));
    CHECK(diagnostics_csv(a.report) == diagnostics_csv(b.report));
    CHECK(verdicts_csv(all_checks(a.report, cfg, p, set, 0.1)) == verdicts_csv(all_checks(b.report, cfg, p, set, 0.1)));

    const std::string csv = diagnostics_csv(a.report, 100);
    CHECK(csv.rfind("t,mass_u,mass_v,damping_cum,lp_u_cum,lr_v,grad_v_sq_cum,log_dirichlet_cum,entropy,energy_residual\n",
                    0) == 0);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    const std::size_t last = a.report.samples.size() - 1;
    const std::size_t rows = last / 100 + 1 + (last % 100 != 0 ? 1 : 0);
    CHECK(lines == 1 + rows);
    CHECK(verdicts_csv({make_verdict("x", 1.0, 2.0)}) == "check,bound,value,margin,pass\nx,1,2,-1,false\n");
}
