#include "doctest.h"

#include "kslg/exponents.hpp"
#include "support/exponent_oracle.hpp"

using namespace kslg;
using namespace kslg::exponents;

namespace {

Rational q(long a, long b = 1) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

ParamConfig make(int n, const Rational& s, const Rational& kappa) {
    ParamConfig cfg;
    cfg.n = n;
    cfg.s = s;
    cfg.kappa = kappa;
    return cfg;
}

}  // namespace

TEST_CASE("kappa_threshold") {
    CHECK(kappa_threshold(2, q(1)) == 2);
    const Rational big = kappa_threshold(2, q(1000000));
    CHECK(big > 1);
    CHECK(big < 1 + q(1, 100000));
    CHECK(kappa_threshold(3, q(3)) == q(5, 3));

    CHECK_THROWS_AS(kappa_threshold(1, q(1)), ExponentError);
    CHECK_THROWS_AS(kappa_threshold(2, q(0)), ExponentError);
    CHECK_THROWS_AS(kappa_threshold(2, q(-1, 2)), ExponentError);
}

TEST_CASE("mu_integrability_exponent_bound") {
    CHECK(mu_integrability_exponent_bound(2, q(0)).is_infinite());
    CHECK(mu_integrability_exponent_bound(3, q(1)) == ExtendedRational(q(3)));
    CHECK(mu_integrability_exponent_bound(2, q(4)) == ExtendedRational(q(1, 2)));
}

TEST_CASE("prototype thresholds") {
    CHECK(prototype_kappa_threshold(2, q(0)) == 1);
    CHECK(prototype_kappa_threshold(3, q(0)) == q(4, 3));
    CHECK(prototype_kappa_threshold(5, q(0)) == q(14, 9));
    CHECK_THROWS_AS(prototype_kappa_threshold(1, q(0)), ExponentError);

    for (int n = 2; n <= 6; ++n) {
        CHECK(prototype_alpha_threshold(n, q(2)) == 2);
    }
    CHECK(prototype_alpha_threshold(3, q(3)) == q(9, 2));
    // precondition: kappa > min{(2n-2)/n, (2n+4)/(n+4)} = 4/3 for n = 3
    CHECK_THROWS_AS(prototype_alpha_threshold(3, q(4, 3)), ExponentError);
}

TEST_CASE("derived_exponents") {
    auto d = derived_exponents(q(1), q(5, 2));
    CHECK(d.p == q(5, 4));
    CHECK(d.p_conj == 5);
    CHECK(d.kappa_conj == q(5, 3));

    CHECK_THROWS_AS(derived_exponents(q(1), q(2)), ExponentError);

    d = derived_exponents(q(3), q(2));
    CHECK(d.p == q(3, 2));
    CHECK(d.p_conj == 3);
    CHECK(d.kappa_conj == 2);
    CHECK(d.p / (q(2) - d.p) == 3);
}

TEST_CASE("theta") {
    CHECK(theta(2, q(6), q(2)) == q(2, 3));
    for (int n = 2; n <= 6; ++n) {
        CHECK(theta(n, q(7, 3), q(7, 3)) == 0);
    }
    CHECK(theta(3, q(4), q(2)) == q(3, 4));
    // 1/3 - 1/2 + 1/6 = 0
    CHECK_THROWS_AS(theta(3, q(4), q(6)), ExponentError);
}

TEST_CASE("r_admissible_range") {
    auto range = r_admissible_range(2, q(1), q(2));
    CHECK(range.lower == 1);
    CHECK(range.upper.is_infinite());

    range = r_admissible_range(3, q(3, 2), q(2));
    CHECK(range.upper == ExtendedRational(q(3)));
    CHECK(range.contains(q(29, 10)));
    CHECK_FALSE(range.contains(q(3)));

    range = r_admissible_range(5, q(1), q(2));
    CHECK(range.upper == ExtendedRational(q(5, 3)));
}

TEST_CASE("select_exponents examples") {
    SUBCASE("n = 2") {
        const auto cfg = make(2, q(1), q(5, 2));
        const auto set = select_exponents(cfg);
        CHECK(set.branch == Branch::two_dimensional);
        CHECK(set.q > 5);
        CHECK(set.theta == 1 - set.r / set.q);
        CHECK(set.theta < q(6, 5));
        CHECK(testing::substitution_holds(2, cfg.s, cfg.kappa, set));
    }
    SUBCASE("n = 3, kappa = 2") {
        const auto cfg = make(3, q(10), q(2));
        const auto set = select_exponents(cfg);
        CHECK(set.branch == Branch::kappa_at_least_two);
        CHECK(set.kappa_conj * set.theta <= 2 * set.theta);
        CHECK(testing::substitution_holds(3, cfg.s, cfg.kappa, set));
    }
    SUBCASE("n = 5, near the Case 2 threshold") {
        const auto cfg = make(5, q(1000000), q(14, 9) + q(1, 100));
        const auto set = select_exponents(cfg);
        CHECK(set.branch == Branch::case_two);
        CHECK(testing::substitution_holds(5, cfg.s, cfg.kappa, set));
    }
    SUBCASE("Case 1") {
        // n = 3, s = 3: case-one bound 5/3, case-two bound 12/7; kappa in (5/3, 2)
        const auto cfg = make(3, q(3), q(17, 10));
        const auto set = select_exponents(cfg);
        CHECK(set.branch == Branch::case_one);
        CHECK(set.q_sup == ExtendedRational(q(17, 10) * 3));
        CHECK(testing::substitution_holds(3, cfg.s, cfg.kappa, set));
    }
    SUBCASE("inadmissible configuration is rejected") {
        CHECK_THROWS_AS(select_exponents(make(3, q(3), q(5, 3))), ExponentError);
    }
}

TEST_CASE("feasible_by_search") {
    CHECK(feasible_by_search(make(2, q(1), q(5, 2)), 32));
    CHECK(feasible_by_search(make(3, q(10), q(2)), 32));
    CHECK(feasible_by_search(make(5, q(1000000), q(14, 9) + q(1, 100)), 64));
    CHECK_THROWS_AS(feasible_by_search(make(2, q(1), q(5, 2)), 5), ExponentError);

    // Outside the admissible region the oracle records rather than asserts.
    const auto outside = make(5, q(1), q(14, 9) * q(99, 100));
    const bool found = feasible_by_search(outside, 32);
    MESSAGE("n=5, s=1, kappa=(14/9)(0.99): lattice feasible = " << found);
}

TEST_CASE("duality is exact") {
    testing::AdmissibleSampler sampler(7);
    for (int i = 0; i < 100; ++i) {
        const auto cfg = sampler.next();
        const auto set = select_exponents(cfg);
        CHECK(1 / set.p + 1 / set.p_conj == 1);
        CHECK(1 / cfg.kappa + 1 / set.kappa_conj == 1);
    }
}

TEST_CASE("threshold equivalence on a lattice") {
    int exceptions = 0;
    for (int n = 2; n <= 6; ++n) {
        for (int i = 0; i <= 40; ++i) {
            const Rational alpha = q(i, 10);  // [0, 4]
            const Rational k_threshold = prototype_kappa_threshold(n, alpha);
            for (int j = 1; j <= 60; ++j) {
                const Rational kappa = 1 + q(j, 20);  // (1, 4]
                const bool kappa_side = kappa > k_threshold;
                bool alpha_side = false;
                if (kappa > prototype_alpha_precondition(n)) {
                    alpha_side = alpha < prototype_alpha_threshold(n, kappa);
                }
                if (kappa_side != alpha_side) ++exceptions;
            }
        }
    }
    CHECK(exceptions == 0);
}

TEST_CASE("prototype consistency: some s < n/alpha bridges the thresholds") {
    for (int n = 2; n <= 6; ++n) {
        for (int i = 0; i <= 16; ++i) {
            const Rational alpha = q(i, 4);
            for (int j = 1; j <= 24; ++j) {
                const Rational kappa = 1 + q(j, 8);
                if (!(kappa > prototype_kappa_threshold(n, alpha))) continue;
                const auto s = bridging_s(n, alpha, kappa);
                REQUIRE(s.has_value());
                CHECK(ExtendedRational(*s) < mu_integrability_exponent_bound(n, alpha));
                CHECK(kappa > kappa_threshold(n, *s));
            }
        }
    }
}

TEST_CASE("theta lies in (0, 1) for 0 < r < q < 2n/(n-2)") {
    for (int n = 2; n <= 6; ++n) {
        const ExtendedRational cap = ExtendedRational::divide(Rational(2 * n), Rational(n - 2));
        for (int a = 1; a <= 40; ++a) {
            for (int b = a + 1; b <= 41; ++b) {
                const Rational r = q(a, 4);
                const Rational qq = q(b, 4);
                if (!(ExtendedRational(qq) < cap)) continue;
                const Rational th = theta(n, qq, r);
                CHECK(sgn(th) > 0);
                CHECK(th < 1);
            }
        }
    }
}

TEST_CASE("kappa_threshold is nonincreasing in s") {
    for (int n = 2; n <= 6; ++n) {
        Rational previous = kappa_threshold(n, q(1, 8));
        for (int i = 2; i <= 200; ++i) {
            const Rational current = kappa_threshold(n, q(i, 8));
            CHECK(current <= previous);
            previous = current;
        }
    }
}

TEST_CASE("construction soundness on sampled configurations") {
    testing::AdmissibleSampler sampler(2024);
    for (int i = 0; i < 100; ++i) {
        const auto cfg = sampler.next();
        CAPTURE(cfg.n);
        CAPTURE(to_string(cfg.s));
        CAPTURE(to_string(cfg.kappa));
        const auto set = select_exponents(cfg);
        CHECK(testing::substitution_holds(cfg.n, cfg.s, cfg.kappa, set));
        CHECK(check_constraints(cfg.n, cfg.s, cfg.kappa, set).all());
        CHECK(feasible_by_search(cfg, 48));
    }
}

TEST_CASE("mixed norm exponents") {
    const auto cfg = make(2, q(1), q(5, 2));
    const auto set = select_exponents(cfg);
    const auto m = mixed_norm_exponents(cfg.kappa, set);
    CHECK(m.p_tilde > 1);
    CHECK(m.p_tilde < set.p);
    CHECK(m.p_tilde / (m.p_tilde - 1) < set.q);
    CHECK(m.kappa_tilde > 1);
    CHECK(m.kappa_tilde < cfg.kappa);
    CHECK(m.kappa_tilde / (m.kappa_tilde - 1) < set.gamma);
}

TEST_CASE("parse_rational is exact") {
    CHECK(parse_rational("1.01") == q(101, 100));
    CHECK(parse_rational("-3/6") == q(-1, 2));
    CHECK(parse_rational("2.5e-3") == q(1, 400));
    CHECK(parse_rational("7") == 7);
    CHECK(parse_rational(".5") == q(1, 2));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
    CHECK_THROWS(parse_rational("1.2.3"));
}
