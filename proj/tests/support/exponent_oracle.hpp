// Test-only helpers for the exponent algebra: an independent substitution
// check written from the constraint list, and a seeded sampler of admissible
// parameter configurations.

#pragma once

#include "kslg/exponents.hpp"

#include <random>

namespace kslg::testing {

/// Re-derives p, p', kappa' and theta from scratch and substitutes the set
/// into all five constraints. Shares no code with the library's checker.
inline bool substitution_holds(int n, const Rational& s, const Rational& kappa, const exponents::ExponentSet& e) {
    Rational p = kappa * s / (s + 1);
    if (p <= 1) return false;
    Rational pc = p / (p - 1);
    Rational kc = kappa / (kappa - 1);
    if (e.p != p || e.p_conj != pc || e.kappa_conj != kc) return false;

    // 1. q > p'
    if (!(e.q > pc)) return false;

    // 2. 1 <= r < max{ kn / [kn/p - 2(k-1)]_+ , n/(n-2) }
    if (e.r < 1) return false;
    Rational kn = kappa * n;
    Rational den = kn / p - 2 * (kappa - 1);
    bool first_infinite = sgn(den) <= 0;
    bool second_infinite = n == 2;
    if (!first_infinite && !second_infinite) {
        Rational b1 = kn / den;
        Rational b2 = Rational(n) / Rational(n - 2);
        Rational bound = b1 > b2 ? b1 : b2;
        if (!(e.r < bound)) return false;
    }

    // 3. theta in (0, 1)
    Rational inv_r = 1 / e.r;
    Rational d = Rational(1) / n - Rational(1) / 2 + inv_r;
    if (sgn(d) == 0) return false;
    Rational th = (inv_r - 1 / e.q) / d;
    if (th != e.theta) return false;
    if (!(sgn(th) > 0 && th < 1)) return false;

    // 4. kappa' theta < 2
    if (!(kc * th < 2)) return false;

    // 5. gamma > kappa' and theta gamma <= 2
    return e.gamma > kc && th * e.gamma <= 2;
}

struct AdmissibleSampler {
    std::mt19937_64 rng;

    explicit AdmissibleSampler(std::uint64_t seed) : rng(seed) {}

    long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

    exponents::ParamConfig next() {
        exponents::ParamConfig cfg;
        cfg.n = static_cast<int>(uniform(2, 6));
        cfg.s = Rational(uniform(1, 400), uniform(1, 40));
        cfg.s.canonicalize();
        // margin m / 10^e above the threshold, e in [0, 4]
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(uniform(0, 4)));
        Rational margin(mpz_class(uniform(1, 9)), scale);
        margin.canonicalize();
        cfg.kappa = exponents::kappa_threshold(cfg.n, cfg.s) + margin;
        return cfg;
    }
};

}  // namespace kslg::testing
