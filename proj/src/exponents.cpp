#include "kslg/exponents.hpp"

#include <algorithm>
#include <vector>

namespace kslg::exponents {

namespace {

Rational frac(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational midpoint(const Rational& a, const Rational& b) {
    Rational m = (a + b) / 2;
    m.canonicalize();
    return m;
}

/// Pick from the open interval (a, b); b may be infinite.
Rational interior_pick(const Rational& a, const ExtendedRational& b) {
    if (b.is_infinite()) return Rational(a + 1);
    return midpoint(a, b.value());
}

void require_dimension(int n) {
    if (n < 2) throw ExponentError("dimension n must be >= 2, got " + std::to_string(n));
}

Rational rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace

std::string to_string(Branch b) {
    switch (b) {
        case Branch::two_dimensional: return "n=2";
        case Branch::kappa_at_least_two: return "kappa>=2";
        case Branch::case_one: return "case1";
        case Branch::case_two: return "case2";
    }
    return "unknown";
}

void ParamConfig::validate() const {
    require_dimension(n);
    if (sgn(s) <= 0) throw ExponentError("s must be > 0, got " + kslg::to_string(s));
    if (kappa <= 1) throw ExponentError("kappa must be > 1, got " + kslg::to_string(kappa));
    if (alpha && sgn(*alpha) < 0) throw ExponentError("alpha must be >= 0, got " + kslg::to_string(*alpha));
    if (mu1 && sgn(*mu1) <= 0) throw ExponentError("mu1 must be > 0, got " + kslg::to_string(*mu1));
}

Rational kappa_threshold(int n, const Rational& s) {
    require_dimension(n);
    if (sgn(s) <= 0) throw ExponentError("s must be > 0, got " + kslg::to_string(s));
    const Rational first = Rational(2 * n * (s + 1)) / Rational((n + 2) * s);
    const Rational second = Rational(2 * (n - 1) * s + n) / Rational(n * s);
    const Rational third = Rational(2 * (n + 2) * s + 2 * n) / Rational((n + 4) * s);
    return rmax(first, rmin(second, third));
}

Rational kappa_threshold(const ParamConfig& cfg) { return kappa_threshold(cfg.n, cfg.s); }

ExtendedRational mu_integrability_exponent_bound(int n, const Rational& alpha) {
    if (sgn(alpha) < 0) throw ExponentError("alpha must be >= 0, got " + kslg::to_string(alpha));
    return ExtendedRational::divide(Rational(n), alpha);
}

Rational prototype_kappa_threshold(int n, const Rational& alpha) {
    require_dimension(n);
    if (sgn(alpha) < 0) throw ExponentError("alpha must be >= 0, got " + kslg::to_string(alpha));
    const Rational first = Rational(2 * n + 2 * alpha) / (n + 2);
    const Rational second = Rational(2 * (n - 1) + alpha) / n;
    const Rational third = Rational(2 * (n + 2) + 2 * alpha) / (n + 4);
    return rmax(first, rmin(second, third));
}

Rational prototype_alpha_precondition(int n) {
    require_dimension(n);
    return rmin(frac(2 * n - 2, n), frac(2 * n + 4, n + 4));
}

Rational prototype_alpha_threshold(int n, const Rational& kappa) {
    const Rational bound = prototype_alpha_precondition(n);
    if (kappa <= bound) {
        throw ExponentError("kappa = " + kslg::to_string(kappa) + " must exceed min{(2n-2)/n, (2n+4)/(n+4)} = " +
                            kslg::to_string(bound));
    }
    const Rational k2n = (kappa - 2) * n;
    const Rational first = (k2n + 2 * kappa) / 2;
    const Rational second = k2n + 2;
    const Rational third = (k2n + 4 * kappa - 4) / 2;
    return rmin(first, rmax(second, third));
}

DerivedExponents derived_exponents(const Rational& s, const Rational& kappa) {
    if (sgn(s) <= 0) throw ExponentError("s must be > 0, got " + kslg::to_string(s));
    if (kappa <= 1) throw ExponentError("kappa must be > 1, got " + kslg::to_string(kappa));
    DerivedExponents d;
    d.p = kappa * s / (s + 1);
    if (d.p <= 1) {
        throw ExponentError("p = kappa s/(s+1) = " + kslg::to_string(d.p) +
                            " <= 1; its conjugate exponent is undefined");
    }
    d.p_conj = d.p / (d.p - 1);
    d.kappa_conj = kappa / (kappa - 1);
    return d;
}

Rational theta(int n, const Rational& q, const Rational& r) {
    if (sgn(q) <= 0 || sgn(r) <= 0) throw ExponentError("theta requires q, r > 0");
    const Rational denominator = frac(1, n) - frac(1, 2) + 1 / r;
    if (sgn(denominator) == 0) {
        throw ExponentError("theta: singular denominator 1/n - 1/2 + 1/r = 0 (r = " + kslg::to_string(r) + ")");
    }
    Rational t = (1 / r - 1 / q) / denominator;
    t.canonicalize();
    return t;
}

HalfOpenInterval r_admissible_range(int n, const Rational& p, const Rational& kappa) {
    require_dimension(n);
    if (p < 1) throw ExponentError("r_admissible_range requires p >= 1");
    if (kappa <= 1) throw ExponentError("r_admissible_range requires kappa > 1");
    const Rational kn = kappa * n;
    const ExtendedRational from_space_time = ExtendedRational::divide(kn, positive_part(kn / p - 2 * (kappa - 1)));
    const ExtendedRational from_mass = ExtendedRational::divide(Rational(n), Rational(n - 2));
    return HalfOpenInterval{Rational(1), max(from_space_time, from_mass)};
}

ConstraintCheck check_constraints(int n, const Rational& s, const Rational& kappa, const ExponentSet& set) {
    ConstraintCheck c;
    const DerivedExponents d = derived_exponents(s, kappa);
    const bool derived_consistent = d.p == set.p && d.p_conj == set.p_conj && d.kappa_conj == set.kappa_conj;

    c.q_above_p_conj = derived_consistent && set.q > d.p_conj;
    c.r_admissible = set.r > 1 && r_admissible_range(n, d.p, kappa).contains(set.r);

    Rational th;
    try {
        th = theta(n, set.q, set.r);
    } catch (const ExponentError&) {
        return c;
    }
    c.theta_in_unit_interval = th == set.theta && sgn(th) > 0 && th < 1;
    c.kappa_conj_theta_below_two = d.kappa_conj * th < 2;
    c.gamma_valid = set.gamma > d.kappa_conj && th * set.gamma <= 2;
    return c;
}

ExponentSet select_exponents(const ParamConfig& cfg) {
    cfg.validate();
    const int n = cfg.n;
    const Rational& s = cfg.s;
    const Rational& kappa = cfg.kappa;

    const Rational threshold = kappa_threshold(n, s);
    if (kappa <= threshold) {
        throw ExponentError("kappa = " + kslg::to_string(kappa) + " does not exceed the threshold " +
                            kslg::to_string(threshold) + " for n = " + std::to_string(n) +
                            ", s = " + kslg::to_string(s));
    }

    const DerivedExponents d = derived_exponents(s, kappa);
    ExponentSet set;
    set.p = d.p;
    set.p_conj = d.p_conj;
    set.kappa_conj = d.kappa_conj;

    if (n == 2) {
        set.branch = Branch::two_dimensional;
        set.q_sup = ExtendedRational::infinity();
        set.r_sup = ExtendedRational::infinity();
        set.q = interior_pick(d.p_conj, set.q_sup);
        set.r = set.q * rmax(frac(1, 2), 1 - 1 / d.kappa_conj);
        set.r.canonicalize();
    } else {
        const Rational q_cap = frac(2 * n, n - 2);
        if (d.p_conj >= q_cap) {
            throw InfeasibleConfiguration("p' = " + kslg::to_string(d.p_conj) + " is not below 2n/(n-2)");
        }
        const HalfOpenInterval admissible = r_admissible_range(n, d.p, kappa);

        if (kappa >= 2) {
            set.branch = Branch::kappa_at_least_two;
            set.q_sup = q_cap;
            set.r_sup = admissible.upper;
            set.q = midpoint(d.p_conj, q_cap);
            const ExtendedRational r_hi = min(ExtendedRational(set.q), admissible.upper);
            set.r = midpoint(Rational(1), r_hi.value());
        } else {
            const Rational case_one_bound = Rational(2 * (n - 1) * s + n) / Rational(n * s);
            const Rational case_two_bound = Rational(2 * (n + 2) * s + 2 * n) / Rational((n + 4) * s);
            if (kappa > case_one_bound) {
                set.branch = Branch::case_one;
                set.q_sup = Rational(kappa * n / (n - 2));
                set.r_sup = frac(n, n - 2);
            } else if (kappa > case_two_bound) {
                set.branch = Branch::case_two;
                const Rational q_den = (kappa * s - (s + 1)) * (kappa * n - (n + 4)) + n * (s + 1) - 4;
                set.q_sup = ExtendedRational::divide(Rational(kappa * kappa * n * s), positive_part(q_den));
                set.r_sup = Rational(kappa * n * s / (n * (s + 1) - 2 * (kappa - 1) * s));
            } else {
                throw InfeasibleConfiguration("kappa < 2 but neither case bound is exceeded");
            }

            const ExtendedRational q_hi = min(ExtendedRational(q_cap), set.q_sup);
            if (ExtendedRational(d.p_conj) >= q_hi) {
                throw InfeasibleConfiguration("empty interval for q: (" + kslg::to_string(d.p_conj) + ", " +
                                              kslg::to_string(q_hi) + ")");
            }
            set.q = interior_pick(d.p_conj, q_hi);

            // With x = 1/r, a = 1/q, c = 1/n - 1/2 and t = 2/kappa' < 1, the
            // condition kappa' theta < 2 reads x (1 - t) < a + t c.
            const Rational a = 1 / set.q;
            const Rational c = frac(1, n) - frac(1, 2);
            const Rational t = 2 / d.kappa_conj;
            const Rational rhs = a + t * c;
            if (sgn(rhs) <= 0) {
                throw InfeasibleConfiguration("kappa' theta(q, r) < 2 has no solution r for q = " +
                                              kslg::to_string(set.q));
            }
            const Rational r_min = (1 - t) / rhs;
            const Rational lo = rmax(Rational(1), r_min);
            const ExtendedRational hi = min(ExtendedRational(set.q), set.r_sup);
            if (ExtendedRational(lo) >= hi) {
                throw InfeasibleConfiguration("empty interval for r: (" + kslg::to_string(lo) + ", " +
                                              kslg::to_string(hi) + ")");
            }
            set.r = midpoint(lo, hi.value());
        }
    }

    set.theta = theta(n, set.q, set.r);
    if (sgn(set.theta) <= 0) {
        throw InfeasibleConfiguration("theta(q, r) = " + kslg::to_string(set.theta) + " is not positive");
    }
    set.gamma = set.kappa_conj + rmin(Rational(1), 2 / set.theta - set.kappa_conj) / 2;
    set.gamma.canonicalize();

    if (!check_constraints(n, s, kappa, set).all()) {
        throw InfeasibleConfiguration("constructed exponent set violates a constraint");
    }
    return set;
}

namespace {

/// Lattice fractions in [0, 1): a cubically graded uniform family plus
/// dyadic points 2^-k and 1 - 2^-k, so windows of width down to ~2^-dyadic
/// at either end are resolved.
std::vector<Rational> graded_fractions(int steps, bool include_zero, int dyadic_levels) {
    std::vector<Rational> out;
    out.reserve(2 * static_cast<std::size_t>(steps + dyadic_levels));
    const Rational n3 = Rational(steps) * steps * steps;
    for (int i = include_zero ? 0 : 1; i < steps; ++i) {
        const Rational i3 = Rational(i) * i * i;
        const Rational j3 = Rational(steps - i) * (steps - i) * (steps - i);
        out.emplace_back(i3 / n3);
        if (i > 0) out.emplace_back(1 - j3 / n3);
    }
    for (int k = 1; k <= dyadic_levels; ++k) {
        mpz_class pow2;
        mpz_ui_pow_ui(pow2.get_mpz_t(), 2, static_cast<unsigned long>(k));
        const Rational tiny(mpz_class(1), pow2);
        out.emplace_back(tiny);
        out.emplace_back(1 - tiny);
    }
    for (auto& r : out) r.canonicalize();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

bool feasible_by_search(const ParamConfig& cfg, int grid_steps, long span) {
    if (grid_steps < 10) throw ExponentError("feasible_by_search needs grid_steps >= 10");
    cfg.validate();
    DerivedExponents d;
    try {
        d = derived_exponents(cfg.s, cfg.kappa);
    } catch (const ExponentError&) {
        return false;
    }
    const int n = cfg.n;
    const HalfOpenInterval admissible = r_admissible_range(n, d.p, cfg.kappa);
    Rational span_r(span);
    if (span <= 0) {
        // auto: wide enough that r can approach q when p' is large
        mpz_class ceil_pc;
        mpz_cdiv_q(ceil_pc.get_mpz_t(), d.p_conj.get_num_mpz_t(), d.p_conj.get_den_mpz_t());
        span_r = max(ExtendedRational(Rational(64)), ExtendedRational(Rational(2 * ceil_pc))).value();
    }

    constexpr int dyadic_levels = 48;
    std::vector<Rational> q_offsets = graded_fractions(grid_steps, false, dyadic_levels);
    q_offsets.emplace_back(1);
    const std::vector<Rational> r_fractions = graded_fractions(grid_steps, true, dyadic_levels);

    for (const Rational& fq : q_offsets) {
        const Rational q = d.p_conj + span_r * fq;
        const ExtendedRational r_top = min(min(ExtendedRational(q), ExtendedRational(span_r)), admissible.upper);
        const Rational r_width = r_top.value() - 1;
        if (sgn(r_width) <= 0) continue;
        for (const Rational& fr : r_fractions) {
            const Rational r = 1 + r_width * fr;
            if (!admissible.contains(r)) continue;
            Rational th;
            try {
                th = theta(n, q, r);
            } catch (const ExponentError&) {
                continue;
            }
            if (sgn(th) <= 0 || th >= 1) continue;
            // some gamma > kappa' with theta gamma <= 2 exists iff kappa' theta < 2
            if (d.kappa_conj * th < 2) return true;
        }
    }
    return false;
}

MixedNormExponents mixed_norm_exponents(const Rational& kappa, const ExponentSet& set) {
    const Rational q_conj = set.q / (set.q - 1);
    const Rational gamma_conj = set.gamma / (set.gamma - 1);
    MixedNormExponents m;
    m.p_tilde = midpoint(rmax(Rational(1), q_conj), set.p);
    m.kappa_tilde = midpoint(rmax(Rational(1), gamma_conj), kappa);
    return m;
}

std::optional<Rational> bridging_s(int n, const Rational& alpha, const Rational& kappa, int max_levels) {
    const ExtendedRational s_bound = mu_integrability_exponent_bound(n, alpha);
    for (int j = 1; j <= max_levels; ++j) {
        Rational s;
        if (s_bound.is_infinite()) {
            mpz_class pow2;
            mpz_ui_pow_ui(pow2.get_mpz_t(), 2, static_cast<unsigned long>(j));
            s = Rational(pow2);
        } else {
            mpz_class pow2;
            mpz_ui_pow_ui(pow2.get_mpz_t(), 2, static_cast<unsigned long>(j));
            s = s_bound.value() * (1 - Rational(1) / Rational(pow2));
        }
        s.canonicalize();
        if (kappa > kappa_threshold(n, s)) return s;
    }
    return std::nullopt;
}

}  // namespace kslg::exponents
