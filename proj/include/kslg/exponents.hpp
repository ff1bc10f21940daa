/// @file exponents.hpp
/// @brief Admissibility conditions on (n, s, kappa) and the constructive
/// selection of the interpolation exponents (q, r, theta, gamma).
///
/// Everything here is exact rational arithmetic. The conditions are strict
/// inequalities whose margins can be arbitrarily small, so no floating point
/// is used anywhere in this module.

#pragma once

#include "kslg/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace kslg::exponents {

class ExponentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when no exponent set can be constructed. For configurations that
/// satisfy the admissibility condition this is a contract violation.
class InfeasibleConfiguration : public ExponentError {
public:
    using ExponentError::ExponentError;
};

struct ParamConfig {
    int n = 2;
    Rational s{1};
    Rational kappa{2};
    std::optional<Rational> alpha;  ///< prototype exponent of mu(x) = mu1 |x|^alpha
    std::optional<Rational> mu1;

    /// Throws ExponentError when an invariant is violated.
    void validate() const;
};

enum class Branch {
    two_dimensional,     ///< n = 2
    kappa_at_least_two,  ///< n > 2, kappa >= 2
    case_one,            ///< n > 2, kappa in ((2(n-1)s+n)/(ns), 2)
    case_two,            ///< n > 2, kappa in ((2(n+2)s+2n)/((n+4)s), 2)
};

std::string to_string(Branch b);

struct ExponentSet {
    Rational p;
    Rational p_conj;
    Rational kappa_conj;
    Rational q;
    Rational r;
    Rational theta;
    Rational gamma;
    ExtendedRational q_sup;  ///< upper end of the interval q was picked from
    ExtendedRational r_sup;  ///< upper end of the interval r was picked from
    Branch branch = Branch::two_dimensional;
};

/// max{ 2n(s+1)/((n+2)s), min{ (2(n-1)s+n)/(ns), (2(n+2)s+2n)/((n+4)s) } }.
/// kappa is admissible iff it strictly exceeds this value.
Rational kappa_threshold(int n, const Rational& s);
Rational kappa_threshold(const ParamConfig& cfg);

/// n/alpha (infinite for alpha = 0): sup of the s with finite integral of mu^{-s}
/// for mu = mu1 |x|^alpha on a domain containing the origin.
ExtendedRational mu_integrability_exponent_bound(int n, const Rational& alpha);

/// max{ (2n+2a)/(n+2), min{ (2(n-1)+a)/n, (2(n+2)+2a)/(n+4) } }.
Rational prototype_kappa_threshold(int n, const Rational& alpha);

/// Lower bound min{(2n-2)/n, (2n+4)/(n+4)} that kappa must exceed before the
/// alpha threshold is meaningful.
Rational prototype_alpha_precondition(int n);

/// min{ ((k-2)n+2k)/2, max{ (k-2)n+2, ((k-2)n+4k-4)/2 } }; alpha is admissible
/// iff it lies strictly below this value.
Rational prototype_alpha_threshold(int n, const Rational& kappa);

struct DerivedExponents {
    Rational p;
    Rational p_conj;
    Rational kappa_conj;
};

/// p = kappa s/(s+1) together with the Hoelder conjugates of p and kappa.
DerivedExponents derived_exponents(const Rational& s, const Rational& kappa);

/// (1/r - 1/q) / (1/n - 1/2 + 1/r).
Rational theta(int n, const Rational& q, const Rational& r);

/// Half-open interval [lower, upper).
struct HalfOpenInterval {
    Rational lower;
    ExtendedRational upper;

    bool contains(const Rational& x) const { return x >= lower && ExtendedRational(x) < upper; }
};

/// [1, max{ kappa n / [kappa n / p - 2(kappa-1)]_+, n/(n-2) }) with c/0 = inf.
HalfOpenInterval r_admissible_range(int n, const Rational& p, const Rational& kappa);

/// Outcome of substituting an exponent set into every constraint.
struct ConstraintCheck {
    bool q_above_p_conj = false;
    bool r_admissible = false;
    bool theta_in_unit_interval = false;
    bool kappa_conj_theta_below_two = false;
    bool gamma_valid = false;

    bool all() const {
        return q_above_p_conj && r_admissible && theta_in_unit_interval && kappa_conj_theta_below_two &&
               gamma_valid;
    }
};

ConstraintCheck check_constraints(int n, const Rational& s, const Rational& kappa, const ExponentSet& set);

/// Deterministic construction with one branch per regime of (n, s, kappa).
/// Open-interval picks use midpoints (a + 1 when the right end is
/// infinite).
ExponentSet select_exponents(const ParamConfig& cfg);

/// Brute-force lattice scan over (q, r) in (p', p' + span] x [1, min(q, span)),
/// reporting whether any lattice point meets all constraints. Independent of
/// select_exponents; used as its oracle. The lattice is cubically graded
/// towards both ends of each axis and augmented with dyadic points so narrow
/// feasible windows are resolved. span <= 0 selects max(64, 2 ceil(p')).
bool feasible_by_search(const ParamConfig& cfg, int grid_steps, long span = 0);

/// Exponents (p~, kappa~) with 1 < p~ < p, 1 < kappa~ < kappa and whose
/// conjugates stay below q and gamma; the mixed norm used to compare members
/// of the regularized family.
struct MixedNormExponents {
    Rational p_tilde;
    Rational kappa_tilde;
};
MixedNormExponents mixed_norm_exponents(const Rational& kappa, const ExponentSet& set);

/// For the prototype mu = mu1|x|^alpha: returns some s < n/alpha on a
/// refining lattice with kappa > kappa_threshold(n, s), if one exists.
std::optional<Rational> bridging_s(int n, const Rational& alpha, const Rational& kappa, int max_levels = 64);

}  // namespace kslg::exponents
