/// @file rational.hpp
/// @brief Exact rational arithmetic used by the exponent algebra.
///
/// Backed by GMP's mpq_class. ExtendedRational adds a single +infinity
/// element so that bounds of the form c/0 can be carried through min/max
/// without special-casing at every call site.

#pragma once

#include <gmpxx.h>

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kslg {

using Rational = mpq_class;

class ExtendedRational {
public:
    ExtendedRational() = default;
    ExtendedRational(Rational value) : value_(std::move(value)) {}  // NOLINT(implicit)
    ExtendedRational(long value) : value_(value) {}                // NOLINT(implicit)

    static ExtendedRational infinity() {
        ExtendedRational r;
        r.infinite_ = true;
        return r;
    }

    /// c / d with the convention c/0 = +inf for c > 0.
    static ExtendedRational divide(const Rational& c, const Rational& d);

    bool is_infinite() const { return infinite_; }
    const Rational& value() const;

    friend bool operator==(const ExtendedRational& a, const ExtendedRational& b);
    friend std::strong_ordering operator<=>(const ExtendedRational& a, const ExtendedRational& b);

private:
    Rational value_{0};
    bool infinite_ = false;
};

ExtendedRational max(const ExtendedRational& a, const ExtendedRational& b);
ExtendedRational min(const ExtendedRational& a, const ExtendedRational& b);

/// Positive part [x]_+.
Rational positive_part(const Rational& x);

/// Parses "a/b", "a", or a decimal such as "-1.25e-3" into an exact rational.
/// Decimal digits are expanded exactly; no binary floating point is involved.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& x);
std::string to_string(const ExtendedRational& x);
double to_double(const Rational& x);
double to_double(const ExtendedRational& x);

}  // namespace kslg
