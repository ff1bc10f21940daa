#include "kslg/rational.hpp"

#include <cctype>
#include <limits>

namespace kslg {

ExtendedRational ExtendedRational::divide(const Rational& c, const Rational& d) {
    if (sgn(d) == 0) {
        if (sgn(c) <= 0) {
            throw std::domain_error("c/0 is only defined for c > 0");
        }
        return infinity();
    }
    return ExtendedRational(Rational(c / d));
}

const Rational& ExtendedRational::value() const {
    if (infinite_) {
        throw std::domain_error("value() of an infinite bound");
    }
    return value_;
}

bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.infinite_ || b.infinite_) {
        return a.infinite_ == b.infinite_;
    }
    return a.value_ == b.value_;
}

std::strong_ordering operator<=>(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
    if (a.infinite_) return std::strong_ordering::greater;
    if (b.infinite_) return std::strong_ordering::less;
    const int c = cmp(a.value_, b.value_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

ExtendedRational max(const ExtendedRational& a, const ExtendedRational& b) { return a < b ? b : a; }
ExtendedRational min(const ExtendedRational& a, const ExtendedRational& b) { return b < a ? b : a; }

Rational positive_part(const Rational& x) { return sgn(x) > 0 ? x : Rational(0); }

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

Rational parse_integer(std::string_view s) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) {
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    }
    mpz_class z(std::string(s), 10);
    if (negative) z = -z;
    return Rational(z);
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) {
        throw std::invalid_argument("empty rational literal");
    }

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_integer(text.substr(0, slash));
        Rational den = parse_integer(text.substr(slash + 1));
        if (sgn(den) == 0) {
            throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        }
        Rational r = num / den;
        r.canonicalize();
        return r;
    }

    bool negative = false;
    std::string_view s = text;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    long exponent = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        const Rational ex = parse_integer(s.substr(e + 1));
        if (abs(ex) > 4096) {
            throw std::invalid_argument("exponent out of range in '" + std::string(text) + "'");
        }
        exponent = ex.get_num().get_si();
        s = s.substr(0, e);
    }

    std::string digits;
    long fraction_digits = 0;
    if (const auto dot = s.find('.'); dot != std::string_view::npos) {
        const auto int_part = s.substr(0, dot);
        const auto frac_part = s.substr(dot + 1);
        if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
            (!frac_part.empty() && !all_digits(frac_part))) {
            throw std::invalid_argument("not a number: '" + std::string(text) + "'");
        }
        digits = std::string(int_part) + std::string(frac_part);
        fraction_digits = static_cast<long>(frac_part.size());
    } else {
        if (!all_digits(s)) {
            throw std::invalid_argument("not a number: '" + std::string(text) + "'");
        }
        digits = std::string(s);
    }

    mpz_class mantissa(digits.empty() ? std::string("0") : digits, 10);
    const long shift = exponent - fraction_digits;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    Rational r = shift >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
    r.canonicalize();
    if (negative) r = -r;
    return r;
}

std::string to_string(const Rational& x) { return x.get_str(); }

std::string to_string(const ExtendedRational& x) { return x.is_infinite() ? "inf" : x.value().get_str(); }

double to_double(const Rational& x) { return x.get_d(); }

double to_double(const ExtendedRational& x) {
    return x.is_infinite() ? std::numeric_limits<double>::infinity() : x.value().get_d();
}

}  // namespace kslg
