#ifndef MAHLER_RATIONAL_HPP
#define MAHLER_RATIONAL_HPP

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace mahler
{

// Exact numbers. mpq_class keeps every value canonical (lowest terms,
// positive denominator), which is what all comparisons below rely on.
using Integer = mpz_class;
using Rational = mpq_class;

class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string &what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"), position_(position)
    {
    }

    std::size_t position() const noexcept
    {
        return position_;
    }

private:
    std::size_t position_;
};

inline Rational make_rational(long num, long den = 1)
{
    if (den == 0) {
        throw std::invalid_argument("zero denominator");
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(const Integer &num, const Integer &den)
{
    if (den == 0) {
        throw std::invalid_argument("zero denominator");
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational &r)
{
    return r.get_str();
}

inline std::string to_string(const Integer &z)
{
    return z.get_str();
}

// Parses "-3/4", "+5", "12". Decimal points and exponents are rejected so
// that no binary floating point value can sneak into an exact computation.
inline Rational parse_rational(std::string_view text, std::size_t offset = 0)
{
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    std::string num;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        if (text[i] == '-') {
            num.push_back('-');
        }
        ++i;
    }
    const std::size_t digits_begin = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        num.push_back(text[i++]);
    }
    if (i == digits_begin) {
        throw ParseError("expected an integer or a fraction in \"" + std::string(text) + "\"", offset + i);
    }
    std::string den = "1";
    if (i < text.size() && text[i] == '/') {
        ++i;
        const std::size_t den_begin = i;
        den.clear();
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            den.push_back(text[i++]);
        }
        if (i == den_begin) {
            throw ParseError("missing denominator in \"" + std::string(text) + "\"", offset + i);
        }
    }
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    if (i != text.size()) {
        if (text[i] == '.' || text[i] == 'e' || text[i] == 'E') {
            throw ParseError("floating-point literals are not accepted: \"" + std::string(text) + "\"", offset + i);
        }
        throw ParseError("unexpected character in number \"" + std::string(text) + "\"", offset + i);
    }
    const Integer d(den);
    if (d == 0) {
        throw ParseError("zero denominator in \"" + std::string(text) + "\"", offset);
    }
    return make_rational(Integer(num), d);
}

inline bool is_integer(const Rational &r)
{
    return r.get_den() == 1;
}

inline Integer floor(const Rational &r)
{
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline Integer ceil(const Rational &r)
{
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline Integer gcd(const Integer &a, const Integer &b)
{
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Integer lcm(const Integer &a, const Integer &b)
{
    Integer l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

inline Integer ipow(const Integer &base, unsigned long e)
{
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rational pow(const Rational &base, unsigned long e)
{
    Rational r(1);
    for (unsigned long k = 0; k < e; ++k) {
        r *= base;
    }
    return r;
}

// True when r lies on the grid (1/d)Z.
inline bool on_grid(const Rational &r, const Integer &d)
{
    return d % r.get_den() == 0;
}

inline long to_long(const Integer &z)
{
    if (!z.fits_slong_p()) {
        throw std::overflow_error("integer " + z.get_str() + " does not fit in a machine word");
    }
    return z.get_si();
}

} // namespace mahler

#endif
