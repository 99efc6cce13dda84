#ifndef MAHLER_EQUATION_HPP
#define MAHLER_EQUATION_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <mahler/puiseux.hpp>
#include <mahler/rational.hpp>

namespace mahler
{

class InvalidEquation : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

using Series = PuiseuxPoly<Rational>;

// a_m(z) f(z^{p^m}) + ... + a_1(z) f(z^p) + a_0(z) f(z) = 0
struct MahlerEquation {
    long p = 2;
    std::vector<Series> coefficients; // a_0 .. a_m
    std::string name;

    int order() const
    {
        return static_cast<int>(coefficients.size()) - 1;
    }

    const Series &a(int i) const
    {
        return coefficients.at(static_cast<std::size_t>(i));
    }

    void validate() const
    {
        if (p < 2) {
            throw InvalidEquation("p must be at least 2, got " + std::to_string(p));
        }
        if (coefficients.size() < 2) {
            throw InvalidEquation("the equation needs order m >= 1 (at least a_0 and a_1)");
        }
        if (coefficients.front().empty()) {
            throw InvalidEquation("a_0 = 0");
        }
        if (coefficients.back().empty()) {
            throw InvalidEquation("a_m = 0 (a_" + std::to_string(order()) + " has no known nonzero term)");
        }
    }

    friend bool operator==(const MahlerEquation &a, const MahlerEquation &b)
    {
        return a.p == b.p && a.coefficients == b.coefficients;
    }
};

// z -> z^delta followed by multiplication with z^{-shift}.
struct Normalization {
    Integer delta = 1;
    Rational shift = 0;

    friend bool operator==(const Normalization &a, const Normalization &b)
    {
        return a.delta == b.delta && a.shift == b.shift;
    }
};

struct NormalizedEquation {
    MahlerEquation equation;
    Normalization normalization;
    Rational nu; // max valuation after normalization
    std::vector<std::optional<Rational>> valuations; // nullopt for a zero a_i

    // Translates an exponent of the normalized equation back to the input.
    Rational original_exponent(const Rational &e) const
    {
        return (e + normalization.shift) / Rational(normalization.delta);
    }
};

inline MahlerEquation ramify(const MahlerEquation &eq, const Rational &k)
{
    MahlerEquation out = eq;
    for (auto &a : out.coefficients) {
        a = a.substitute_power(k);
    }
    return out;
}

inline MahlerEquation multiply_by_monomial(const MahlerEquation &eq, const Rational &w)
{
    MahlerEquation out = eq;
    for (auto &a : out.coefficients) {
        a = a.shifted(w);
    }
    return out;
}

// L_c: a_i scaled by c^i.
inline MahlerEquation twist_equation(const MahlerEquation &eq, const Rational &c)
{
    if (c == 0) {
        throw InvalidEquation("twisting needs c != 0");
    }
    MahlerEquation out = eq;
    Rational ci = 1;
    for (auto &a : out.coefficients) {
        a = a.scaled(ci);
        ci *= c;
    }
    return out;
}

inline NormalizedEquation normalize_equation(const MahlerEquation &raw)
{
    raw.validate();
    Integer delta = 1;
    for (const auto &a : raw.coefficients) {
        delta = lcm(delta, a.ramification());
        if (a.truncation_order()) {
            delta = lcm(delta, Integer(a.truncation_order()->get_den()));
        }
    }
    MahlerEquation eq = ramify(raw, Rational(delta));
    std::vector<std::optional<Rational>> vals;
    std::optional<Rational> vmin;
    for (std::size_t i = 0; i < eq.coefficients.size(); ++i) {
        std::optional<Rational> v;
        try {
            v = eq.coefficients[i].valuation();
        } catch (const PrecisionError &e) {
            throw PrecisionError(static_cast<int>(i), e.required_order() / Rational(delta),
                                 "its known part vanishes, so its valuation is unknown");
        }
        if (v && (!vmin || *v < *vmin)) {
            vmin = v;
        }
        vals.push_back(v);
    }
    const Rational shift = *vmin;
    eq = multiply_by_monomial(eq, -shift);
    Rational nu = 0;
    for (auto &v : vals) {
        if (v) {
            *v -= shift;
            nu = std::max(nu, *v);
        }
    }
    return NormalizedEquation{std::move(eq), Normalization{delta, shift}, nu, std::move(vals)};
}

} // namespace mahler

#endif
