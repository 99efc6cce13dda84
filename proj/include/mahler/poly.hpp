#ifndef MAHLER_POLY_HPP
#define MAHLER_POLY_HPP

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <mahler/rational.hpp>

namespace mahler
{

// Dense univariate polynomial over Q, lowest degree first. The coefficient
// vector never ends with a zero, so the zero polynomial is the empty vector.
class Poly
{
public:
    Poly() = default;

    explicit Poly(std::vector<Rational> coefficients) : c_(std::move(coefficients))
    {
        trim();
    }

    Poly(std::initializer_list<Rational> coefficients) : c_(coefficients)
    {
        trim();
    }

    static Poly constant(const Rational &c)
    {
        return Poly(std::vector<Rational>{c});
    }

    static Poly monomial(const Rational &c, int degree)
    {
        if (degree < 0) {
            throw std::invalid_argument("negative monomial degree");
        }
        std::vector<Rational> v(static_cast<std::size_t>(degree) + 1);
        v.back() = c;
        return Poly(std::move(v));
    }

    static Poly x()
    {
        return monomial(1, 1);
    }

    // x - c
    static Poly linear_root(const Rational &c)
    {
        return Poly{-c, 1};
    }

    int degree() const noexcept
    {
        return static_cast<int>(c_.size()) - 1;
    }

    bool is_zero() const noexcept
    {
        return c_.empty();
    }

    bool is_one() const
    {
        return c_.size() == 1 && c_[0] == 1;
    }

    bool is_constant() const noexcept
    {
        return c_.size() <= 1;
    }

    Rational coeff(int i) const
    {
        if (i < 0 || i > degree()) {
            return Rational(0);
        }
        return c_[static_cast<std::size_t>(i)];
    }

    const Rational &leading() const
    {
        if (c_.empty()) {
            throw std::domain_error("leading coefficient of the zero polynomial");
        }
        return c_.back();
    }

    const std::vector<Rational> &coefficients() const noexcept
    {
        return c_;
    }

    // Exponent of the lowest nonzero term.
    int low_degree() const
    {
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] != 0) {
                return static_cast<int>(i);
            }
        }
        throw std::domain_error("low degree of the zero polynomial");
    }

    Poly &operator+=(const Poly &o)
    {
        if (o.c_.size() > c_.size()) {
            c_.resize(o.c_.size());
        }
        for (std::size_t i = 0; i < o.c_.size(); ++i) {
            c_[i] += o.c_[i];
        }
        trim();
        return *this;
    }

    Poly &operator-=(const Poly &o)
    {
        if (o.c_.size() > c_.size()) {
            c_.resize(o.c_.size());
        }
        for (std::size_t i = 0; i < o.c_.size(); ++i) {
            c_[i] -= o.c_[i];
        }
        trim();
        return *this;
    }

    Poly &operator*=(const Poly &o)
    {
        *this = *this * o;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly &b)
    {
        a += b;
        return a;
    }

    friend Poly operator-(Poly a, const Poly &b)
    {
        a -= b;
        return a;
    }

    friend Poly operator-(Poly a)
    {
        for (auto &c : a.c_) {
            c = -c;
        }
        return a;
    }

    friend Poly operator*(const Poly &a, const Poly &b)
    {
        if (a.is_zero() || b.is_zero()) {
            return Poly();
        }
        std::vector<Rational> r(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) {
                continue;
            }
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                r[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return Poly(std::move(r));
    }

    Poly scaled(const Rational &s) const
    {
        if (s == 0) {
            return Poly();
        }
        Poly r = *this;
        for (auto &c : r.c_) {
            c *= s;
        }
        return r;
    }

    friend bool operator==(const Poly &a, const Poly &b)
    {
        return a.c_ == b.c_;
    }

    friend bool operator!=(const Poly &a, const Poly &b)
    {
        return !(a == b);
    }

    // Lexicographic on (degree, coefficients from the top); used only to
    // give deterministic orderings.
    friend bool operator<(const Poly &a, const Poly &b)
    {
        if (a.degree() != b.degree()) {
            return a.degree() < b.degree();
        }
        for (int i = a.degree(); i >= 0; --i) {
            const auto &x = a.c_[static_cast<std::size_t>(i)];
            const auto &y = b.c_[static_cast<std::size_t>(i)];
            if (x != y) {
                return x < y;
            }
        }
        return false;
    }

    Rational eval(const Rational &x) const
    {
        Rational r(0);
        for (std::size_t i = c_.size(); i-- > 0;) {
            r = r * x + c_[i];
        }
        return r;
    }

    Poly derivative() const
    {
        if (c_.size() <= 1) {
            return Poly();
        }
        std::vector<Rational> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) {
            r[i - 1] = c_[i] * static_cast<long>(i);
        }
        return Poly(std::move(r));
    }

    Poly monic() const
    {
        if (is_zero()) {
            return *this;
        }
        Rational inv = 1 / leading();
        return scaled(inv);
    }

    // Multiplies by x^k.
    Poly shifted_up(int k) const
    {
        if (is_zero() || k == 0) {
            return *this;
        }
        std::vector<Rational> r(static_cast<std::size_t>(k), Rational(0));
        r.insert(r.end(), c_.begin(), c_.end());
        return Poly(std::move(r));
    }

    // Drops the k lowest coefficients, i.e. the quotient by x^k.
    Poly shifted_down(int k) const
    {
        if (k >= static_cast<int>(c_.size())) {
            return Poly();
        }
        return Poly(std::vector<Rational>(c_.begin() + k, c_.end()));
    }

    // Keeps the terms of degree < n.
    Poly truncated(int n) const
    {
        if (n >= static_cast<int>(c_.size())) {
            return *this;
        }
        if (n <= 0) {
            return Poly();
        }
        return Poly(std::vector<Rational>(c_.begin(), c_.begin() + n));
    }

    // p(x + s)
    Poly taylor_shift(const Rational &s) const
    {
        std::vector<Rational> a = c_;
        const std::size_t n = a.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = n - 1; j > i; --j) {
                a[j - 1] += s * a[j];
            }
        }
        return Poly(std::move(a));
    }

    std::string to_string(std::string_view var = "λ") const
    {
        if (is_zero()) {
            return "0";
        }
        std::string out;
        for (int i = degree(); i >= 0; --i) {
            const Rational &c = c_[static_cast<std::size_t>(i)];
            if (c == 0) {
                continue;
            }
            Rational mag = abs(c);
            if (out.empty()) {
                if (c < 0) {
                    out += "-";
                }
            } else {
                out += c < 0 ? " - " : " + ";
            }
            const bool unit = mag == 1;
            if (i == 0) {
                out += mag.get_str();
                continue;
            }
            if (!unit) {
                out += mag.get_str();
                out += "*";
            }
            out += var;
            if (i > 1) {
                out += "^" + std::to_string(i);
            }
        }
        return out;
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0) {
            c_.pop_back();
        }
    }

    std::vector<Rational> c_;
};

inline std::pair<Poly, Poly> divmod(const Poly &a, const Poly &b)
{
    if (b.is_zero()) {
        throw std::domain_error("polynomial division by zero");
    }
    if (a.degree() < b.degree()) {
        return {Poly(), a};
    }
    std::vector<Rational> rem = a.coefficients();
    const int db = b.degree();
    const Rational inv_lead = 1 / b.leading();
    std::vector<Rational> quo(static_cast<std::size_t>(a.degree() - db + 1));
    for (int k = a.degree() - db; k >= 0; --k) {
        const Rational q = rem[static_cast<std::size_t>(k + db)] * inv_lead;
        quo[static_cast<std::size_t>(k)] = q;
        if (q == 0) {
            continue;
        }
        for (int i = 0; i <= db; ++i) {
            rem[static_cast<std::size_t>(k + i)] -= q * b.coefficients()[static_cast<std::size_t>(i)];
        }
    }
    rem.resize(static_cast<std::size_t>(db));
    return {Poly(std::move(quo)), Poly(std::move(rem))};
}

inline Poly operator%(const Poly &a, const Poly &b)
{
    return divmod(a, b).second;
}

// Exact quotient; throws if b does not divide a.
inline Poly exact_div(const Poly &a, const Poly &b)
{
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) {
        throw std::domain_error("inexact polynomial division");
    }
    return q;
}

inline bool divides(const Poly &b, const Poly &a)
{
    return (a % b).is_zero();
}

// Monic gcd; gcd(0, 0) = 0.
inline Poly gcd(Poly a, Poly b)
{
    while (!b.is_zero()) {
        Poly r = a % b;
        a = std::move(b);
        b = r.monic();
    }
    return a.monic();
}

struct Xgcd {
    Poly g; // monic
    Poly s;
    Poly t; // s*a + t*b == g
};

inline Xgcd xgcd(const Poly &a, const Poly &b)
{
    Poly r0 = a, r1 = b;
    Poly s0 = Poly::constant(1), s1;
    Poly t0, t1 = Poly::constant(1);
    while (!r1.is_zero()) {
        auto [q, r] = divmod(r0, r1);
        Poly s2 = s0 - q * s1;
        Poly t2 = t0 - q * t1;
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.is_zero()) {
        return {Poly(), Poly(), Poly()};
    }
    const Rational inv = 1 / r0.leading();
    return {r0.scaled(inv), s0.scaled(inv), t0.scaled(inv)};
}

inline Poly pow(const Poly &base, unsigned e)
{
    Poly r = Poly::constant(1);
    for (unsigned k = 0; k < e; ++k) {
        r *= base;
    }
    return r;
}

struct SquarefreeDecomposition {
    Rational unit;
    // Monic, squarefree, pairwise coprime factors with distinct multiplicities,
    // sorted by multiplicity.
    std::vector<std::pair<Poly, int>> factors;

    Poly expand() const
    {
        Poly r = Poly::constant(unit);
        for (const auto &[g, k] : factors) {
            r *= pow(g, static_cast<unsigned>(k));
        }
        return r;
    }
};

// Yun's algorithm.
inline SquarefreeDecomposition squarefree_decomposition(const Poly &f)
{
    if (f.is_zero()) {
        throw std::invalid_argument("squarefree decomposition of the zero polynomial");
    }
    SquarefreeDecomposition out{f.leading(), {}};
    if (f.degree() == 0) {
        return out;
    }
    const Poly fm = f.monic();
    const Poly a0 = gcd(fm, fm.derivative());
    Poly b = exact_div(fm, a0);
    Poly c = exact_div(fm.derivative(), a0);
    Poly d = c - b.derivative();
    int i = 1;
    while (b.degree() > 0) {
        Poly a = gcd(b, d);
        b = exact_div(b, a);
        c = exact_div(d, a);
        d = c - b.derivative();
        if (a.degree() > 0) {
            out.factors.emplace_back(std::move(a), i);
        }
        ++i;
    }
    return out;
}

inline bool is_squarefree(const Poly &f)
{
    return f.degree() <= 0 || gcd(f, f.derivative()).degree() == 0;
}

} // namespace mahler

#endif
