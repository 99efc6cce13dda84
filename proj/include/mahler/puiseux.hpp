#ifndef MAHLER_PUISEUX_HPP
#define MAHLER_PUISEUX_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <mahler/local_ring.hpp>
#include <mahler/poly.hpp>
#include <mahler/rational.hpp>

namespace mahler
{

// Raised when a truncated series is read at or beyond its truncation order.
class PrecisionError : public std::runtime_error
{
public:
    // coefficient < 0 means "not tied to a particular a_i".
    PrecisionError(int coefficient, const Rational &required, const std::string &detail = {})
        : std::runtime_error(message(coefficient, required, detail)), coefficient_(coefficient), required_(required)
    {
    }

    int coefficient() const noexcept
    {
        return coefficient_;
    }

    // Smallest truncation order that would have been sufficient.
    const Rational &required_order() const noexcept
    {
        return required_;
    }

private:
    static std::string message(int coefficient, const Rational &required, const std::string &detail)
    {
        std::string who = coefficient >= 0 ? "coefficient a_" + std::to_string(coefficient) : std::string("series");
        std::string out = "insufficient precision: " + who + " must be known below z^" + required.get_str() +
                          " (give a truncation order of at least " + required.get_str() + ")";
        if (!detail.empty()) {
            out += "; " + detail;
        }
        return out;
    }

    int coefficient_;
    Rational required_;
};

// Zero tests per coefficient ring. Structural zero means "zero for every
// root" and is what storage uses; decided zero may split an algebraic class.
inline bool structurally_zero(const Rational &r)
{
    return r == 0;
}
inline bool structurally_zero(const Poly &p)
{
    return p.is_zero();
}
inline bool structurally_zero(const LocalElem &e)
{
    return e.is_zero();
}
inline bool decided_zero(const Rational &r)
{
    return r == 0;
}
inline bool decided_zero(const Poly &p)
{
    return p.is_zero();
}
inline bool decided_zero(const LocalElem &e)
{
    return e.decide_zero();
}
inline std::string coefficient_string(const Rational &r)
{
    return r.get_str();
}
inline std::string coefficient_string(const Poly &p)
{
    return p.to_string("λ");
}
inline std::string coefficient_string(const LocalElem &e)
{
    return e.to_string();
}

// Finite sum of c_e z^e with rational exponents e, optionally known only
// below a truncation order.
template <class R>
class PuiseuxPoly
{
public:
    using Terms = std::map<Rational, R>;

    PuiseuxPoly() = default;

    explicit PuiseuxPoly(std::optional<Rational> truncation) : trunc_(std::move(truncation))
    {
    }

    static PuiseuxPoly monomial(const R &c, const Rational &e)
    {
        PuiseuxPoly f;
        f.add_term(e, c);
        return f;
    }

    const Terms &terms() const noexcept
    {
        return terms_;
    }

    const std::optional<Rational> &truncation_order() const noexcept
    {
        return trunc_;
    }

    bool is_truncated() const noexcept
    {
        return trunc_.has_value();
    }

    // Structurally zero and exact.
    bool is_zero() const noexcept
    {
        return terms_.empty() && !trunc_;
    }

    bool empty() const noexcept
    {
        return terms_.empty();
    }

    std::size_t size() const noexcept
    {
        return terms_.size();
    }

    // Adds c z^e. Terms at or beyond the truncation order are unknown anyway
    // and are dropped.
    void add_term(const Rational &e, const R &c)
    {
        if (trunc_ && e >= *trunc_) {
            return;
        }
        if (structurally_zero(c)) {
            return;
        }
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
            return;
        }
        it->second = it->second + c;
        if (structurally_zero(it->second)) {
            terms_.erase(it);
        }
    }

    void set_term(const Rational &e, const R &c)
    {
        terms_.erase(e);
        add_term(e, c);
    }

    // Coefficient of z^e; reading at or beyond the truncation order throws.
    std::optional<R> coefficient(const Rational &e) const
    {
        if (trunc_ && e >= *trunc_) {
            throw PrecisionError(-1, e, "exponent " + e.get_str() + " is beyond the truncation order " +
                                            trunc_->get_str());
        }
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    // Least exponent with a nonzero coefficient; nullopt encodes +infinity
    // for the exact zero series.
    std::optional<Rational> valuation() const
    {
        for (const auto &[e, c] : terms_) {
            if (!decided_zero(c)) {
                return e;
            }
        }
        if (trunc_) {
            throw PrecisionError(-1, *trunc_, "the known part of the series vanishes");
        }
        return std::nullopt;
    }

    // Lower bound for the valuation from the stored data, no zero decisions.
    std::optional<Rational> valuation_lower_bound() const
    {
        if (!terms_.empty()) {
            return terms_.begin()->first;
        }
        return trunc_;
    }

    R cld() const
    {
        auto v = valuation();
        if (!v) {
            throw std::domain_error("lowest-degree coefficient of the zero series");
        }
        return terms_.at(*v);
    }

    std::vector<Rational> support() const
    {
        std::vector<Rational> out;
        out.reserve(terms_.size());
        for (const auto &kv : terms_) {
            out.push_back(kv.first);
        }
        return out;
    }

    // Least common denominator of the stored exponents.
    Integer ramification() const
    {
        Integer r = 1;
        for (const auto &kv : terms_) {
            r = lcm(r, Integer(kv.first.get_den()));
        }
        return r;
    }

    // z -> z^k for a positive rational k.
    PuiseuxPoly substitute_power(const Rational &k) const
    {
        if (k <= 0) {
            throw std::invalid_argument("substitution z -> z^k needs k > 0");
        }
        PuiseuxPoly out;
        if (trunc_) {
            out.trunc_ = *trunc_ * k;
        }
        for (const auto &[e, c] : terms_) {
            out.terms_.emplace_hint(out.terms_.end(), e * k, c);
        }
        return out;
    }

    PuiseuxPoly mahler_substitute(long p) const
    {
        if (p < 2) {
            throw std::invalid_argument("Mahler substitution needs p >= 2");
        }
        return substitute_power(Rational(p));
    }

    // Multiplication by z^w.
    PuiseuxPoly shifted(const Rational &w) const
    {
        PuiseuxPoly out;
        if (trunc_) {
            out.trunc_ = *trunc_ + w;
        }
        for (const auto &[e, c] : terms_) {
            out.terms_.emplace_hint(out.terms_.end(), e + w, c);
        }
        return out;
    }

    template <class S>
    PuiseuxPoly scaled(const S &s) const
    {
        PuiseuxPoly out(trunc_);
        for (const auto &[e, c] : terms_) {
            out.add_term(e, c * s);
        }
        return out;
    }

    PuiseuxPoly truncated_at(const Rational &order) const
    {
        PuiseuxPoly out(trunc_ ? std::min(*trunc_, order) : order);
        for (const auto &[e, c] : terms_) {
            if (e >= order) {
                break;
            }
            out.terms_.emplace_hint(out.terms_.end(), e, c);
        }
        return out;
    }

    // Drops the truncation metadata; callers assert the tail is zero.
    PuiseuxPoly with_truncation(std::optional<Rational> order) const
    {
        PuiseuxPoly out(order);
        for (const auto &[e, c] : terms_) {
            out.add_term(e, c);
        }
        return out;
    }

    template <class Fn>
    auto map_coefficients(Fn &&fn) const -> PuiseuxPoly<decltype(fn(std::declval<const R &>()))>
    {
        PuiseuxPoly<decltype(fn(std::declval<const R &>()))> out(trunc_);
        for (const auto &[e, c] : terms_) {
            out.add_term(e, fn(c));
        }
        return out;
    }

    PuiseuxPoly &operator+=(const PuiseuxPoly &o)
    {
        merge_truncation(o.trunc_);
        for (const auto &[e, c] : o.terms_) {
            add_term(e, c);
        }
        return *this;
    }

    PuiseuxPoly &operator-=(const PuiseuxPoly &o)
    {
        merge_truncation(o.trunc_);
        for (const auto &[e, c] : o.terms_) {
            add_term(e, -c);
        }
        return *this;
    }

    friend PuiseuxPoly operator+(PuiseuxPoly a, const PuiseuxPoly &b)
    {
        a += b;
        return a;
    }

    friend PuiseuxPoly operator-(PuiseuxPoly a, const PuiseuxPoly &b)
    {
        a -= b;
        return a;
    }

    friend PuiseuxPoly operator-(const PuiseuxPoly &a)
    {
        PuiseuxPoly out(a.trunc_);
        for (const auto &[e, c] : a.terms_) {
            out.terms_.emplace_hint(out.terms_.end(), e, -c);
        }
        return out;
    }

    friend PuiseuxPoly operator*(const PuiseuxPoly &a, const PuiseuxPoly &b)
    {
        std::optional<Rational> t;
        auto bound = [](const std::optional<Rational> &trunc, const std::optional<Rational> &lb) {
            return std::optional<Rational>(*trunc + *lb);
        };
        const auto la = a.valuation_lower_bound();
        const auto lb = b.valuation_lower_bound();
        if (a.trunc_ && lb) {
            t = bound(a.trunc_, lb);
        }
        if (b.trunc_ && la) {
            auto tb = bound(b.trunc_, la);
            t = t ? std::min(*t, *tb) : tb;
        }
        PuiseuxPoly out(t);
        for (const auto &[ea, ca] : a.terms_) {
            for (const auto &[eb, cb] : b.terms_) {
                out.add_term(ea + eb, ca * cb);
            }
        }
        return out;
    }

    friend bool operator==(const PuiseuxPoly &a, const PuiseuxPoly &b)
    {
        return a.trunc_ == b.trunc_ && a.terms_ == b.terms_;
    }

    friend bool operator!=(const PuiseuxPoly &a, const PuiseuxPoly &b)
    {
        return !(a == b);
    }

    // Integer-exponent form: f(z) = F(z^{1/e}) with e the ramification.
    std::pair<Integer, std::map<Integer, R>> integer_form() const
    {
        const Integer e = ramification();
        std::map<Integer, R> out;
        for (const auto &[x, c] : terms_) {
            Rational scaled = x * Rational(e);
            out.emplace(scaled.get_num(), c);
        }
        return {e, out};
    }

    static PuiseuxPoly from_integer_form(const Integer &e, const std::map<Integer, R> &terms)
    {
        PuiseuxPoly out;
        for (const auto &[n, c] : terms) {
            out.add_term(make_rational(n, e), c);
        }
        return out;
    }

    std::string to_string(std::string_view var = "z") const
    {
        std::string out;
        for (const auto &[e, c] : terms_) {
            std::string cs = coefficient_string(c);
            const bool compound = cs.find_first_of(" ") != std::string::npos;
            const bool negative = !compound && cs.front() == '-';
            if (negative) {
                cs.erase(0, 1);
                out += out.empty() ? "-" : " - ";
            } else if (!out.empty()) {
                out += " + ";
            }
            if (e == 0) {
                out += compound ? "(" + cs + ")" : cs;
                continue;
            }
            if (cs != "1") {
                out += compound ? "(" + cs + ")*" : cs + "*";
            }
            out += var;
            if (e != 1) {
                out += "^";
                out += is_integer(e) ? e.get_str() : "(" + e.get_str() + ")";
            }
        }
        if (out.empty()) {
            out = "0";
        }
        if (trunc_) {
            out += " + O(" + std::string(var) + "^" + trunc_->get_str() + ")";
        }
        return out;
    }

private:
    void merge_truncation(const std::optional<Rational> &o)
    {
        if (!o) {
            return;
        }
        if (!trunc_ || *o < *trunc_) {
            trunc_ = o;
            terms_.erase(terms_.lower_bound(*trunc_), terms_.end());
        }
    }

    Terms terms_;
    std::optional<Rational> trunc_;
};

} // namespace mahler

#endif
