#ifndef MAHLER_ALGEBRAIC_HPP
#define MAHLER_ALGEBRAIC_HPP

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <mahler/poly.hpp>
#include <mahler/rational.hpp>

namespace mahler
{

// Thrown when a computation over Q[x]/(q) meets a zero divisor: q = left*right
// with both factors nontrivial. The caller restarts on each factor.
class SplitRequired : public std::runtime_error
{
public:
    SplitRequired(Poly left, Poly right)
        : std::runtime_error("zero divisor met; defining polynomial splits"), left_(std::move(left)),
          right_(std::move(right))
    {
    }

    const Poly &left() const noexcept
    {
        return left_;
    }

    const Poly &right() const noexcept
    {
        return right_;
    }

private:
    Poly left_;
    Poly right_;
};

using Modulus = std::shared_ptr<const Poly>;

inline Modulus make_modulus(const Poly &q)
{
    if (q.degree() < 1) {
        throw std::invalid_argument("defining polynomial must have positive degree");
    }
    return std::make_shared<const Poly>(q.monic());
}

// Element of Q[x]/(q) for a squarefree monic q. Equality is structural,
// which is sound because the representative is always reduced.
class AlgElem
{
public:
    AlgElem() = default;

    AlgElem(Modulus mod, Poly rep) : mod_(std::move(mod)), rep_(std::move(rep))
    {
        reduce();
    }

    AlgElem(Modulus mod, const Rational &r) : mod_(std::move(mod)), rep_(Poly::constant(r))
    {
    }

    static AlgElem generator(const Modulus &mod)
    {
        return AlgElem(mod, Poly::x());
    }

    const Modulus &modulus() const noexcept
    {
        return mod_;
    }

    const Poly &rep() const noexcept
    {
        return rep_;
    }

    // Structural zero: vanishes at every root of q.
    bool is_zero() const noexcept
    {
        return rep_.is_zero();
    }

    bool is_rational() const noexcept
    {
        return rep_.degree() <= 0;
    }

    Rational as_rational() const
    {
        if (!is_rational()) {
            throw std::domain_error("algebraic element is not rational");
        }
        return rep_.coeff(0);
    }

    // Zero test in the D5 sense: either the element vanishes at all roots
    // of q, or at none of them; anything else splits q.
    bool decide_zero() const
    {
        if (rep_.is_zero()) {
            return true;
        }
        if (rep_.degree() == 0) {
            return false;
        }
        Poly g = gcd(rep_, *mod_);
        if (g.degree() == 0) {
            return false;
        }
        throw SplitRequired(g, exact_div(*mod_, g));
    }

    AlgElem inverse() const
    {
        if (rep_.is_zero()) {
            throw std::domain_error("inverse of zero");
        }
        if (rep_.degree() == 0) {
            return AlgElem(mod_, 1 / rep_.coeff(0));
        }
        Xgcd e = xgcd(rep_, *mod_);
        if (e.g.degree() != 0) {
            throw SplitRequired(e.g, exact_div(*mod_, e.g));
        }
        return AlgElem(mod_, e.s);
    }

    AlgElem &operator+=(const AlgElem &o)
    {
        check(o);
        rep_ += o.rep_;
        return *this;
    }

    AlgElem &operator-=(const AlgElem &o)
    {
        check(o);
        rep_ -= o.rep_;
        return *this;
    }

    AlgElem &operator*=(const AlgElem &o)
    {
        check(o);
        if (rep_.degree() <= 0 && o.rep_.degree() <= 0) {
            rep_ = rep_.is_zero() || o.rep_.is_zero() ? Poly() : Poly::constant(rep_.coeff(0) * o.rep_.coeff(0));
            return *this;
        }
        rep_ = rep_ * o.rep_;
        reduce();
        return *this;
    }

    AlgElem &operator*=(const Rational &s)
    {
        rep_ = rep_.scaled(s);
        return *this;
    }

    friend AlgElem operator+(AlgElem a, const AlgElem &b)
    {
        a += b;
        return a;
    }

    friend AlgElem operator-(AlgElem a, const AlgElem &b)
    {
        a -= b;
        return a;
    }

    friend AlgElem operator-(AlgElem a)
    {
        a.rep_ = -a.rep_;
        return a;
    }

    friend AlgElem operator*(AlgElem a, const AlgElem &b)
    {
        a *= b;
        return a;
    }

    friend AlgElem operator*(AlgElem a, const Rational &s)
    {
        a *= s;
        return a;
    }

    friend bool operator==(const AlgElem &a, const AlgElem &b)
    {
        return a.rep_ == b.rep_;
    }

    friend bool operator!=(const AlgElem &a, const AlgElem &b)
    {
        return !(a == b);
    }

    std::string to_string(std::string_view var = "c") const
    {
        if (rep_.degree() <= 0) {
            return to_string_rational();
        }
        return "(" + rep_.to_string(var) + ")";
    }

private:
    std::string to_string_rational() const
    {
        return rep_.coeff(0).get_str();
    }

    void reduce()
    {
        if (mod_ && rep_.degree() >= mod_->degree()) {
            rep_ = rep_ % *mod_;
        }
    }

    void check(const AlgElem &o) const
    {
        if (mod_ != o.mod_ && !(mod_ && o.mod_ && *mod_ == *o.mod_)) {
            throw std::logic_error("mixing elements of different algebraic extensions");
        }
    }

    Modulus mod_;
    Poly rep_;
};

// Largest k with q^k | f. If the roots of q occur in f with unequal
// multiplicities, q is split.
inline int factor_multiplicity(const Poly &f, const Poly &q)
{
    if (q.degree() < 1) {
        throw std::invalid_argument("factor_multiplicity needs a nonconstant q");
    }
    if (f.is_zero()) {
        throw std::invalid_argument("factor_multiplicity of the zero polynomial");
    }
    const Poly qm = q.monic();
    Poly cur = f;
    int k = 0;
    for (;;) {
        Poly g = gcd(cur, qm);
        if (g.degree() == 0) {
            return k;
        }
        if (g.degree() < qm.degree()) {
            throw SplitRequired(g, exact_div(qm, g));
        }
        cur = exact_div(cur, qm);
        ++k;
    }
}

// An exponent class: the roots of a squarefree monic q with q(0) != 0, all of
// which share the same multiplicity as a root of each characteristic
// polynomial. Slope indices are 1-based.
class ExponentClass
{
public:
    ExponentClass() = default;

    ExponentClass(Poly defining, std::vector<int> multiplicities)
        : defining_(defining.monic()), mult_(std::move(multiplicities))
    {
        if (defining_.degree() < 1) {
            throw std::invalid_argument("exponent class needs a nonconstant defining polynomial");
        }
        if (defining_.coeff(0) == 0) {
            throw std::invalid_argument("exponents are nonzero; defining polynomial vanishes at 0");
        }
        modulus_ = make_modulus(defining_);
        offsets_.assign(mult_.size(), 0);
        for (std::size_t j = 1; j < mult_.size(); ++j) {
            offsets_[j] = offsets_[j - 1] + mult_[j - 1];
        }
    }

    const Poly &defining() const noexcept
    {
        return defining_;
    }

    const Modulus &modulus() const noexcept
    {
        return modulus_;
    }

    int degree() const noexcept
    {
        return defining_.degree();
    }

    std::size_t slope_count() const noexcept
    {
        return mult_.size();
    }

    // m_{c,j}
    int multiplicity(std::size_t j) const
    {
        return mult_.at(j - 1);
    }

    // s_{c,j}
    int offset(std::size_t j) const
    {
        return offsets_.at(j - 1);
    }

    // s_{c,j} + m_{c,j}, the λ-adic working precision for slope j.
    int precision(std::size_t j) const
    {
        return offset(j) + multiplicity(j);
    }

    bool attached(std::size_t j) const
    {
        return multiplicity(j) > 0;
    }

    std::size_t first_slope() const
    {
        for (std::size_t j = 0; j < mult_.size(); ++j) {
            if (mult_[j] > 0) {
                return j + 1;
            }
        }
        return 0;
    }

    const std::vector<int> &multiplicities() const noexcept
    {
        return mult_;
    }

    bool is_rational() const noexcept
    {
        return defining_.degree() == 1;
    }

    // The exponent itself when the class has degree one.
    Rational rational_value() const
    {
        if (!is_rational()) {
            throw std::domain_error("exponent class is not rational");
        }
        return -defining_.coeff(0);
    }

    AlgElem generator() const
    {
        return AlgElem::generator(modulus_);
    }

    ExponentClass restricted_to(const Poly &factor) const
    {
        if (!divides(factor.monic(), defining_)) {
            throw std::invalid_argument("restriction to a polynomial that does not divide the defining polynomial");
        }
        return ExponentClass(factor, mult_);
    }

    friend bool operator==(const ExponentClass &a, const ExponentClass &b)
    {
        return a.defining_ == b.defining_ && a.mult_ == b.mult_;
    }

    friend bool operator!=(const ExponentClass &a, const ExponentClass &b)
    {
        return !(a == b);
    }

    // Deterministic order: first attached slope, then degree, then coefficients.
    friend bool operator<(const ExponentClass &a, const ExponentClass &b)
    {
        if (a.first_slope() != b.first_slope()) {
            return a.first_slope() < b.first_slope();
        }
        return a.defining_ < b.defining_;
    }

private:
    Poly defining_;
    Modulus modulus_;
    std::vector<int> mult_;
    std::vector<int> offsets_;
};

// Runs fn(q) and restarts it on both factors whenever it throws SplitRequired.
// Returns one result per final branch, ordered by defining polynomial.
template <class Fn>
auto with_dynamic_evaluation(const Poly &defining, Fn &&fn)
{
    using Result = decltype(fn(defining));
    std::vector<std::pair<Poly, Result>> done;
    std::vector<Poly> work{defining.monic()};
    while (!work.empty()) {
        Poly q = std::move(work.back());
        work.pop_back();
        try {
            done.emplace_back(q, fn(q));
        } catch (const SplitRequired &split) {
            if (split.left().degree() < 1 || split.right().degree() < 1 ||
                split.left().degree() + split.right().degree() != q.degree()) {
                throw std::logic_error("malformed split of " + q.to_string("x"));
            }
            work.push_back(split.left().monic());
            work.push_back(split.right().monic());
        }
    }
    std::sort(done.begin(), done.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    return done;
}

// Combines per-branch values: the unique r mod q with r = values[i] mod q_i.
inline Poly crt(const std::vector<std::pair<Poly, Poly>> &branches)
{
    Poly modulus = Poly::constant(1);
    Poly acc;
    for (const auto &[qi, ri] : branches) {
        Xgcd e = xgcd(modulus, qi);
        if (e.g.degree() != 0) {
            throw std::invalid_argument("CRT moduli are not coprime");
        }
        // acc + modulus * k with k = (ri - acc) * modulus^{-1} mod qi
        Poly k = ((ri - acc) * e.s) % qi;
        acc = acc + modulus * k;
        modulus = modulus * qi;
        acc = acc % modulus;
    }
    return acc;
}

// Splits the nonzero roots of each characteristic polynomial into classes
// with uniform multiplicity vectors. charpolys are given with the power of
// λ already removed.
inline std::vector<ExponentClass> refine_exponent_classes(const std::vector<Poly> &charpolys)
{
    const std::size_t kappa = charpolys.size();
    std::vector<std::pair<Poly, std::vector<int>>> classes;
    for (std::size_t j = 0; j < kappa; ++j) {
        if (charpolys[j].coeff(0) == 0) {
            throw std::invalid_argument("characteristic polynomial still has the root 0");
        }
        SquarefreeDecomposition sf = squarefree_decomposition(charpolys[j]);
        for (auto &[g0, k] : sf.factors) {
            Poly g = g0;
            std::vector<std::pair<Poly, std::vector<int>>> next;
            for (auto &[q, mult] : classes) {
                Poly h = gcd(q, g);
                if (h.degree() < 1) {
                    next.emplace_back(std::move(q), std::move(mult));
                    continue;
                }
                Poly rest = exact_div(q, h);
                std::vector<int> mh = mult;
                mh[j] = k;
                next.emplace_back(h, std::move(mh));
                if (rest.degree() >= 1) {
                    next.emplace_back(std::move(rest), std::move(mult));
                }
                g = exact_div(g, h);
            }
            if (g.degree() >= 1) {
                std::vector<int> mult(kappa, 0);
                mult[j] = k;
                next.emplace_back(g.monic(), std::move(mult));
            }
            classes = std::move(next);
        }
    }
    std::vector<ExponentClass> out;
    out.reserve(classes.size());
    for (auto &[q, mult] : classes) {
        out.emplace_back(q, std::move(mult));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace mahler

#endif
