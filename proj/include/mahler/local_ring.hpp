#ifndef MAHLER_LOCAL_RING_HPP
#define MAHLER_LOCAL_RING_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <mahler/algebraic.hpp>
#include <mahler/poly.hpp>
#include <mahler/rational.hpp>

namespace mahler
{

// Element of A[[t]]/(t^N) with A = Q[x]/(q) and t = λ - c, where c is the
// class of x. Coefficients are stored densely, always exactly N of them.
class LocalElem
{
public:
    LocalElem() = default;

    LocalElem(Modulus mod, int n) : mod_(std::move(mod)), c_(check_modulus(n), AlgElem(mod_, Poly()))
    {
    }

    LocalElem(Modulus mod, std::vector<AlgElem> coefficients) : mod_(std::move(mod)), c_(std::move(coefficients))
    {
        check_modulus(static_cast<int>(c_.size()));
    }

    static LocalElem zero(const Modulus &mod, int n)
    {
        return LocalElem(mod, n);
    }

    static LocalElem constant(const Modulus &mod, int n, const AlgElem &a)
    {
        LocalElem r(mod, n);
        r.c_[0] = a;
        return r;
    }

    static LocalElem constant(const Modulus &mod, int n, const Rational &a)
    {
        return constant(mod, n, AlgElem(mod, a));
    }

    // t^k, zero when k >= N.
    static LocalElem t_power(const Modulus &mod, int n, int k)
    {
        LocalElem r(mod, n);
        if (k < n) {
            r.c_[static_cast<std::size_t>(k)] = AlgElem(mod, Rational(1));
        }
        return r;
    }

    // λ = c + t
    static LocalElem lambda(const Modulus &mod, int n)
    {
        LocalElem r(mod, n);
        r.c_[0] = AlgElem::generator(mod);
        if (n > 1) {
            r.c_[1] = AlgElem(mod, Rational(1));
        }
        return r;
    }

    // P(λ) expanded at λ = c + t.
    static LocalElem from_lambda_poly(const Modulus &mod, int n, const Poly &p)
    {
        LocalElem r(mod, n);
        const AlgElem c = AlgElem::generator(mod);
        for (int i = p.degree(); i >= 0; --i) {
            // r <- r * (c + t) + p_i
            for (int k = n - 1; k >= 0; --k) {
                AlgElem v = r.c_[static_cast<std::size_t>(k)] * c;
                if (k > 0) {
                    v += r.c_[static_cast<std::size_t>(k - 1)];
                }
                r.c_[static_cast<std::size_t>(k)] = std::move(v);
            }
            r.c_[0] += AlgElem(mod, p.coeff(i));
        }
        return r;
    }

    // Treats t-polynomial coefficients f_k as a polynomial in t.
    static LocalElem from_t_poly(const Modulus &mod, int n, const std::vector<AlgElem> &coefficients)
    {
        LocalElem r(mod, n);
        for (std::size_t k = 0; k < coefficients.size() && k < static_cast<std::size_t>(n); ++k) {
            r.c_[k] = coefficients[k];
        }
        return r;
    }

    int modulus_order() const noexcept
    {
        return static_cast<int>(c_.size());
    }

    const Modulus &modulus() const noexcept
    {
        return mod_;
    }

    const AlgElem &operator[](int k) const
    {
        return c_.at(static_cast<std::size_t>(k));
    }

    const std::vector<AlgElem> &coefficients() const noexcept
    {
        return c_;
    }

    bool is_zero() const noexcept
    {
        for (const auto &a : c_) {
            if (!a.is_zero()) {
                return false;
            }
        }
        return true;
    }

    // D5 zero test over all roots of q.
    bool decide_zero() const
    {
        return valuation() == modulus_order();
    }

    // (λ - c)-adic valuation, N when the element is zero.
    int valuation() const
    {
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (!c_[k].decide_zero()) {
                return static_cast<int>(k);
            }
        }
        return modulus_order();
    }

    // Degree as a polynomial in t, -1 for zero. Structural.
    int degree() const noexcept
    {
        for (std::size_t k = c_.size(); k-- > 0;) {
            if (!c_[k].is_zero()) {
                return static_cast<int>(k);
            }
        }
        return -1;
    }

    LocalElem truncated(int n) const
    {
        LocalElem r(mod_, n);
        for (int k = 0; k < n && k < modulus_order(); ++k) {
            r.c_[static_cast<std::size_t>(k)] = c_[static_cast<std::size_t>(k)];
        }
        return r;
    }

    // Quotient by t^k, keeping modulus N - k.
    LocalElem shifted_down(int k) const
    {
        if (k > modulus_order()) {
            throw std::invalid_argument("shift beyond the modulus");
        }
        std::vector<AlgElem> v(c_.begin() + k, c_.end());
        if (v.empty()) {
            throw std::invalid_argument("shift leaves an empty local element");
        }
        return LocalElem(mod_, std::move(v));
    }

    // Product with t^k at modulus n.
    LocalElem shifted_up(int k, int n) const
    {
        LocalElem r(mod_, n);
        for (int i = 0; i < modulus_order() && i + k < n; ++i) {
            r.c_[static_cast<std::size_t>(i + k)] = c_[static_cast<std::size_t>(i)];
        }
        return r;
    }

    LocalElem &operator+=(const LocalElem &o)
    {
        check(o);
        for (std::size_t k = 0; k < c_.size(); ++k) {
            c_[k] += o.c_[k];
        }
        return *this;
    }

    LocalElem &operator-=(const LocalElem &o)
    {
        check(o);
        for (std::size_t k = 0; k < c_.size(); ++k) {
            c_[k] -= o.c_[k];
        }
        return *this;
    }

    friend LocalElem operator+(LocalElem a, const LocalElem &b)
    {
        a += b;
        return a;
    }

    friend LocalElem operator-(LocalElem a, const LocalElem &b)
    {
        a -= b;
        return a;
    }

    friend LocalElem operator-(LocalElem a)
    {
        for (auto &x : a.c_) {
            x = -x;
        }
        return a;
    }

    friend LocalElem operator*(const LocalElem &a, const LocalElem &b)
    {
        a.check(b);
        const std::size_t n = a.c_.size();
        LocalElem r(a.mod_, static_cast<int>(n));
        for (std::size_t i = 0; i < n; ++i) {
            if (a.c_[i].is_zero()) {
                continue;
            }
            for (std::size_t j = 0; i + j < n; ++j) {
                if (b.c_[j].is_zero()) {
                    continue;
                }
                r.c_[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }

    LocalElem &operator*=(const LocalElem &o)
    {
        *this = *this * o;
        return *this;
    }

    LocalElem scaled(const AlgElem &s) const
    {
        LocalElem r = *this;
        for (auto &x : r.c_) {
            if (!x.is_zero()) {
                x *= s;
            }
        }
        return r;
    }

    LocalElem scaled(const Rational &s) const
    {
        LocalElem r = *this;
        for (auto &x : r.c_) {
            if (!x.is_zero()) {
                x *= s;
            }
        }
        return r;
    }

    friend LocalElem operator*(const LocalElem &a, const Rational &s)
    {
        return a.scaled(s);
    }

    friend LocalElem operator*(const LocalElem &a, const AlgElem &s)
    {
        return a.scaled(s);
    }

    // Requires a unit: the constant coefficient must be invertible in A.
    LocalElem inverse() const
    {
        if (c_[0].decide_zero()) {
            throw std::domain_error("inverse of a non-unit local element");
        }
        const std::size_t n = c_.size();
        LocalElem r(mod_, static_cast<int>(n));
        const AlgElem inv0 = c_[0].inverse();
        r.c_[0] = inv0;
        for (std::size_t k = 1; k < n; ++k) {
            AlgElem acc(mod_, Poly());
            for (std::size_t i = 1; i <= k; ++i) {
                if (!c_[i].is_zero()) {
                    acc += c_[i] * r.c_[k - i];
                }
            }
            r.c_[k] = -(acc * inv0);
        }
        return r;
    }

    friend bool operator==(const LocalElem &a, const LocalElem &b)
    {
        return a.c_ == b.c_;
    }

    friend bool operator!=(const LocalElem &a, const LocalElem &b)
    {
        return !(a == b);
    }

    // The canonical representative as a polynomial in λ; only for rational c.
    Poly to_lambda_poly() const
    {
        if (mod_->degree() != 1) {
            throw std::domain_error("λ-polynomial form needs a rational exponent");
        }
        const Rational c = -mod_->coeff(0);
        Poly out;
        Poly tk = Poly::constant(1);
        const Poly t = Poly::linear_root(c);
        for (const auto &a : c_) {
            if (!a.is_zero()) {
                out += tk.scaled(a.as_rational());
            }
            tk *= t;
        }
        return out;
    }

    std::string to_string() const
    {
        if (mod_->degree() == 1) {
            return to_lambda_poly().to_string("λ");
        }
        std::string out;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (c_[k].is_zero()) {
                continue;
            }
            if (!out.empty()) {
                out += " + ";
            }
            out += c_[k].to_string("c");
            if (k == 1) {
                out += "*(λ - c)";
            } else if (k > 1) {
                out += "*(λ - c)^" + std::to_string(k);
            }
        }
        return out.empty() ? "0" : out;
    }

private:
    static int check_modulus(int n)
    {
        if (n < 1) {
            throw std::invalid_argument("local ring modulus must be positive");
        }
        return n;
    }

    void check(const LocalElem &o) const
    {
        if (c_.size() != o.c_.size()) {
            throw std::logic_error("local elements with different moduli");
        }
    }

    Modulus mod_;
    std::vector<AlgElem> c_;
};

// h with alpha*h = beta mod t^N, represented mod t^{N - val(alpha)}; nullopt
// when val(beta) < val(alpha).
inline std::optional<LocalElem> local_divide(const LocalElem &beta, const LocalElem &alpha)
{
    const int n = alpha.modulus_order();
    if (beta.modulus_order() != n) {
        throw std::logic_error("local_divide on different moduli");
    }
    const int k = alpha.valuation();
    if (k == n) {
        throw std::domain_error("local_divide by an element that is zero modulo (λ - c)^N");
    }
    if (beta.valuation() < k) {
        return std::nullopt;
    }
    const LocalElem a = alpha.shifted_down(k);
    const LocalElem b = beta.shifted_down(k);
    const LocalElem h = b * a.inverse();
    return h.shifted_up(0, n);
}

} // namespace mahler

#endif
