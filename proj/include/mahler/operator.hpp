#ifndef MAHLER_OPERATOR_HPP
#define MAHLER_OPERATOR_HPP

#include <map>
#include <stdexcept>
#include <vector>

#include <mahler/equation.hpp>
#include <mahler/local_ring.hpp>
#include <mahler/newton.hpp>
#include <mahler/puiseux.hpp>

namespace mahler
{

inline std::vector<LocalElem> lambda_powers(const Modulus &mod, int n, int m)
{
    std::vector<LocalElem> out;
    out.reserve(static_cast<std::size_t>(m) + 1);
    out.push_back(LocalElem::constant(mod, n, Rational(1)));
    const LocalElem lam = LocalElem::lambda(mod, n);
    for (int i = 1; i <= m; ++i) {
        out.push_back(out.back() * lam);
    }
    return out;
}

// For plain L (λ = 1) over Q.
inline std::vector<Rational> unit_lambda_powers(int m)
{
    return std::vector<Rational>(static_cast<std::size_t>(m) + 1, Rational(1));
}

namespace detail
{
inline void require_known(const MahlerEquation &eq, int i, const Rational &needed_below)
{
    const auto &t = eq.a(i).truncation_order();
    if (t && *t < needed_below) {
        throw PrecisionError(i, needed_below);
    }
}
} // namespace detail

// Σ a_i λ^i φ_p^i(f), keeping only exponents < z_bound. The result carries
// truncation order z_bound. lambda_pow[i] is λ^i in the coefficient ring.
template <class R>
PuiseuxPoly<R> apply_L_lambda(const MahlerEquation &eq, const PuiseuxPoly<R> &f, const Rational &z_bound,
                              const std::vector<R> &lambda_pow)
{
    std::optional<Rational> bound = z_bound;
    if (f.truncation_order()) {
        for (int i = 0; i <= eq.order(); ++i) {
            auto lb = eq.a(i).valuation_lower_bound();
            if (!lb) {
                continue;
            }
            Rational b = *lb + Rational(power_of(eq.p, i)) * *f.truncation_order();
            if (b < *bound) {
                bound = b;
            }
        }
    }
    PuiseuxPoly<R> out(bound);
    for (int i = 0; i <= eq.order(); ++i) {
        const Series &ai = eq.a(i);
        if (ai.empty() && !ai.is_truncated()) {
            continue;
        }
        const Rational pi(power_of(eq.p, i));
        for (const auto &[e, fe] : f.terms()) {
            const Rational shift = pi * e;
            const Rational limit = *bound - shift; // need a_{i,n} for n < limit
            if (ai.empty() && limit <= *ai.truncation_order()) {
                continue;
            }
            detail::require_known(eq, i, limit);
            const R lf = lambda_pow[static_cast<std::size_t>(i)] * fe;
            for (const auto &[n, an] : ai.terms()) {
                if (n >= limit) {
                    break;
                }
                out.add_term(n + shift, lf * an);
            }
        }
    }
    return out;
}

// L_λ(z^v) below z_bound.
template <class R>
PuiseuxPoly<R> apply_L_lambda_monomial(const MahlerEquation &eq, const Rational &v, const Rational &z_bound,
                                       const std::vector<R> &lambda_pow)
{
    PuiseuxPoly<R> out(z_bound);
    for (int i = 0; i <= eq.order(); ++i) {
        const Series &ai = eq.a(i);
        if (ai.empty() && !ai.is_truncated()) {
            continue;
        }
        const Rational shift = Rational(power_of(eq.p, i)) * v;
        const Rational limit = z_bound - shift;
        if (ai.empty() && limit <= *ai.truncation_order()) {
            continue;
        }
        detail::require_known(eq, i, limit);
        for (const auto &[n, an] : ai.terms()) {
            if (n >= limit) {
                break;
            }
            out.add_term(n + shift, lambda_pow[static_cast<std::size_t>(i)] * an);
        }
    }
    return out;
}

// r_{c,j} modulo (λ - c)^n for the class with the given defining modulus,
// built from the characteristic polynomials only.
inline LocalElem seed_coefficient(const NormalizedEquation &ne, const NewtonPolygon &np, const ExponentClass &cls,
                                  std::size_t j, int n)
{
    const Edge &edge = np.edge(j);
    const Modulus &mod = cls.modulus();
    const int m = cls.multiplicity(j);
    if (m == 0) {
        throw std::invalid_argument("exponent class is not attached to slope " + std::to_string(j));
    }
    const int s = cls.offset(j);

    Rational constant = 1;
    for (std::size_t i = 1; i <= j; ++i) {
        const Poly red = np.edge(i).reduced_charpoly();
        constant *= red.coeff(0) / red.leading();
    }
    constant /= ne.equation.a(0).cld();

    // Π_{c' != c} (λ - c')^{m_{c',j}} = χ*_j / (lead · (λ - c)^m)
    const Poly red = edge.reduced_charpoly();
    LocalElem others = LocalElem::from_lambda_poly(mod, n + m, red);
    for (int k = 0; k < m; ++k) {
        if (!others[k].is_zero()) {
            throw std::logic_error("characteristic polynomial does not vanish to the class multiplicity");
        }
    }
    others = others.shifted_down(m).scaled(Rational(1) / red.leading());

    LocalElem lam_pow = LocalElem::constant(mod, n, Rational(1));
    const LocalElem lam = LocalElem::lambda(mod, n);
    for (int k = 0; k < edge.left; ++k) {
        lam_pow *= lam;
    }
    LocalElem r = (lam_pow * others).inverse().scaled(constant);
    return r.shifted_up(s, n);
}

} // namespace mahler

#endif
