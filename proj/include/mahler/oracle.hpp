#ifndef MAHLER_ORACLE_HPP
#define MAHLER_ORACLE_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <mahler/algebraic.hpp>
#include <mahler/equation.hpp>
#include <mahler/local_ring.hpp>
#include <mahler/newton.hpp>
#include <mahler/operator.hpp>
#include <mahler/solver.hpp>

namespace mahler
{

struct FeasibilityResult {
    Poly defining;
    bool feasible = false;
    std::optional<LocalSeries> witness;
    std::size_t unknowns = 0;
    std::size_t equations = 0;
};

namespace detail
{
inline Integer binomial(unsigned n, unsigned k)
{
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// r_{c,j} from cld L_λ(g) = (λ-c)^N: r = (λ-c)^s / (χ_j(λ)/(λ-c)^m).
inline LocalElem seed_from_charpoly(const Poly &charpoly, const Modulus &mod, int s, int m)
{
    const int n = s + m;
    LocalElem chi = LocalElem::from_lambda_poly(mod, n + m, charpoly);
    if (chi.valuation() != m) {
        throw std::logic_error("characteristic polynomial has the wrong order at the exponent");
    }
    return chi.shifted_down(m).inverse().shifted_up(s, n);
}

struct SparseRow {
    std::map<std::size_t, AlgElem> entries;
    AlgElem rhs;
};

inline FeasibilityResult feasibility_branch(const NormalizedEquation &ne, const NewtonPolygon &np,
                                            const ExponentClass &cls, std::size_t j)
{
    const MahlerEquation &eq = ne.equation;
    const Modulus &mod = cls.modulus();
    const int n = cls.precision(j);
    const Rational mu1 = np.edge(1).slope;
    const Rational muj = np.edge(j).slope;
    const Rational window = solution_window(ne, np);
    const AlgElem zero(mod, Rational(0));
    const AlgElem c = cls.generator();

    std::vector<AlgElem> c_pow{AlgElem(mod, Rational(1))};
    for (int i = 1; i <= eq.order(); ++i) {
        c_pow.push_back(c_pow.back() * c);
    }

    // Degree caps: C5 everywhere, C6 at the earlier slopes.
    std::map<Rational, int> cap;
    for (std::size_t k = 1; k < j; ++k) {
        cap[-np.edge(k).slope] = n - cls.multiplicity(k);
    }
    const LocalElem seed = seed_from_charpoly(np.edge(j).charpoly, mod, cls.offset(j), cls.multiplicity(j));

    struct Var {
        Rational v;
        int deg;
    };
    std::vector<Var> vars;
    const Rational step = make_rational(Integer(1), np.d);
    for (Rational v = -muj + step; v <= -mu1; v += step) {
        const auto it = cap.find(v);
        const int limit = it == cap.end() ? n : it->second;
        for (int k = 0; k < limit; ++k) {
            vars.push_back({v, k});
        }
    }

    std::map<std::pair<Rational, int>, SparseRow> rows;
    auto contribute = [&](const Rational &v, int k, const AlgElem &scale, std::optional<std::size_t> col) {
        for (int i = 0; i <= eq.order(); ++i) {
            const Rational shift = Rational(power_of(eq.p, i)) * v;
            for (const auto &[e, a] : eq.a(i).terms()) {
                const Rational w = e + shift;
                if (w > window) {
                    break;
                }
                for (int l = 0; l <= i && k + l < n; ++l) {
                    AlgElem coef = c_pow[static_cast<std::size_t>(i - l)] *
                                   Rational(a * Rational(binomial(static_cast<unsigned>(i), static_cast<unsigned>(l))));
                    coef *= scale;
                    if (coef.is_zero()) {
                        continue;
                    }
                    auto [rit, fresh] = rows.try_emplace({w, k + l}, SparseRow{{}, zero});
                    SparseRow &row = rit->second;
                    if (col) {
                        auto [eit, ins] = row.entries.try_emplace(*col, zero);
                        eit->second += coef;
                    } else {
                        row.rhs -= coef;
                    }
                }
            }
        }
    };
    for (int k = 0; k < n; ++k) {
        if (!seed[k].is_zero()) {
            contribute(-muj, k, seed[k], std::nullopt);
        }
    }
    const AlgElem one(mod, Rational(1));
    for (std::size_t col = 0; col < vars.size(); ++col) {
        contribute(vars[col].v, vars[col].deg, one, col);
    }
    for (auto &rw : rows) {
        for (auto it = rw.second.entries.begin(); it != rw.second.entries.end();) {
            it = it->second.is_zero() ? rw.second.entries.erase(it) : std::next(it);
        }
    }

    FeasibilityResult res;
    res.defining = cls.defining();
    res.unknowns = vars.size();
    res.equations = rows.size();

    // Reduced row echelon form with D5 pivot tests.
    std::vector<SparseRow> active;
    active.reserve(rows.size());
    for (auto &rw : rows) {
        active.push_back(std::move(rw.second));
    }
    std::vector<std::pair<std::size_t, SparseRow>> pivots;
    for (std::size_t col = 0; col < vars.size(); ++col) {
        std::optional<std::size_t> pick;
        for (std::size_t r = 0; r < active.size(); ++r) {
            auto it = active[r].entries.find(col);
            if (it != active[r].entries.end() && !it->second.decide_zero()) {
                pick = r;
                break;
            }
        }
        if (!pick) {
            continue;
        }
        SparseRow prow = std::move(active[*pick]);
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(*pick));
        const AlgElem inv = prow.entries.at(col).inverse();
        for (auto &[cc, val] : prow.entries) {
            val *= inv;
        }
        prow.rhs *= inv;
        auto eliminate = [&](SparseRow &row) {
            auto it = row.entries.find(col);
            if (it == row.entries.end()) {
                return;
            }
            const AlgElem factor = it->second;
            for (const auto &[cc, val] : prow.entries) {
                auto [eit, ins] = row.entries.try_emplace(cc, zero);
                eit->second -= factor * val;
                if (eit->second.is_zero()) {
                    row.entries.erase(eit);
                }
            }
            row.rhs -= factor * prow.rhs;
        };
        for (auto &row : active) {
            eliminate(row);
        }
        for (auto &pv : pivots) {
            eliminate(pv.second);
        }
        pivots.emplace_back(col, std::move(prow));
    }
    for (const auto &row : active) {
        bool empty = true;
        for (const auto &[cc, val] : row.entries) {
            if (!val.decide_zero()) {
                empty = false;
                break;
            }
        }
        if (empty && !row.rhs.decide_zero()) {
            res.feasible = false;
            return res;
        }
        if (!empty) {
            throw std::logic_error("row left unreduced by elimination");
        }
    }
    res.feasible = true;

    std::map<Rational, std::vector<AlgElem>> coeffs;
    coeffs[-muj] = seed.coefficients();
    for (const auto &[col, row] : pivots) {
        auto &vec = coeffs[vars[col].v];
        vec.resize(static_cast<std::size_t>(n), zero);
        vec[static_cast<std::size_t>(vars[col].deg)] = row.rhs;
    }
    LocalSeries w;
    for (const auto &[v, vec] : coeffs) {
        w.add_term(v, LocalElem::from_t_poly(mod, n, vec));
    }
    res.witness = std::move(w);
    return res;
}
} // namespace detail

// Decides the existence of a reduced truncated solution for (class, j) by
// exact linear algebra on the unknown coefficients. One result per branch.
inline std::vector<FeasibilityResult> feasibility_oracle(const NormalizedEquation &ne, const NewtonPolygon &np,
                                                         const ExponentClass &cls, std::size_t j)
{
    auto branches = with_dynamic_evaluation(cls.defining(), [&](const Poly &q) {
        return detail::feasibility_branch(ne, np, cls.restricted_to(q), j);
    });
    std::vector<FeasibilityResult> out;
    for (auto &b : branches) {
        out.push_back(std::move(b.second));
    }
    return out;
}

struct FrobeniusPrefix {
    Poly defining;
    LocalSeries g;       // terms of g_{c,j} with exponent below the order
    int modulus = 0;     // λ-adic precision of the coefficients of g
    Rational order;
    Rational theta;
    int target_power = 0; // s_{c,j} + m_{c,j}
    std::size_t steps = 0;
};

struct PrefixOptions {
    int extra_precision = -1; // defaults to s + m
    std::size_t step_limit = 20000;
};

namespace detail
{
inline FrobeniusPrefix prefix_branch(const NormalizedEquation &ne, const NewtonPolygon &np, const ExponentClass &cls,
                                     std::size_t j, const Rational &order, const PrefixOptions &opt)
{
    const MahlerEquation &eq = ne.equation;
    const Modulus &mod = cls.modulus();
    const int n = cls.precision(j);
    const int s = cls.offset(j);
    const int extra = opt.extra_precision < 0 ? n : opt.extra_precision;
    int prec = n + s + extra;
    const Rational muj = np.edge(j).slope;
    const Rational theta = np.edge(j).theta;
    const Rational wbound = pi_inverse(ne, order);

    FrobeniusPrefix out;
    out.defining = cls.defining();
    out.order = order;
    out.theta = theta;
    out.target_power = n;

    auto lam = lambda_powers(mod, prec, eq.order());
    LocalSeries g;
    if (-muj < order) {
        g.add_term(-muj, seed_coefficient(ne, np, cls, j, prec));
    }
    LocalSeries residual(wbound);
    if (theta < wbound) {
        residual.add_term(theta, LocalElem::t_power(mod, prec, n));
    }
    residual -= apply_L_lambda(eq, g, wbound, lam);

    auto truncate_all = [&](int p) {
        LocalSeries g2, r2(wbound);
        for (const auto &[e, c] : g.terms()) {
            g2.add_term(e, c.truncated(p));
        }
        for (const auto &[e, c] : residual.terms()) {
            r2.add_term(e, c.truncated(p));
        }
        g = std::move(g2);
        residual = std::move(r2);
        lam = lambda_powers(mod, p, eq.order());
    };

    for (;;) {
        const auto gamma = first_nonzero(residual);
        if (!gamma) {
            break;
        }
        if (++out.steps > opt.step_limit) {
            throw std::runtime_error("prefix recursion exceeded " + std::to_string(opt.step_limit) +
                                     " steps before reaching z^" + order.get_str());
        }
        const Rational v = pi_map(ne, *gamma);
        const LocalSeries lz = apply_L_lambda_monomial(eq, v, wbound, lam);
        const LocalElem alpha = lz.terms().at(*gamma);
        const LocalElem beta = residual.terms().at(*gamma);
        const int k = alpha.valuation();
        if (k >= prec || beta.valuation() < k) {
            throw std::logic_error("λ-adic precision exhausted at z^" + v.get_str());
        }
        LocalElem h = beta.shifted_down(k) * alpha.shifted_down(k).inverse();
        if (k > 0) {
            prec -= k;
            truncate_all(prec);
        }
        g.add_term(v, h);
        residual -= times(k > 0 ? apply_L_lambda_monomial(eq, v, wbound, lam) : lz, h);
    }
    if (prec < n) {
        throw std::logic_error("prefix computed with insufficient λ-adic precision");
    }
    out.g = std::move(g);
    out.modulus = prec;
    return out;
}
} // namespace detail

// Prefix below z^order of the series g_{c,j} with L_λ(g) = z^θ_j (λ-c)^{s+m},
// val_z g = -μ_j and cld g = r_{c,j}.
inline std::vector<FrobeniusPrefix> frobenius_prefix(const NormalizedEquation &ne, const NewtonPolygon &np,
                                                     const ExponentClass &cls, std::size_t j, const Rational &order,
                                                     const PrefixOptions &opt = {})
{
    auto branches = with_dynamic_evaluation(cls.defining(), [&](const Poly &q) {
        return detail::prefix_branch(ne, np, cls.restricted_to(q), j, order, opt);
    });
    std::vector<FrobeniusPrefix> out;
    for (auto &b : branches) {
        out.push_back(std::move(b.second));
    }
    return out;
}

} // namespace mahler

#endif
