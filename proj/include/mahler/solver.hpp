#ifndef MAHLER_SOLVER_HPP
#define MAHLER_SOLVER_HPP

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
#include <mahler/puiseux.hpp>

namespace mahler
{

using LocalSeries = PuiseuxPoly<LocalElem>;

struct SolverStep {
    Rational v;
    LocalElem alpha; // cld_z L_λ(z^v)
    LocalElem beta;  // cld_z g
    LocalElem h;
};

enum class Outcome { Found, FailedGrid, FailedDivision };

inline const char *to_string(Outcome o)
{
    switch (o) {
    case Outcome::Found:
        return "Found";
    case Outcome::FailedGrid:
        return "FailedGrid";
    case Outcome::FailedDivision:
        return "FailedDivision";
    }
    return "?";
}

struct SolverTrace {
    Poly defining;     // defining polynomial of the branch
    std::size_t slope = 0;
    int modulus = 0;   // N = s_{c,j} + m_{c,j}
    std::vector<SolverStep> steps;
    Outcome outcome = Outcome::Found;
    // Found: the first v beyond -μ_1, or nullopt when g vanished in the window.
    // Failures: the offending v.
    std::optional<Rational> last_v;
    LocalSeries f; // the truncated solution when Found, else the partial one

    bool found() const
    {
        return outcome == Outcome::Found;
    }
};

struct SolverOptions {
    bool debug_recompute = false;
};

namespace detail
{
// First exponent whose coefficient is nonzero at the roots of q; nullopt when
// everything stored vanishes.
inline std::optional<Rational> first_nonzero(const LocalSeries &g)
{
    for (const auto &[e, c] : g.terms()) {
        if (!c.decide_zero()) {
            return e;
        }
    }
    return std::nullopt;
}

inline LocalSeries times(const LocalSeries &g, const LocalElem &h)
{
    LocalSeries out(g.truncation_order());
    for (const auto &[e, c] : g.terms()) {
        out.add_term(e, c * h);
    }
    return out;
}

inline SolverTrace solve_branch(const NormalizedEquation &ne, const NewtonPolygon &np, const ExponentClass &cls,
                                std::size_t j, const SolverOptions &opt)
{
    const MahlerEquation &eq = ne.equation;
    const int n = cls.precision(j);
    const Modulus &mod = cls.modulus();
    const Rational mu1 = np.edge(1).slope;
    const Rational muj = np.edge(j).slope;
    const Rational step = make_rational(Integer(1), np.d);
    const Rational bound = solution_window(ne, np) + step;
    const auto lam = lambda_powers(mod, n, eq.order());

    SolverTrace tr;
    tr.defining = cls.defining();
    tr.slope = j;
    tr.modulus = n;
    tr.f = LocalSeries::monomial(seed_coefficient(ne, np, cls, j, n), -muj);
    LocalSeries g = apply_L_lambda(eq, tr.f, bound, lam);

    std::map<Rational, LocalSeries> memo;
    std::optional<Rational> prev;
    for (;;) {
        const auto w = first_nonzero(g);
        if (!w) {
            tr.outcome = Outcome::Found;
            tr.last_v.reset();
            return tr;
        }
        const Rational v = pi_map(ne, *w);
        tr.last_v = v;
        if (prev && v <= *prev) {
            throw std::logic_error("solver exponents failed to increase at v = " + v.get_str());
        }
        prev = v;
        if (v > -mu1) {
            tr.outcome = Outcome::Found;
            return tr;
        }
        if (!on_grid(v, np.d)) {
            tr.outcome = Outcome::FailedGrid;
            return tr;
        }
        auto it = memo.find(v);
        if (it == memo.end()) {
            it = memo.emplace(v, apply_L_lambda_monomial(eq, v, bound, lam)).first;
        }
        const LocalSeries &lz = it->second;
        const auto a = lz.terms().find(*w);
        const LocalElem alpha = a == lz.terms().end() ? LocalElem::zero(mod, n) : a->second;
        const LocalElem beta = g.terms().at(*w);
        std::optional<LocalElem> h;
        if (!alpha.decide_zero()) {
            h = local_divide(beta, alpha);
        }
        if (!h) {
            tr.outcome = Outcome::FailedDivision;
            return tr;
        }
        tr.f.add_term(v, -*h);
        g -= times(lz, *h);
        tr.steps.push_back({v, alpha, beta, *h});
        if (opt.debug_recompute) {
            const LocalSeries fresh = apply_L_lambda(eq, tr.f, bound, lam);
            if (fresh != g) {
                throw std::logic_error("incremental update of L_λ(f) diverged from recomputation at v = " +
                                       v.get_str());
            }
        }
    }
}
} // namespace detail

// Truncated-solution search for the pair (class, j); one trace per dynamic-evaluation branch.
inline std::vector<SolverTrace> find_reduced_truncated_solution(const NormalizedEquation &ne, const NewtonPolygon &np,
                                                                const ExponentClass &cls, std::size_t j,
                                                                const SolverOptions &opt = {})
{
    auto branches = with_dynamic_evaluation(cls.defining(), [&](const Poly &q) {
        return detail::solve_branch(ne, np, cls.restricted_to(q), j, opt);
    });
    std::vector<SolverTrace> out;
    out.reserve(branches.size());
    for (auto &b : branches) {
        out.push_back(std::move(b.second));
    }
    return out;
}

// Independent check of the six conditions for a candidate f attached to
// (class, j). Coefficients of f are read as polynomials in λ - c, whatever
// modulus they were built with. May raise SplitRequired for reducible classes.
struct ConditionReport {
    bool c1 = false; // L_λ(f) mod (λ-c)^N vanishes up to val a_0 - μ_1
    bool c2 = false; // support on the grid, inside [-μ_j, -μ_1]
    bool c3 = false; // cld f = r_{c,j} mod (λ-c)^N
    bool c4 = false; // val f = -μ_j
    bool c5 = false; // λ-degree at most N - 1
    bool c6 = false; // reduced: degree caps at -μ_k, k < j

    bool all() const
    {
        return c1 && c2 && c3 && c4 && c5 && c6;
    }

    bool operator[](int k) const
    {
        switch (k) {
        case 1:
            return c1;
        case 2:
            return c2;
        case 3:
            return c3;
        case 4:
            return c4;
        case 5:
            return c5;
        case 6:
            return c6;
        }
        throw std::out_of_range("condition index");
    }
};

inline ConditionReport verify_conditions(const NormalizedEquation &ne, const NewtonPolygon &np,
                                         const ExponentClass &cls, std::size_t j, const LocalSeries &f)
{
    ConditionReport rep;
    const int n = cls.precision(j);
    const Modulus &mod = cls.modulus();
    const Rational mu1 = np.edge(1).slope;
    const Rational muj = np.edge(j).slope;

    rep.c2 = true;
    Integer den = np.d;
    for (const auto &[e, c] : f.terms()) {
        den = lcm(den, Integer(e.get_den()));
        if (!on_grid(e, np.d) || e < -muj || e > -mu1) {
            rep.c2 = false;
        }
    }

    rep.c5 = true;
    for (const auto &[e, c] : f.terms()) {
        if (c.degree() > n - 1) {
            rep.c5 = false;
        }
    }

    rep.c6 = true;
    for (std::size_t k = 1; k < j; ++k) {
        auto it = f.terms().find(-np.edge(k).slope);
        if (it != f.terms().end() && it->second.degree() > n - cls.multiplicity(k) - 1) {
            rep.c6 = false;
        }
    }

    // Valuation and cld are taken on the full coefficients.
    std::optional<Rational> val;
    for (const auto &[e, c] : f.terms()) {
        if (!c.decide_zero()) {
            val = e;
            break;
        }
    }
    rep.c4 = val && *val == -muj;
    if (val) {
        const LocalElem r = seed_coefficient(ne, np, cls, j, n);
        rep.c3 = f.terms().at(*val).truncated(n) == r;
    }

    LocalSeries fn;
    for (const auto &[e, c] : f.terms()) {
        fn.add_term(e, c.truncated(n));
    }
    const Rational bound = solution_window(ne, np) + make_rational(Integer(1), den);
    const LocalSeries image = apply_L_lambda(ne.equation, fn, bound, lambda_powers(mod, n, ne.equation.order()));
    rep.c1 = !detail::first_nonzero(image).has_value();
    return rep;
}

} // namespace mahler

#endif
