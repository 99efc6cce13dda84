#ifndef MAHLER_NEWTON_HPP
#define MAHLER_NEWTON_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <mahler/algebraic.hpp>
#include <mahler/equation.hpp>
#include <mahler/poly.hpp>
#include <mahler/rational.hpp>

namespace mahler
{

struct Edge {
    Rational slope;
    int left = 0;  // index i of the left endpoint (p^i, val a_i)
    int right = 0; // index of the right endpoint
    std::vector<int> indices; // every i whose point lies on the edge
    Poly charpoly;            // sum over indices of cld(a_i) λ^i
    Rational theta;           // val_z L_λ(z^{-slope})

    int multiplicity() const
    {
        return right - left;
    }

    // charpoly / λ^left: degree equals the multiplicity, nonzero constant term.
    Poly reduced_charpoly() const
    {
        return charpoly.shifted_down(left);
    }

    friend bool operator==(const Edge &a, const Edge &b)
    {
        return a.slope == b.slope && a.left == b.left && a.right == b.right && a.indices == b.indices &&
               a.charpoly == b.charpoly && a.theta == b.theta;
    }
};

struct NewtonPolygon {
    std::vector<Edge> edges;
    Integer d = 1; // lcm of the slope denominators

    std::size_t slope_count() const
    {
        return edges.size();
    }

    const Edge &edge(std::size_t j) const
    {
        return edges.at(j - 1);
    }

    friend bool operator==(const NewtonPolygon &a, const NewtonPolygon &b)
    {
        return a.edges == b.edges && a.d == b.d;
    }
};

inline Integer power_of(long p, int i)
{
    return ipow(Integer(p), static_cast<unsigned long>(i));
}

inline NewtonPolygon newton_polygon(const NormalizedEquation &ne)
{
    const MahlerEquation &eq = ne.equation;
    struct Point {
        int i;
        Rational x;
        Rational y;
    };
    std::vector<Point> pts;
    for (int i = 0; i <= eq.order(); ++i) {
        if (ne.valuations[static_cast<std::size_t>(i)]) {
            pts.push_back({i, Rational(power_of(eq.p, i)), *ne.valuations[static_cast<std::size_t>(i)]});
        }
    }
    // Lower hull, monotone chain; collinear middle points are dropped here
    // and recovered when filling the index sets.
    std::vector<Point> hull;
    for (const auto &pt : pts) {
        while (hull.size() >= 2) {
            const Point &a = hull[hull.size() - 2];
            const Point &b = hull.back();
            Rational cross = (b.x - a.x) * (pt.y - a.y) - (b.y - a.y) * (pt.x - a.x);
            if (cross <= 0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(pt);
    }
    NewtonPolygon np;
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const Point &a = hull[k];
        const Point &b = hull[k + 1];
        Edge e;
        e.slope = (b.y - a.y) / (b.x - a.x);
        e.left = a.i;
        e.right = b.i;
        e.theta = a.y - a.x * e.slope;
        std::vector<Rational> cp(static_cast<std::size_t>(b.i) + 1);
        for (const auto &pt : pts) {
            if (pt.i < a.i || pt.i > b.i) {
                continue;
            }
            if (pt.y - pt.x * e.slope == e.theta) {
                e.indices.push_back(pt.i);
                cp[static_cast<std::size_t>(pt.i)] = eq.a(pt.i).cld();
            }
        }
        e.charpoly = Poly(std::move(cp));
        np.d = lcm(np.d, Integer(e.slope.get_den()));
        np.edges.push_back(std::move(e));
    }
    return np;
}

// π(w) = max_i (w - val a_i) / p^i over the nonzero a_i.
inline Rational pi_map(const NormalizedEquation &ne, const Rational &w)
{
    std::optional<Rational> best;
    for (int i = 0; i <= ne.equation.order(); ++i) {
        const auto &v = ne.valuations[static_cast<std::size_t>(i)];
        if (!v) {
            continue;
        }
        Rational cand = (w - *v) / Rational(power_of(ne.equation.p, i));
        if (!best || cand > *best) {
            best = cand;
        }
    }
    return *best;
}

// Inverse of π: val_z L_λ(z^v) = min_i (val a_i + p^i v).
inline Rational pi_inverse(const NormalizedEquation &ne, const Rational &v)
{
    std::optional<Rational> best;
    for (int i = 0; i <= ne.equation.order(); ++i) {
        const auto &val = ne.valuations[static_cast<std::size_t>(i)];
        if (!val) {
            continue;
        }
        Rational cand = *val + Rational(power_of(ne.equation.p, i)) * v;
        if (!best || cand < *best) {
            best = cand;
        }
    }
    return *best;
}

// Index (1-based) of the first slope whose denominator shares a factor with p.
inline std::optional<std::size_t> check_slope_denominators(const NewtonPolygon &np, long p)
{
    for (std::size_t j = 0; j < np.edges.size(); ++j) {
        if (gcd(Integer(np.edges[j].slope.get_den()), Integer(p)) != 1) {
            return j + 1;
        }
    }
    return std::nullopt;
}

inline std::vector<ExponentClass> exponents(const NewtonPolygon &np)
{
    std::vector<Poly> reduced;
    for (const auto &e : np.edges) {
        reduced.push_back(e.reduced_charpoly());
    }
    return refine_exponent_classes(reduced);
}

// val_z a_0 - μ_1: C1 asks the image to vanish up to this exponent.
inline Rational solution_window(const NormalizedEquation &ne, const NewtonPolygon &np)
{
    return *ne.valuations.front() - np.edges.front().slope;
}

// Every a_i must be known up to B + p^i μ_κ inclusive, where B is the
// solution window; the worst monomial is z^{-μ_κ}.
inline void check_required_precision(const NormalizedEquation &ne, const NewtonPolygon &np)
{
    const Rational window = solution_window(ne, np);
    const Rational mu_last = np.edges.back().slope;
    const MahlerEquation &eq = ne.equation;
    for (int i = 0; i <= eq.order(); ++i) {
        const auto &t = eq.a(i).truncation_order();
        if (!t) {
            continue;
        }
        const Rational needed = window + Rational(power_of(eq.p, i)) * mu_last;
        if (*t <= needed) {
            const Rational required = Rational(floor(needed) + 1);
            throw PrecisionError(i, ne.original_exponent(required),
                                 "the decision reads a_" + std::to_string(i) + " up to z^" +
                                     ne.original_exponent(needed).get_str() + " inclusive");
        }
    }
}

// val a_0 = val a_m = min val a_i (after normalization: both zero).
inline bool fuchsian_check(const NormalizedEquation &ne)
{
    return *ne.valuations.front() == 0 && *ne.valuations.back() == 0;
}

} // namespace mahler

#endif
