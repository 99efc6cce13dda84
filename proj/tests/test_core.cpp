#include <random>

#include <gtest/gtest.h>

#include <mahler/mahler.hpp>

#include "support/generators.hpp"
#include "support/reference.hpp"

namespace
{

using namespace mahler;
using namespace mahler::testing;

Rational q(long n, long d = 1)
{
    return make_rational(n, d);
}

Poly P(std::initializer_list<long> low_first)
{
    std::vector<Rational> c;
    for (long v : low_first) {
        c.emplace_back(v);
    }
    return Poly(c);
}

const char *const kGolden = "z^8*f(z^4) - (z^2+z^3+z^7)*f(z^2) + (1+z)*f(z) = 0 ; p=2";
const char *const kInverse = "z^8*f(z) - (z^2+z^3+z^7)*f(z^2) + (1+z)*f(z^4) = 0 ; p=2";
const char *const kDirect2 = "z^8*f(z^4) - (z^2+z^3+2*z^7)*f(z^2) + (1+z)*f(z) = 0 ; p=2";
const char *const kInverse2 = "z^8*f(z) - (z^2+z^3+2*z^7)*f(z^2) + (1+z)*f(z^4) = 0 ; p=2";
const char *const kThreeSlopes =
    "2*z^2*f(z^16) + (1+z)*f(z^8) + (-2+z^2)*f(z^4) + (1-z)*f(z^2) + 2*z^3*f(z) = 0 ; p=2";

struct Prepared {
    NormalizedEquation ne;
    NewtonPolygon np;
    std::vector<ExponentClass> classes;

    explicit Prepared(const MahlerEquation &eq)
        : ne(normalize_equation(eq)), np(newton_polygon(ne)), classes(exponents(np))
    {
    }

    explicit Prepared(const char *line) : Prepared(parse_equation(line))
    {
    }

    const ExponentClass &cls(const Poly &defining) const
    {
        for (const auto &c : classes) {
            if (c.defining() == defining) {
                return c;
            }
        }
        throw std::out_of_range("no such class");
    }
};

LocalSeries local_series(const Modulus &mod, int n, std::initializer_list<std::pair<Rational, Poly>> terms)
{
    LocalSeries s;
    for (const auto &[e, c] : terms) {
        s.add_term(e, LocalElem::from_lambda_poly(mod, n, c));
    }
    return s;
}

// Terms of a windowed image, without the truncation marker.
LocalSeries known_part(const LocalSeries &s)
{
    return s.with_truncation(std::nullopt);
}

TEST(NewtonPolygon, ThreeSlopeExample)
{
    const Prepared s(kThreeSlopes);
    ASSERT_EQ(s.np.slope_count(), 3u);
    EXPECT_EQ(s.np.edge(1).slope, q(-3));
    EXPECT_EQ(s.np.edge(1).multiplicity(), 1);
    EXPECT_EQ(s.np.edge(2).slope, q(0));
    EXPECT_EQ(s.np.edge(2).multiplicity(), 2);
    EXPECT_EQ(s.np.edge(3).slope, q(1, 4));
    EXPECT_EQ(s.np.edge(3).multiplicity(), 1);
    EXPECT_EQ(s.np.edge(1).charpoly, P({2, 1}));
    EXPECT_EQ(s.np.edge(2).charpoly, P({0, 1, -2, 1}));
    EXPECT_EQ(s.np.edge(3).charpoly, P({0, 0, 0, 1, 2}));
    EXPECT_EQ(s.np.edge(2).indices, (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(s.np.d, Integer(4));
}

TEST(NewtonPolygon, Golden)
{
    const Prepared s(kGolden);
    ASSERT_EQ(s.np.slope_count(), 2u);
    EXPECT_EQ(s.np.edge(1).slope, q(2));
    EXPECT_EQ(s.np.edge(2).slope, q(3));
    EXPECT_EQ(s.np.edge(1).charpoly, P({1, -1}));
    EXPECT_EQ(s.np.edge(2).charpoly, P({0, -1, 1}));
    ASSERT_EQ(s.classes.size(), 1u);
    const auto &c = s.classes.front();
    EXPECT_EQ(c.defining(), P({-1, 1}));
    EXPECT_EQ(c.multiplicity(1), 1);
    EXPECT_EQ(c.multiplicity(2), 1);
    EXPECT_EQ(c.offset(1), 0);
    EXPECT_EQ(c.offset(2), 1);
}

TEST(NewtonPolygon, TwoTermsGiveOneNullSlope)
{
    const Prepared s("f(z^2) + f(z) = 0 ; p=2");
    ASSERT_EQ(s.np.slope_count(), 1u);
    EXPECT_EQ(s.np.edge(1).slope, q(0));
    EXPECT_EQ(s.np.edge(1).multiplicity(), 1);
}

TEST(Exponents, ThreeSlopeExampleClasses)
{
    const Prepared s(kThreeSlopes);
    ASSERT_EQ(s.classes.size(), 3u);
    const auto &minus2 = s.cls(P({2, 1}));
    EXPECT_EQ(minus2.multiplicities(), (std::vector<int>{1, 0, 0}));
    const auto &one = s.cls(P({-1, 1}));
    EXPECT_EQ(one.multiplicities(), (std::vector<int>{0, 2, 0}));
    const auto &half = s.cls(Poly({q(1, 2), q(1)}));
    EXPECT_EQ(half.multiplicities(), (std::vector<int>{0, 0, 1}));
}

TEST(Exponents, IrrationalClass)
{
    // One edge from (1, 0) to (4, 0) with χ = λ² - 2.
    const Prepared s("f(z^4) - 2*f(z) = 0 ; p=2");
    ASSERT_EQ(s.classes.size(), 1u);
    const auto &c = s.classes.front();
    EXPECT_EQ(c.degree(), 2);
    EXPECT_EQ(c.multiplicity(1), 1);
    // Vieta: the product of the two roots of the monic defining polynomial.
    EXPECT_EQ(c.defining().coeff(0), q(-2));
    EXPECT_EQ(c.defining().coeff(1), q(0));
}

TEST(Exponents, MultiplicitiesSumToOrder)
{
    std::mt19937_64 rng(31);
    for (int k = 0; k < 200; ++k) {
        const MahlerEquation eq = random_equation(rng);
        const Prepared s(eq);
        int total = 0;
        for (const auto &c : s.classes) {
            for (std::size_t j = 1; j <= s.np.slope_count(); ++j) {
                total += c.degree() * c.multiplicity(j);
            }
            EXPECT_NE(c.defining().coeff(0), 0);
            EXPECT_TRUE(is_squarefree(c.defining()));
        }
        EXPECT_EQ(total, eq.order());
    }
}

TEST(PiMap, GoldenValues)
{
    const Prepared s(kGolden);
    EXPECT_EQ(pi_map(s.ne, q(0)), q(0));
    EXPECT_EQ(pi_map(s.ne, q(-2)), q(-2));
    EXPECT_EQ(pi_map(s.ne, q(-1)), q(-1));
}

TEST(PiMap, InvertsTheValuationOfMonomialImages)
{
    std::mt19937_64 rng(32);
    for (int k = 0; k < 150; ++k) {
        const Prepared s(random_equation(rng));
        const Modulus mod = make_modulus(P({-3, 1}));
        const int n = s.ne.equation.order() + 1;
        const auto lam = lambda_powers(mod, n, s.ne.equation.order());
        for (int t = 0; t < 4; ++t) {
            const Rational w = q(uniform(rng, -40, 40), uniform(rng, 1, 6));
            const Rational v = pi_map(s.ne, w);
            EXPECT_EQ(pi_inverse(s.ne, v), w);
            const LocalSeries img = apply_L_lambda_monomial(s.ne.equation, v, w + 1, lam);
            ASSERT_FALSE(img.empty());
            EXPECT_EQ(img.terms().begin()->first, w);
        }
    }
}

TEST(Operator, GoldenImages)
{
    const Prepared s(kGolden);
    const Modulus mod = make_modulus(P({-1, 1}));
    const auto &eq = s.ne.equation;

    const auto g1 = apply_L_lambda(eq, local_series(mod, 1, {{q(-2), P({-1})}}), q(4), lambda_powers(mod, 1, 2));
    EXPECT_EQ(known_part(g1), local_series(mod, 1, {{q(0), P({-1})}, {q(3), P({1})}}));

    const auto g2 = apply_L_lambda(eq, local_series(mod, 2, {{q(-3), P({-1, 1})}}), q(4), lambda_powers(mod, 2, 2));
    EXPECT_EQ(known_part(g2), local_series(mod, 2, {{q(-2), P({-1, 1})}, {q(1), P({1, -1})}}));

    const auto g3 = apply_L_lambda(eq, local_series(mod, 2, {{q(-3), P({-1, 1})}, {q(-2), P({1})}}), q(4),
                                   lambda_powers(mod, 2, 2));
    EXPECT_EQ(known_part(g3), local_series(mod, 2,
                                           {{q(-1), P({1, -1})},
                                            {q(0), P({-2, 2}) + P({1})},
                                            {q(1), P({1, -1})},
                                            {q(3), P({1, -1}) + P({-1})}}));
}

TEST(Operator, LowestCoefficientOnEachEdgeIsTheCharacteristicPolynomial)
{
    std::mt19937_64 rng(33);
    std::vector<MahlerEquation> eqs{parse_equation(kGolden), parse_equation(kThreeSlopes)};
    for (int k = 0; k < 150; ++k) {
        eqs.push_back(random_equation(rng));
    }
    for (const auto &eq : eqs) {
        const Prepared s(eq);
        const Modulus mod = make_modulus(P({-5, 1}));
        const int n = eq.order() + 1;
        for (const Edge &e : s.np.edges) {
            const auto img = apply_L_lambda_monomial(s.ne.equation, -e.slope, e.theta + 1,
                                                     lambda_powers(mod, n, eq.order()));
            ASSERT_FALSE(img.empty());
            EXPECT_EQ(img.terms().begin()->first, e.theta);
            EXPECT_EQ(img.terms().begin()->second, LocalElem::from_lambda_poly(mod, n, e.charpoly));
        }
    }
}

TEST(Operator, ValuationBeyondTheFirstSlope)
{
    // val L(f) = val a_0 + val f and cld L(f) = cld a_0 * cld f when val f > -μ_1.
    std::mt19937_64 rng(34);
    for (int k = 0; k < 150; ++k) {
        const Prepared s(random_equation(rng));
        const auto &eq = s.ne.equation;
        const Rational v0 = *s.ne.valuations.front();
        Series f;
        const Rational lo = -s.np.edge(1).slope + q(1, uniform(rng, 1, 5));
        f.add_term(lo, Rational(nonzero_coefficient(rng)));
        for (int t = 0; t < 3; ++t) {
            f.add_term(lo + q(uniform(rng, 1, 6), 2), Rational(uniform(rng, -3, 3)));
        }
        const Series img = apply_L_lambda(eq, f, v0 + lo + 1, unit_lambda_powers(eq.order()));
        ASSERT_FALSE(img.empty());
        EXPECT_EQ(img.terms().begin()->first, v0 + lo);
        EXPECT_EQ(img.terms().begin()->second, eq.a(0).cld() * f.cld());
    }
}

TEST(Operator, PrecisionErrorNamesTheCoefficient)
{
    MahlerEquation eq = parse_equation(kGolden);
    Series a1(q(5));
    a1.add_term(q(2), Rational(-1));
    a1.add_term(q(3), Rational(-1));
    eq.coefficients[1] = a1;
    try {
        apply_L_lambda_monomial(eq, q(0), q(6), unit_lambda_powers(2));
        FAIL() << "expected a precision error";
    } catch (const PrecisionError &e) {
        EXPECT_EQ(e.coefficient(), 1);
        EXPECT_EQ(e.required_order(), q(6));
    }
}

TEST(Seed, KnownValues)
{
    const Prepared s8(kGolden);
    const auto &c = s8.classes.front();
    EXPECT_EQ(seed_coefficient(s8.ne, s8.np, c, 1, 1), LocalElem::constant(c.modulus(), 1, q(-1)));
    EXPECT_EQ(seed_coefficient(s8.ne, s8.np, c, 2, 2), LocalElem::from_lambda_poly(c.modulus(), 2, P({-1, 1})));
    const Prepared s3(kThreeSlopes);
    const auto &m2 = s3.cls(P({2, 1}));
    EXPECT_EQ(seed_coefficient(s3.ne, s3.np, m2, 1, 1), LocalElem::constant(m2.modulus(), 1, q(1)));
}

TEST(Seed, MatchesTheCharacteristicPolynomialQuotient)
{
    std::mt19937_64 rng(35);
    int checked = 0;
    for (int k = 0; k < 300; ++k) {
        const Prepared s(random_equation(rng));
        for (std::size_t j = 1; j <= s.np.slope_count(); ++j) {
            for (const auto &c : s.classes) {
                if (!c.attached(j)) {
                    continue;
                }
                const int n = c.precision(j);
                const LocalElem seed = seed_coefficient(s.ne, s.np, c, j, n);
                EXPECT_EQ(seed.valuation(), c.offset(j));
                if (c.is_rational()) {
                    const auto expected = reference_seed(s.np.edge(j).charpoly, c.rational_value(), n);
                    for (int t = 0; t < n; ++t) {
                        EXPECT_EQ(seed[t].as_rational(), expected[static_cast<std::size_t>(t)]);
                    }
                    ++checked;
                }
            }
        }
    }
    EXPECT_GT(checked, 200);
}

TEST(Solver, GoldenFirstSlope)
{
    const Prepared s(kGolden);
    const auto traces = find_reduced_truncated_solution(s.ne, s.np, s.classes.front(), 1);
    ASSERT_EQ(traces.size(), 1u);
    const auto &t = traces.front();
    EXPECT_TRUE(t.found());
    EXPECT_TRUE(t.steps.empty());
    // The exit exponent lies past the window, so g is seen to vanish.
    EXPECT_FALSE(t.last_v);
    EXPECT_EQ(t.f, local_series(s.classes.front().modulus(), 1, {{q(-2), P({-1})}}));
}

TEST(Solver, GoldenSecondSlope)
{
    const Prepared s(kGolden);
    const Modulus mod = s.classes.front().modulus();
    const auto traces = find_reduced_truncated_solution(s.ne, s.np, s.classes.front(), 2);
    ASSERT_EQ(traces.size(), 1u);
    const auto &t = traces.front();
    EXPECT_TRUE(t.found());
    ASSERT_EQ(t.steps.size(), 1u);
    EXPECT_EQ(t.steps[0].v, q(-2));
    EXPECT_EQ(t.steps[0].alpha, LocalElem::from_lambda_poly(mod, 2, P({1, -1})));
    EXPECT_EQ(t.steps[0].beta, LocalElem::from_lambda_poly(mod, 2, P({-1, 1})));
    EXPECT_EQ(t.steps[0].h, LocalElem::constant(mod, 2, q(-1)));
    EXPECT_FALSE(t.last_v);
    EXPECT_EQ(t.f, local_series(mod, 2, {{q(-3), P({-1, 1})}, {q(-2), P({1})}}));
}

TEST(Solver, InverseAlphaTwoFailsOnTheGrid)
{
    const Prepared s(kInverse2);
    ASSERT_EQ(s.np.slope_count(), 2u);
    EXPECT_EQ(s.np.edge(1).slope, q(-6));
    EXPECT_EQ(s.np.edge(2).slope, q(-1));
    const auto traces = find_reduced_truncated_solution(s.ne, s.np, s.cls(P({-1, 1})), 2);
    ASSERT_EQ(traces.size(), 1u);
    EXPECT_EQ(traces[0].outcome, Outcome::FailedGrid);
    ASSERT_TRUE(traces[0].last_v);
    EXPECT_EQ(*traces[0].last_v, q(7, 2));
}

TEST(Solver, RandomRunsAreWellFormed)
{
    std::mt19937_64 rng(36);
    int found = 0, failed = 0;
    for (int k = 0; k < 250; ++k) {
        const Prepared s(random_equation(rng));
        if (check_slope_denominators(s.np, s.ne.equation.p)) {
            continue;
        }
        for (std::size_t j = 1; j <= s.np.slope_count(); ++j) {
            for (const auto &c : s.classes) {
                if (!c.attached(j)) {
                    continue;
                }
                SolverOptions opt;
                opt.debug_recompute = true;
                for (const auto &t : find_reduced_truncated_solution(s.ne, s.np, c, j, opt)) {
                    const Rational mu1 = s.np.edge(1).slope;
                    const Rational muj = s.np.edge(j).slope;
                    EXPECT_LE(Rational(t.steps.size()), Rational(s.np.d) * (muj - mu1) + 1);
                    for (std::size_t i = 0; i < t.steps.size(); ++i) {
                        const Rational &v = t.steps[i].v;
                        EXPECT_TRUE(on_grid(v, s.np.d));
                        EXPECT_GE(v, -muj);
                        EXPECT_LE(v, -mu1);
                        if (i > 0) {
                            EXPECT_GT(v, t.steps[i - 1].v);
                        }
                    }
                    if (j == 1) {
                        EXPECT_TRUE(t.found());
                    }
                    if (t.found()) {
                        ++found;
                        EXPECT_TRUE(verify_conditions(s.ne, s.np, c.restricted_to(t.defining), j, t.f).all());
                    } else {
                        ++failed;
                    }
                }
            }
        }
    }
    EXPECT_GT(found, 100);
    EXPECT_GT(failed, 5);
}

TEST(Conditions, GoldenSolutionsPass)
{
    const Prepared s(kGolden);
    const auto &c = s.classes.front();
    EXPECT_TRUE(verify_conditions(s.ne, s.np, c, 1, local_series(c.modulus(), 1, {{q(-2), P({-1})}})).all());
    EXPECT_TRUE(
        verify_conditions(s.ne, s.np, c, 2, local_series(c.modulus(), 2, {{q(-3), P({-1, 1})}, {q(-2), P({1})}}))
            .all());
}

TEST(Conditions, DegreeCapsDetected)
{
    const Prepared s(kGolden);
    const auto &c = s.classes.front();
    // A coefficient of λ-degree 1 at -μ_1 exceeds the reduced cap N - m_{c,1} - 1 = 0.
    const auto capped = verify_conditions(s.ne, s.np, c, 2,
                                          local_series(c.modulus(), 3, {{q(-3), P({-1, 1})}, {q(-2), P({0, 1})}}));
    EXPECT_FALSE(capped.c6);
    EXPECT_TRUE(capped.c5);
    // λ-degree 2 = N exceeds the global cap N - 1.
    const auto deg = verify_conditions(
        s.ne, s.np, c, 2, local_series(c.modulus(), 3, {{q(-3), P({-1, 1})}, {q(-2), P({1}) + pow(P({-1, 1}), 2)}}));
    EXPECT_FALSE(deg.c5);
}

TEST(Conditions, OffGridSupportDetected)
{
    const Prepared s(kGolden);
    const auto &c = s.classes.front();
    const auto rep = verify_conditions(
        s.ne, s.np, c, 2,
        local_series(c.modulus(), 2, {{q(-3), P({-1, 1})}, {q(-5, 2), P({1})}, {q(-2), P({1})}}));
    EXPECT_FALSE(rep.c2);
}

TEST(Conditions, WrongLeadingDataDetected)
{
    const Prepared s(kGolden);
    const auto &c = s.classes.front();
    const auto rep = verify_conditions(s.ne, s.np, c, 2, local_series(c.modulus(), 2, {{q(-2), P({1})}}));
    EXPECT_FALSE(rep.c4);
    EXPECT_FALSE(rep.c3);
    EXPECT_FALSE(rep.c1);
}

TEST(Oracle, GoldenWitnesses)
{
    const Prepared s(kGolden);
    const auto &c = s.classes.front();
    const auto r1 = feasibility_oracle(s.ne, s.np, c, 1);
    ASSERT_EQ(r1.size(), 1u);
    ASSERT_TRUE(r1[0].feasible);
    EXPECT_EQ(*r1[0].witness, local_series(c.modulus(), 1, {{q(-2), P({-1})}}));
    const auto r2 = feasibility_oracle(s.ne, s.np, c, 2);
    ASSERT_TRUE(r2[0].feasible);
    EXPECT_EQ(*r2[0].witness, local_series(c.modulus(), 2, {{q(-3), P({-1, 1})}, {q(-2), P({1})}}));
}

TEST(Oracle, InverseAlphaTwoInfeasible)
{
    const Prepared s(kInverse2);
    const auto r = feasibility_oracle(s.ne, s.np, s.cls(P({-1, 1})), 2);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_FALSE(r[0].feasible);
    EXPECT_FALSE(r[0].witness);
}

TEST(Prefix, ThreeSlopeExampleFirstSlope)
{
    const Prepared s(kThreeSlopes);
    const auto &c = s.cls(P({2, 1}));
    const auto pre = frobenius_prefix(s.ne, s.np, c, 1, q(9));
    ASSERT_EQ(pre.size(), 1u);
    ASSERT_GE(pre[0].modulus, 1);
    const int n = pre[0].modulus;
    const Modulus mod = c.modulus();
    const LocalSeries expected = local_series(mod, n,
                                              {{q(3), P({1})},
                                               {q(4), Poly({q(0), q(1, 2)})},
                                               {q(5), Poly({q(0), q(0), q(-1, 4)})},
                                               {q(6), Poly({q(0), q(0), q(1, 4)})},
                                               {q(7), Poly({q(0), q(0), q(0), q(1, 8)})},
                                               {q(8), Poly({q(0), q(0), q(0), q(-1, 8)})}});
    EXPECT_EQ(pre[0].g, expected);
}

TEST(Prefix, NonPuiseuxSeriesOfARegularSingularEquation)
{
    const Prepared s(kInverse);
    const auto &c = s.cls(P({-1, 1}));
    PrefixOptions opt;
    opt.extra_precision = 4;
    const auto pre = frobenius_prefix(s.ne, s.np, c, 2, q(2), opt);
    ASSERT_EQ(pre.size(), 1u);
    const auto &g = pre[0].g;
    const int n = pre[0].modulus;
    ASSERT_GE(n, 3);
    ASSERT_TRUE(g.terms().count(q(3, 2)));
    const LocalElem lam_inv = LocalElem::lambda(c.modulus(), n).inverse();
    const LocalElem t = LocalElem::t_power(c.modulus(), n, 1);
    EXPECT_EQ(g.terms().at(q(1)), t * lam_inv);
    EXPECT_EQ(g.terms().at(q(3, 2)), t * t * lam_inv);
    EXPECT_TRUE(g.terms().at(q(3, 2)).truncated(2).is_zero());
    EXPECT_EQ(g.terms().at(q(1)).truncated(2), LocalElem::t_power(c.modulus(), 2, 1));
}

// val_z(L_λ(g) - z^θ (λ-c)^N) ≥ min_i(val a_i + p^i order), cld g = seed, val g = -μ_j.
void check_prefix(const Prepared &s, const ExponentClass &c, std::size_t j, const Rational &order)
{
    for (const auto &pre : frobenius_prefix(s.ne, s.np, c, j, order)) {
        const ExponentClass cls = c.restricted_to(pre.defining);
        const int n = pre.modulus;
        ASSERT_GE(n, cls.precision(j));
        const Rational bound = pi_inverse(s.ne, order);
        LocalSeries defect = apply_L_lambda(s.ne.equation, pre.g, bound,
                                            lambda_powers(cls.modulus(), n, s.ne.equation.order()));
        if (pre.theta < bound) {
            defect.add_term(pre.theta, -LocalElem::t_power(cls.modulus(), n, cls.precision(j)));
        }
        for (const auto &[e, coef] : defect.terms()) {
            EXPECT_TRUE(coef.decide_zero()) << "defect at z^" << e;
        }
        const Rational muj = s.np.edge(j).slope;
        if (-muj < order) {
            ASSERT_FALSE(pre.g.empty());
            EXPECT_EQ(pre.g.terms().begin()->first, -muj);
            EXPECT_EQ(pre.g.terms().begin()->second.truncated(cls.precision(j)),
                      seed_coefficient(s.ne, s.np, cls, j, cls.precision(j)));
        }
    }
}

TEST(Prefix, DefectIdentityOnExamples)
{
    const Prepared s(kThreeSlopes);
    check_prefix(s, s.cls(P({2, 1})), 1, q(9));
    const Prepared m(kInverse);
    check_prefix(m, m.cls(P({-1, 1})), 1, q(0));
    check_prefix(m, m.cls(P({-1, 1})), 2, q(3));
}

TEST(Prefix, DefectIdentityOnRandomEquations)
{
    std::mt19937_64 rng(37);
    RandomSpec spec;
    spec.max_order = 3;
    spec.max_val = 4;
    int checked = 0;
    for (int k = 0; k < 150; ++k) {
        const MahlerEquation eq = random_equation(rng, spec);
        const Prepared s(eq);
        // Without regular singularity the exponents of g may accumulate below the order.
        if (!is_regular_singular(eq).regular_singular) {
            continue;
        }
        for (std::size_t j = 1; j <= s.np.slope_count(); ++j) {
            for (const auto &c : s.classes) {
                if (c.attached(j)) {
                    check_prefix(s, c, j, -s.np.edge(j).slope + q(uniform(rng, 1, 3)));
                    ++checked;
                }
            }
        }
    }
    EXPECT_GT(checked, 40);
}

TEST(Prefix, OneSlopeSeriesStayOnTheGrid)
{
    std::mt19937_64 rng(38);
    RandomSpec spec;
    spec.max_order = 3;
    for (int k = 0; k < 60; ++k) {
        const Prepared s(random_one_slope_equation(rng, spec));
        ASSERT_EQ(s.np.slope_count(), 1u);
        for (const auto &c : s.classes) {
            for (const auto &pre : frobenius_prefix(s.ne, s.np, c, 1, -s.np.edge(1).slope + 3)) {
                for (const auto &e : pre.g.support()) {
                    EXPECT_TRUE(on_grid(e, s.np.d)) << e;
                }
            }
        }
    }
}

TEST(Decision, KnownVerdicts)
{
    const Verdict v8 = is_regular_singular(parse_equation(kGolden));
    EXPECT_TRUE(v8.regular_singular);
    EXPECT_EQ(v8.reason, ReasonKind::AllTruncatedSolutionsFound);
    EXPECT_FALSE(v8.p_exceeds_nu);
    EXPECT_EQ(v8.nu, q(8));

    const Verdict v3 = is_regular_singular(parse_equation(kThreeSlopes));
    EXPECT_FALSE(v3.regular_singular);
    EXPECT_EQ(v3.reason, ReasonKind::SlopeDenominator);
    ASSERT_TRUE(v3.failing_slope);
    EXPECT_EQ(v3.polygon.edge(*v3.failing_slope).slope, q(1, 4));

    EXPECT_TRUE(is_regular_singular(parse_equation(kInverse)).regular_singular);
    EXPECT_TRUE(is_regular_singular(parse_equation(kDirect2)).regular_singular);
    const Verdict vi = is_regular_singular(parse_equation(kInverse2));
    EXPECT_FALSE(vi.regular_singular);
    EXPECT_EQ(vi.reason, ReasonKind::TruncatedSolutionMissing);
    ASSERT_TRUE(vi.failing_pair);
    EXPECT_EQ(vi.pairs[*vi.failing_pair].slope, 2u);
}

TEST(Decision, SlopeDenominatorCheck)
{
    EXPECT_FALSE(check_slope_denominators(Prepared(kGolden).np, 2));
    const Prepared third("z*f(z^4) + f(z) = 0 ; p=2");
    ASSERT_EQ(third.np.slope_count(), 1u);
    EXPECT_EQ(third.np.edge(1).slope, q(1, 3));
    EXPECT_FALSE(check_slope_denominators(third.np, 2));
    EXPECT_EQ(check_slope_denominators(Prepared(kThreeSlopes).np, 2), std::optional<std::size_t>(3));
}

TEST(Decision, Shortcuts)
{
    const Verdict two_terms = is_regular_singular(parse_equation("f(z^2) - 2*f(z) = 0 ; p=2"));
    EXPECT_TRUE(two_terms.regular_singular);
    EXPECT_EQ(two_terms.reason, ReasonKind::OneSlopeShortcut);
    EXPECT_FALSE(one_slope_shortcut(Prepared(kGolden).np));
    const Verdict fuchs = is_regular_singular(parse_equation("(1+z^2)*f(z^4) + f(z^2) + (1+z)*f(z) = 0 ; p=2"));
    EXPECT_TRUE(fuchs.regular_singular);
    EXPECT_EQ(fuchs.reason, ReasonKind::OneSlopeShortcut);
}

TEST(Decision, FuchsianCheck)
{
    EXPECT_TRUE(fuchsian_check(Prepared("(1+z^2)*f(z^4) + f(z^2) + (1+z)*f(z) = 0 ; p=2").ne));
    EXPECT_FALSE(fuchsian_check(Prepared(kGolden).ne));
    EXPECT_FALSE(fuchsian_check(Prepared("f(z^4) + f(z^2) + z*f(z) = 0 ; p=2").ne));
}

TEST(Decision, FuchsianIffOneNullSlope)
{
    std::mt19937_64 rng(39);
    for (int k = 0; k < 300; ++k) {
        const Prepared s(random_equation(rng));
        const bool one_null = s.np.slope_count() == 1 && s.np.edge(1).slope == 0;
        EXPECT_EQ(fuchsian_check(s.ne), one_null);
    }
}

TEST(Decision, TwoSlopeExamplesAtFive)
{
    const MahlerEquation yes = parse_equation("f(z^25) - (1+z)*f(z^5) + z*f(z) = 0 ; p=5");
    const MahlerEquation no = parse_equation("f(z^25) - (1+2*z)*f(z^5) + z*f(z) = 0 ; p=5");
    EXPECT_EQ(reference_residue_at(yes, q(1)), std::vector<Rational>({q(0), q(0)}));
    EXPECT_EQ(reference_residue_at(no, q(1)), std::vector<Rational>({q(0), q(-1)}));

    const Prepared sy(yes), sn(no);
    EXPECT_EQ(two_slope_criterion(sy.ne, sy.np, sy.classes), std::optional<bool>(true));
    EXPECT_EQ(two_slope_criterion(sn.ne, sn.np, sn.classes), std::optional<bool>(false));
    DecisionOptions general;
    general.use_shortcuts = false;
    EXPECT_TRUE(is_regular_singular(yes, general).regular_singular);
    EXPECT_FALSE(is_regular_singular(no, general).regular_singular);
    EXPECT_EQ(is_regular_singular(yes).reason, ReasonKind::TwoSlopeCriterion);
    const Prepared one("f(z^5) + f(z) = 0 ; p=5");
    EXPECT_FALSE(two_slope_criterion(one.ne, one.np, one.classes));
}

TEST(Decision, Sweeps)
{
    const MahlerEquation yes = parse_equation("f(z^25) - (1+z)*f(z^5) + z*f(z) = 0 ; p=5");
    const SweepResult r = p_sweep(yes, {5, 7, 11});
    EXPECT_TRUE(r.all_agree);
    ASSERT_EQ(r.rows.size(), 3u);
    for (const auto &row : r.rows) {
        EXPECT_TRUE(row.verdict.regular_singular);
        EXPECT_TRUE(row.precondition_met);
    }
    const SweepResult n = p_sweep(parse_equation("f(z^25) - (1+2*z)*f(z^5) + z*f(z) = 0 ; p=5"), {5, 7});
    EXPECT_TRUE(n.all_agree);
    EXPECT_FALSE(n.rows[0].verdict.regular_singular);
    const SweepResult f = p_sweep(parse_equation("(1+z)*f(z^4) + z^3*f(z^2) + f(z) = 0 ; p=2"), {2, 3});
    EXPECT_TRUE(f.all_agree);
    EXPECT_TRUE(f.rows[0].verdict.regular_singular);
    EXPECT_FALSE(f.rows[0].precondition_met);
}

TEST(Decision, ParallelMatchesSequential)
{
    std::mt19937_64 rng(40);
    DecisionOptions seq, par;
    seq.use_shortcuts = par.use_shortcuts = false;
    par.parallel = true;
    for (int k = 0; k < 60; ++k) {
        const MahlerEquation eq = random_equation(rng);
        EXPECT_TRUE(same_verdict(is_regular_singular(eq, seq), is_regular_singular(eq, par)));
    }
}

TEST(Decision, ShortcutsAgreeWithTheGeneralPath)
{
    std::mt19937_64 rng(41);
    DecisionOptions general;
    general.use_shortcuts = false;
    for (int k = 0; k < 80; ++k) {
        const MahlerEquation eq = random_two_slope_equation(rng, 5);
        EXPECT_EQ(is_regular_singular(eq).regular_singular, is_regular_singular(eq, general).regular_singular)
            << equation_to_string(eq);
    }
}

TEST(Decision, PrecisionErrorForShortInput)
{
    MahlerEquation eq = parse_equation(kGolden);
    Series a0(q(1));
    a0.add_term(q(0), Rational(1));
    eq.coefficients[0] = a0;
    EXPECT_THROW(is_regular_singular(eq), PrecisionError);
}


TEST(Generators, AdmissibleEquationsKeepTheirPromises)
{
    std::mt19937_64 rng(61);
    RandomSpec spec;
    int multi = 0;
    for (int k = 0; k < 300; ++k) {
        const MahlerEquation eq = random_admissible_equation(rng, spec);
        const Prepared s(eq);
        EXPECT_LE(eq.order(), spec.max_order);
        EXPECT_FALSE(check_slope_denominators(s.np, eq.p)) << equation_to_string(eq);
        Rational lo = *eq.a(0).valuation(), hi = lo;
        for (int i = 0; i <= eq.order(); ++i) {
            if (const auto v = eq.a(i).valuation()) {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
        }
        EXPECT_LE(hi - lo, spec.max_val);
        multi += s.np.slope_count() > 1;
    }
    EXPECT_GT(multi, 100);
}

} // namespace
