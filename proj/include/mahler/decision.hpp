#ifndef MAHLER_DECISION_HPP
#define MAHLER_DECISION_HPP

#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <mahler/algebraic.hpp>
#include <mahler/equation.hpp>
#include <mahler/newton.hpp>
#include <mahler/solver.hpp>

namespace mahler
{

enum class ReasonKind {
    SlopeDenominator,
    TruncatedSolutionMissing,
    AllTruncatedSolutionsFound,
    OneSlopeShortcut,
    TwoSlopeCriterion
};

inline const char *to_string(ReasonKind r)
{
    switch (r) {
    case ReasonKind::SlopeDenominator:
        return "SlopeDenominator";
    case ReasonKind::TruncatedSolutionMissing:
        return "TruncatedSolutionMissing";
    case ReasonKind::AllTruncatedSolutionsFound:
        return "AllTruncatedSolutionsFound";
    case ReasonKind::OneSlopeShortcut:
        return "OneSlopeShortcut";
    case ReasonKind::TwoSlopeCriterion:
        return "TwoSlopeCriterion";
    }
    return "?";
}

// Outcome of the truncated-solution search for one (class, slope) pair, over all branches.
struct PairResult {
    std::size_t slope = 0;
    ExponentClass cls;
    std::vector<SolverTrace> branches;

    bool found() const
    {
        for (const auto &b : branches) {
            if (!b.found()) {
                return false;
            }
        }
        return true;
    }

    // The first failing branch, or the first branch when all succeed.
    const SolverTrace &representative() const
    {
        for (const auto &b : branches) {
            if (!b.found()) {
                return b;
            }
        }
        return branches.front();
    }
};

struct Verdict {
    bool regular_singular = false;
    ReasonKind reason = ReasonKind::AllTruncatedSolutionsFound;
    std::optional<std::size_t> failing_slope;   // SlopeDenominator
    std::optional<std::size_t> failing_pair;    // index into pairs, TruncatedSolutionMissing
    std::vector<PairResult> pairs;              // solver results in (j, class) order
    std::optional<bool> two_slope_result;       // TwoSlopeCriterion
    long p = 2;
    Normalization normalization;
    NewtonPolygon polygon;
    std::vector<ExponentClass> classes;
    Rational nu;
    bool p_exceeds_nu = false;
};

struct DecisionOptions {
    bool use_shortcuts = true;
    bool parallel = false;
    bool debug_recompute = false;
};

inline std::optional<bool> one_slope_shortcut(const NewtonPolygon &np)
{
    if (np.slope_count() == 1) {
        return true;
    }
    return std::nullopt;
}

// For p > ν with exactly two slopes, the second null: the equation is
// regular singular iff Σ_i a_i(z)|_{n ≤ val a_0} λ^i is divisible by q^{m_{c,2}}
// for every class attached to the second slope. nullopt when not applicable.
inline std::optional<bool> two_slope_criterion(const NormalizedEquation &ne, const NewtonPolygon &np,
                                               const std::vector<ExponentClass> &classes)
{
    const MahlerEquation &eq = ne.equation;
    if (np.slope_count() != 2 || np.edge(2).slope != 0 || !(Rational(eq.p) > ne.nu)) {
        return std::nullopt;
    }
    const Rational top = *ne.valuations.front();
    for (int i = 0; i <= eq.order(); ++i) {
        const auto &t = eq.a(i).truncation_order();
        if (t && *t <= top) {
            throw PrecisionError(i, ne.original_exponent(top + 1),
                                 "the two-slope criterion reads coefficients up to z^" + top.get_str());
        }
    }
    for (Integer n = 0; n <= floor(top); ++n) {
        std::vector<Rational> coeffs(static_cast<std::size_t>(eq.order()) + 1);
        for (int i = 0; i <= eq.order(); ++i) {
            auto it = eq.a(i).terms().find(Rational(n));
            if (it != eq.a(i).terms().end()) {
                coeffs[static_cast<std::size_t>(i)] = it->second;
            }
        }
        const Poly row(std::move(coeffs));
        if (row.is_zero()) {
            continue;
        }
        for (const auto &cls : classes) {
            if (!cls.attached(2)) {
                continue;
            }
            const Poly qm = pow(cls.defining(), static_cast<unsigned>(cls.multiplicity(2)));
            if (!divides(qm, row)) {
                return false;
            }
        }
    }
    return true;
}

inline Verdict is_regular_singular(const MahlerEquation &raw, const DecisionOptions &opt = {})
{
    const NormalizedEquation ne = normalize_equation(raw);
    Verdict v;
    v.p = raw.p;
    v.normalization = ne.normalization;
    v.nu = ne.nu;
    v.p_exceeds_nu = Rational(raw.p) > ne.nu;
    v.polygon = newton_polygon(ne);
    v.classes = exponents(v.polygon);

    if (auto bad = check_slope_denominators(v.polygon, raw.p)) {
        v.regular_singular = false;
        v.reason = ReasonKind::SlopeDenominator;
        v.failing_slope = bad;
        return v;
    }
    if (opt.use_shortcuts) {
        if (one_slope_shortcut(v.polygon)) {
            v.regular_singular = true;
            v.reason = ReasonKind::OneSlopeShortcut;
            return v;
        }
        if (auto two = two_slope_criterion(ne, v.polygon, v.classes)) {
            v.regular_singular = *two;
            v.reason = ReasonKind::TwoSlopeCriterion;
            v.two_slope_result = *two;
            return v;
        }
    }
    check_required_precision(ne, v.polygon);

    struct Task {
        std::size_t j;
        const ExponentClass *cls;
    };
    std::vector<Task> tasks;
    for (std::size_t j = 1; j <= v.polygon.slope_count(); ++j) {
        for (const auto &cls : v.classes) {
            if (cls.attached(j)) {
                tasks.push_back({j, &cls});
            }
        }
    }
    SolverOptions sopt;
    sopt.debug_recompute = opt.debug_recompute;
    auto run = [&](const Task &t) {
        return PairResult{t.j, *t.cls, find_reduced_truncated_solution(ne, v.polygon, *t.cls, t.j, sopt)};
    };

    if (opt.parallel) {
        std::vector<std::future<PairResult>> futures;
        futures.reserve(tasks.size());
        for (const auto &t : tasks) {
            futures.push_back(std::async(std::launch::async, run, t));
        }
        for (auto &fu : futures) {
            v.pairs.push_back(fu.get());
        }
    } else {
        for (const auto &t : tasks) {
            v.pairs.push_back(run(t));
            if (!v.pairs.back().found()) {
                break;
            }
        }
    }
    for (std::size_t k = 0; k < v.pairs.size(); ++k) {
        if (!v.pairs[k].found()) {
            v.pairs.resize(k + 1);
            v.failing_pair = k;
            v.regular_singular = false;
            v.reason = ReasonKind::TruncatedSolutionMissing;
            return v;
        }
    }
    v.regular_singular = true;
    v.reason = ReasonKind::AllTruncatedSolutionsFound;
    return v;
}

// One slope, or two slopes with the second null.
inline bool large_p_shape(const NewtonPolygon &np)
{
    return np.slope_count() == 1 || (np.slope_count() == 2 && np.edge(2).slope == 0);
}

struct SweepRow {
    long p;
    bool precondition_met; // p > ν
    Verdict verdict;
};

struct SweepResult {
    Rational nu;
    std::vector<SweepRow> rows;
    bool all_agree = true;
};

// Decides the same coefficients for each p in the list.
inline SweepResult p_sweep(const MahlerEquation &eq, const std::vector<long> &p_list, const DecisionOptions &opt = {})
{
    SweepResult out;
    for (long p : p_list) {
        MahlerEquation e = eq;
        e.p = p;
        Verdict v = is_regular_singular(e, opt);
        out.nu = v.nu;
        out.rows.push_back({p, v.p_exceeds_nu, std::move(v)});
    }
    for (const auto &row : out.rows) {
        if (row.verdict.regular_singular != out.rows.front().verdict.regular_singular) {
            out.all_agree = false;
        }
    }
    return out;
}

} // namespace mahler

#endif
