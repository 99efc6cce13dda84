// Command-line front end for the regular-singularity decision procedure.

#include <cstdio>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mahler/mahler.hpp>

namespace
{

using namespace mahler;

constexpr int kExitRegular = 0;
constexpr int kExitNotRegular = 1;
constexpr int kExitError = 2;
constexpr int kExitDisagreement = 3;

struct Common {
    std::string file;
    std::string expr;
    bool json_out = false;
    bool parallel = false;
    bool debug_recompute = false;
    bool no_shortcuts = false;
};

MahlerEquation read_input(const Common &c, std::optional<long> p = std::nullopt)
{
    if (!c.expr.empty()) {
        return parse_equation(c.expr, p);
    }
    if (c.file.empty()) {
        throw std::runtime_error("no input: give a file, '-' for stdin, or --expr");
    }
    if (c.file == "-") {
        std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
        return parse_equation(text, p);
    }
    return load_equation(c.file, p);
}

DecisionOptions options_of(const Common &c)
{
    DecisionOptions o;
    o.parallel = c.parallel;
    o.debug_recompute = c.debug_recompute;
    o.use_shortcuts = !c.no_shortcuts;
    return o;
}

std::string slope_list(const NewtonPolygon &np)
{
    std::string out;
    for (std::size_t j = 1; j <= np.slope_count(); ++j) {
        if (!out.empty()) {
            out += ", ";
        }
        out += np.edge(j).slope.get_str() + " (r=" + std::to_string(np.edge(j).multiplicity()) + ")";
    }
    return out;
}

std::string class_label(const ExponentClass &c)
{
    if (c.is_rational()) {
        return "c = " + c.rational_value().get_str();
    }
    return "c root of " + c.defining().to_string("λ");
}

std::string modulus_label(const ExponentClass &c, int power)
{
    if (c.is_rational()) {
        return "(" + c.defining().to_string("λ") + ")^" + std::to_string(power);
    }
    return "(λ - c)^" + std::to_string(power) + ", c a root of " + c.defining().to_string("λ");
}

void print_polygon(const NewtonPolygon &np)
{
    std::cout << "Newton polygon: " << np.slope_count() << " slope(s), d = " << np.d.get_str() << "\n";
    for (std::size_t j = 1; j <= np.slope_count(); ++j) {
        const Edge &e = np.edge(j);
        std::cout << "  μ_" << j << " = " << e.slope.get_str() << "  r = " << e.multiplicity() << "  I = {";
        for (std::size_t k = 0; k < e.indices.size(); ++k) {
            std::cout << (k ? "," : "") << e.indices[k];
        }
        std::cout << "}  χ = " << e.charpoly.to_string("λ") << "  θ = " << e.theta.get_str() << "\n";
    }
}

void print_classes(const std::vector<ExponentClass> &classes)
{
    std::cout << "Exponents:\n";
    for (const auto &c : classes) {
        std::cout << "  " << class_label(c) << ":";
        for (std::size_t j = 1; j <= c.slope_count(); ++j) {
            if (c.attached(j)) {
                std::cout << "  m_" << j << " = " << c.multiplicity(j) << ", s_" << j << " = " << c.offset(j);
            }
        }
        std::cout << "\n";
    }
}

void print_trace(const SolverTrace &t, const ExponentClass &cls)
{
    std::cout << "(" << class_label(cls) << ", j = " << t.slope << ")";
    if (t.defining != cls.defining()) {
        std::cout << " branch " << t.defining.to_string("λ");
    }
    std::cout << ", modulus (λ - c)^" << t.modulus << "\n";
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const auto &s = t.steps[k];
        std::cout << "  step " << k + 1 << ": v = " << s.v.get_str() << "  α = " << s.alpha.to_string()
                  << "  β = " << s.beta.to_string() << "  h = " << s.h.to_string() << "\n";
    }
    std::cout << "  outcome: " << to_string(t.outcome);
    if (t.last_v) {
        std::cout << " (v = " << t.last_v->get_str() << ")";
    } else if (t.found()) {
        std::cout << " (g vanishes up to the window)";
    }
    std::cout << "\n  f = " << t.f.to_string() << "\n";
}

void print_verdict(const MahlerEquation &eq, const Verdict &v)
{
    std::cout << "equation: " << equation_to_string(eq) << "\n";
    std::cout << "normalization: z -> z^" << v.normalization.delta.get_str() << ", divided by z^"
              << v.normalization.shift.get_str() << "\n";
    std::cout << "ν = " << v.nu.get_str() << ", p > ν: " << (v.p_exceeds_nu ? "yes" : "no") << "\n";
    std::cout << "slopes: " << slope_list(v.polygon) << "\n";
    std::cout << "verdict: " << (v.regular_singular ? "regular singular at 0" : "not regular singular at 0") << "\n";
    std::cout << "reason: " << to_string(v.reason);
    if (v.failing_slope) {
        std::cout << " (slope μ_" << *v.failing_slope << " = " << v.polygon.edge(*v.failing_slope).slope.get_str()
                  << ", denominator not coprime to p = " << v.p << ")";
    }
    if (v.failing_pair) {
        const auto &pr = v.pairs[*v.failing_pair];
        const auto &t = pr.representative();
        std::cout << " (" << class_label(pr.cls) << ", j = " << pr.slope << ": " << to_string(t.outcome);
        if (t.last_v) {
            std::cout << " at v = " << t.last_v->get_str();
        }
        std::cout << ")";
    }
    std::cout << "\n";
}

int exit_of(const Verdict &v)
{
    return v.regular_singular ? kExitRegular : kExitNotRegular;
}

int cmd_decide(const Common &c)
{
    const MahlerEquation eq = read_input(c);
    const Verdict v = is_regular_singular(eq, options_of(c));
    if (c.json_out) {
        std::cout << verdict_to_json(v).dump(2) << "\n";
    } else {
        print_verdict(eq, v);
    }
    return exit_of(v);
}

int cmd_polygon(const Common &c)
{
    const MahlerEquation eq = read_input(c);
    const NormalizedEquation ne = normalize_equation(eq);
    const NewtonPolygon np = newton_polygon(ne);
    if (c.json_out) {
        json j = polygon_to_json(np);
        json pts = json::array();
        for (int i = 0; i <= ne.equation.order(); ++i) {
            if (ne.valuations[static_cast<std::size_t>(i)]) {
                pts.push_back(json::array({power_of(ne.equation.p, i).get_str(),
                                           ne.valuations[static_cast<std::size_t>(i)]->get_str()}));
            }
        }
        j["points"] = pts;
        std::cout << j.dump(2) << "\n";
    } else {
        print_polygon(np);
    }
    return 0;
}

int cmd_exponents(const Common &c)
{
    const MahlerEquation eq = read_input(c);
    const NewtonPolygon np = newton_polygon(normalize_equation(eq));
    const auto classes = exponents(np);
    if (c.json_out) {
        json arr = json::array();
        for (const auto &cls : classes) {
            arr.push_back(class_to_json(cls));
        }
        std::cout << arr.dump(2) << "\n";
    } else {
        print_classes(classes);
    }
    return 0;
}

int cmd_trace(const Common &c)
{
    const MahlerEquation eq = read_input(c);
    const NormalizedEquation ne = normalize_equation(eq);
    const NewtonPolygon np = newton_polygon(ne);
    const auto classes = exponents(np);
    if (auto bad = check_slope_denominators(np, eq.p)) {
        std::cout << "slope μ_" << *bad << " = " << np.edge(*bad).slope.get_str()
                  << " has a denominator sharing a factor with p; truncated solutions are not searched\n";
        return kExitNotRegular;
    }
    check_required_precision(ne, np);
    SolverOptions so;
    so.debug_recompute = c.debug_recompute;
    json out = json::array();
    bool all = true;
    for (std::size_t j = 1; j <= np.slope_count(); ++j) {
        for (const auto &cls : classes) {
            if (!cls.attached(j)) {
                continue;
            }
            for (const auto &t : find_reduced_truncated_solution(ne, np, cls, j, so)) {
                all = all && t.found();
                if (c.json_out) {
                    out.push_back(trace_to_json(t));
                } else {
                    print_trace(t, cls);
                }
            }
        }
    }
    if (c.json_out) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << (all ? "all truncated solutions found" : "a truncated solution is missing") << "\n";
    }
    return all ? kExitRegular : kExitNotRegular;
}

int cmd_prefix(const Common &c, const std::string &order_text, std::size_t only_slope)
{
    const MahlerEquation eq = read_input(c);
    const NormalizedEquation ne = normalize_equation(eq);
    const NewtonPolygon np = newton_polygon(ne);
    const auto classes = exponents(np);
    const Rational order = parse_rational(order_text);
    json out = json::array();
    for (std::size_t j = 1; j <= np.slope_count(); ++j) {
        if (only_slope && j != only_slope) {
            continue;
        }
        for (const auto &cls : classes) {
            if (!cls.attached(j)) {
                continue;
            }
            for (const auto &pre : frobenius_prefix(ne, np, cls, j, order)) {
                if (c.json_out) {
                    out.push_back(json{{"slope", j},
                                       {"defining", poly_to_json(pre.defining)},
                                       {"order", order.get_str()},
                                       {"theta", pre.theta.get_str()},
                                       {"modulus", pre.modulus},
                                       {"g", local_series_to_json(pre.g)}});
                } else {
                    const ExponentClass branch = cls.restricted_to(pre.defining);
                    const std::string c_name = branch.is_rational() ? branch.rational_value().get_str() : "c";
                    std::cout << "g_{" << c_name << "," << j << "} = " << pre.g.to_string() << " + O(z^"
                              << order.get_str() << ")   [coefficients mod " << modulus_label(branch, pre.modulus)
                              << "]\n";
                }
            }
        }
    }
    if (c.json_out) {
        std::cout << out.dump(2) << "\n";
    }
    return 0;
}

std::vector<long> parse_p_list(const std::string &text)
{
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        long p = 0;
        try {
            p = std::stol(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != item.size() || p < 2) {
            throw std::invalid_argument("--p expects a comma-separated list of integers >= 2, got '" + item + "'");
        }
        out.push_back(p);
    }
    return out;
}

int cmd_sweep(const Common &c, const std::vector<long> &ps)
{
    if (ps.empty()) {
        throw std::runtime_error("sweep needs --p with a comma-separated list");
    }
    MahlerEquation eq = read_input(c);
    const SweepResult res = p_sweep(eq, ps, options_of(c));
    if (c.json_out) {
        json rows = json::array();
        for (const auto &r : res.rows) {
            rows.push_back(json{{"p", r.p},
                                {"precondition_met", r.precondition_met},
                                {"regular_singular", r.verdict.regular_singular},
                                {"reason", to_string(r.verdict.reason)}});
        }
        std::cout << json{{"nu", res.nu.get_str()}, {"rows", rows}, {"all_agree", res.all_agree}}.dump(2) << "\n";
    } else {
        std::cout << "ν = " << res.nu.get_str() << "\n";
        std::cout << "p\tregular singular\treason\n";
        for (const auto &r : res.rows) {
            std::cout << r.p << "\t" << (r.verdict.regular_singular ? "true" : "false") << "\t"
                      << to_string(r.verdict.reason);
            if (!r.precondition_met) {
                std::cout << "\t(p <= ν: large-p precondition unmet)";
            }
            std::cout << "\n";
        }
        std::cout << (res.all_agree ? "all verdicts agree" : "verdicts disagree") << "\n";
    }
    if (!res.all_agree) {
        return kExitDisagreement;
    }
    return exit_of(res.rows.front().verdict);
}

int cmd_oracle_check(const Common &c)
{
    const MahlerEquation eq = read_input(c);
    const NormalizedEquation ne = normalize_equation(eq);
    const NewtonPolygon np = newton_polygon(ne);
    const auto classes = exponents(np);
    if (auto bad = check_slope_denominators(np, eq.p)) {
        std::cout << "slope μ_" << *bad << " fails the denominator test; nothing to compare\n";
        return kExitNotRegular;
    }
    check_required_precision(ne, np);
    bool agree = true;
    bool all_found = true;
    for (std::size_t j = 1; j <= np.slope_count(); ++j) {
        for (const auto &cls : classes) {
            if (!cls.attached(j)) {
                continue;
            }
            const auto traces = find_reduced_truncated_solution(ne, np, cls, j);
            const auto feas = feasibility_oracle(ne, np, cls, j);
            bool solver_found = true;
            for (const auto &t : traces) {
                solver_found = solver_found && t.found();
            }
            bool oracle_found = true;
            for (const auto &f : feas) {
                oracle_found = oracle_found && f.feasible;
            }
            bool witness_ok = true;
            for (const auto &f : feas) {
                if (f.witness) {
                    witness_ok = witness_ok &&
                                 verify_conditions(ne, np, cls.restricted_to(f.defining), j, *f.witness).all();
                }
            }
            const bool ok = solver_found == oracle_found && witness_ok;
            agree = agree && ok;
            all_found = all_found && solver_found;
            std::cout << "(" << class_label(cls) << ", j = " << j << "): solver "
                      << (solver_found ? "found" : "failed") << ", oracle "
                      << (oracle_found ? "feasible" : "infeasible") << (witness_ok ? "" : ", witness rejected")
                      << (ok ? "  [agree]" : "  [DISAGREE]") << "\n";
        }
    }
    if (!agree) {
        return kExitDisagreement;
    }
    return all_found ? kExitRegular : kExitNotRegular;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Decides whether a p-Mahler equation is regular singular at 0"};
    app.require_subcommand(1);
    Common common;
    std::string p_list;
    std::string order = "2";
    std::size_t only_slope = 0;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("file", common.file, "equation file (JSON document or one-line syntax), '-' for stdin");
        sub->add_option("-e,--expr", common.expr, "equation given inline in the one-line syntax");
        sub->add_flag("--json", common.json_out, "machine-readable output");
    };
    auto add_decision = [&](CLI::App *sub) {
        sub->add_flag("--parallel", common.parallel, "solve the (class, slope) pairs concurrently");
        sub->add_flag("--debug-recompute", common.debug_recompute, "recompute L_λ(f) from scratch after every step");
        sub->add_flag("--no-shortcuts", common.no_shortcuts, "skip the one-slope and two-slope shortcuts");
    };

    auto *decide = app.add_subcommand("decide", "decide regular singularity at 0");
    add_common(decide);
    add_decision(decide);
    auto *polygon = app.add_subcommand("polygon", "print the Newton polygon");
    add_common(polygon);
    auto *expo = app.add_subcommand("exponents", "print the exponent classes");
    add_common(expo);
    auto *trace = app.add_subcommand("trace", "print the truncated-solution search step by step");
    add_common(trace);
    trace->add_flag("--debug-recompute", common.debug_recompute, "recompute L_λ(f) from scratch after every step");
    auto *prefix = app.add_subcommand("prefix", "print prefixes of the Frobenius series g_{c,j}");
    add_common(prefix);
    prefix->add_option("--order", order, "exponent bound, e.g. 9 or 5/2")->capture_default_str();
    prefix->add_option("--slope", only_slope, "restrict to one slope index (1-based)");
    auto *sweep = app.add_subcommand("sweep", "decide the same coefficients for several p");
    add_common(sweep);
    add_decision(sweep);
    sweep->add_option("--p", p_list, "comma-separated list of p")->required();
    auto *oracle = app.add_subcommand("oracle-check", "compare the solver with the linear-algebra oracle");
    add_common(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    }

    try {
        if (decide->parsed()) {
            return cmd_decide(common);
        }
        if (polygon->parsed()) {
            return cmd_polygon(common);
        }
        if (expo->parsed()) {
            return cmd_exponents(common);
        }
        if (trace->parsed()) {
            return cmd_trace(common);
        }
        if (prefix->parsed()) {
            return cmd_prefix(common, order, only_slope);
        }
        if (sweep->parsed()) {
            return cmd_sweep(common, parse_p_list(p_list));
        }
        if (oracle->parsed()) {
            return cmd_oracle_check(common);
        }
    } catch (const PrecisionError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
