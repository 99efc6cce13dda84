// Decides z^8 f(z^4) - (z^2 + z^3 + z^7) f(z^2) + (1 + z) f(z) = 0 at p = 2
// and prints the truncated-solution search for every (exponent, slope) pair.

#include <iostream>

#include <mahler/mahler.hpp>

int main()
{
    using namespace mahler;

    const MahlerEquation eq = parse_equation("z^8*f(z^4) - (z^2+z^3+z^7)*f(z^2) + (1+z)*f(z) = 0 ; p=2");
    DecisionOptions opt;
    opt.use_shortcuts = false;
    const Verdict v = is_regular_singular(eq, opt);

    std::cout << equation_to_string(eq) << "\n";
    for (std::size_t j = 1; j <= v.polygon.slope_count(); ++j) {
        const Edge &e = v.polygon.edge(j);
        std::cout << "slope " << e.slope << ", chi = " << e.charpoly.to_string() << "\n";
    }
    for (const PairResult &pr : v.pairs) {
        for (const SolverTrace &t : pr.branches) {
            std::cout << "c root of " << t.defining.to_string() << ", j = " << t.slope << "\n";
            for (const SolverStep &s : t.steps) {
                std::cout << "  v = " << s.v << "  alpha = " << s.alpha.to_string() << "  beta = " << s.beta.to_string()
                          << "  h = " << s.h.to_string() << "\n";
            }
            std::cout << "  f = " << t.f.to_string() << "\n";
        }
    }
    std::cout << (v.regular_singular ? "regular singular" : "not regular singular") << " (" << to_string(v.reason)
              << ")\n";
    return v.regular_singular ? 0 : 1;
}
