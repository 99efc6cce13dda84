#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include <mahler/mahler.hpp>

#include "support/generators.hpp"

namespace
{

using namespace mahler;

Rational q(long n, long d = 1)
{
    return make_rational(n, d);
}

Series S(std::initializer_list<std::pair<Rational, long>> terms)
{
    Series s;
    for (const auto &[e, c] : terms) {
        s.add_term(e, Rational(c));
    }
    return s;
}

std::string data_file(const std::string &name)
{
    return std::string(MAHLER_DATA_DIR) + "/" + name + ".json";
}

TEST(Parser, GoldenLine)
{
    const auto eq = parse_equation("z^8*f(z^4) - (z^2+z^3+z^7)*f(z^2) + (1+z)*f(z) = 0 ; p=2");
    EXPECT_EQ(eq.p, 2);
    ASSERT_EQ(eq.order(), 2);
    EXPECT_EQ(eq.a(0), S({{q(0), 1}, {q(1), 1}}));
    EXPECT_EQ(eq.a(1), S({{q(2), -1}, {q(3), -1}, {q(7), -1}}));
    EXPECT_EQ(eq.a(2), S({{q(8), 1}}));
}

TEST(Parser, FractionsTruncationsAndProducts)
{
    const auto eq = parse_equation("(1/2 + z^(1/3) + O(z^2))*f(z^3) - 3/4*z^-1*f(z) = 0 ; p=3");
    EXPECT_EQ(eq.a(0), S({{q(-1), 0}}) + Series::monomial(q(-3, 4), q(-1)));
    ASSERT_TRUE(eq.a(1).truncation_order());
    EXPECT_EQ(*eq.a(1).truncation_order(), q(2));
    EXPECT_EQ(*eq.a(1).coefficient(q(1, 3)), q(1));
    EXPECT_EQ(*eq.a(1).coefficient(q(0)), q(1, 2));
    const auto sq = parse_equation("(1+z)^2*f(z^2) + f(z) = 0 ; p=2");
    EXPECT_EQ(sq.a(1), S({{q(0), 1}, {q(1), 2}, {q(2), 1}}));
}

TEST(Parser, Errors)
{
    EXPECT_THROW(parse_equation("0.5*f(z^2) + f(z) = 0 ; p=2"), ParseError);
    try {
        parse_equation("f(z^2) + 0.5*f(z) = 0 ; p=2");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.position(), 10u);
    }
    EXPECT_THROW(parse_equation("f(z^2) + f(z) = 0"), ParseError);
    EXPECT_THROW(parse_equation("f(z^3) + f(z) = 0 ; p=2"), ParseError);
    EXPECT_THROW(parse_equation("f(z^2) + f(z) = 0 ; p=2", 3), InvalidEquation);
    EXPECT_THROW(parse_equation("f(z^2) + z = 0 ; p=2"), InvalidEquation);
    try {
        parse_equation("f(z^2) = 0 ; p=2");
        FAIL();
    } catch (const InvalidEquation &e) {
        EXPECT_STREQ(e.what(), "a_0 = 0");
    }
}

TEST(Parser, JsonDocument)
{
    const std::string doc = R"({"p": 2, "coefficients": [
        {"terms": []},
        {"terms": [[0, 1, "1"]]}]})";
    try {
        parse_equation(doc);
        FAIL();
    } catch (const InvalidEquation &e) {
        EXPECT_STREQ(e.what(), "a_0 = 0");
    }
    EXPECT_THROW(parse_equation(R"({"p": 2, "coefficients": [{"terms": [[0, 1, 0.5]]}, {"terms": [[0, 1, "1"]]}]})"),
                 ParseError);
    EXPECT_THROW(parse_equation(R"({"p": 2, "coefficients": [{"terms": [[0, 1, "0.5"]]}, {"terms": [[0, 1, "1"]]}]})"),
                 ParseError);
    const auto eq = parse_equation(
        R"({"p": 3, "coefficients": [{"terms": [[1, 2, "-3/4"]], "truncation_order": [3, 1]}, {"terms": [[0, 1, "1"]]}]})");
    EXPECT_EQ(eq.p, 3);
    EXPECT_EQ(*eq.a(0).coefficient(q(1, 2)), q(-3, 4));
    EXPECT_EQ(*eq.a(0).truncation_order(), q(3));
}

TEST(Parser, JsonAndLineAgree)
{
    EXPECT_EQ(load_equation(data_file("golden_direct")),
              parse_equation("z^8*f(z^4) - (z^2+z^3+z^7)*f(z^2) + (1+z)*f(z) = 0 ; p=2"));
}

TEST(Parser, PrintedEquationsParseBack)
{
    std::mt19937_64 rng(51);
    for (int k = 0; k < 100; ++k) {
        const MahlerEquation eq = mahler::testing::random_one_slope_equation(rng);
        EXPECT_EQ(parse_equation(equation_to_string(eq)), eq) << equation_to_string(eq);
        EXPECT_EQ(equation_from_json(equation_to_json(eq)), eq);
    }
}

TEST(Json, VerdictRoundTrip)
{
    std::mt19937_64 rng(52);
    std::vector<MahlerEquation> eqs;
    for (const char *name : {"golden_direct", "golden_inverse", "alpha2_direct", "alpha2_inverse", "slope_quarter",
                             "two_slope_p5_true", "two_slope_p5_false", "fuchsian"}) {
        eqs.push_back(load_equation(data_file(name)));
    }
    for (int k = 0; k < 40; ++k) {
        eqs.push_back(mahler::testing::random_equation(rng));
    }
    for (const auto &eq : eqs) {
        const Verdict v = is_regular_singular(eq);
        const Verdict back = verdict_from_json(json::parse(verdict_to_json(v).dump()));
        EXPECT_TRUE(same_verdict(v, back)) << equation_to_string(eq);
        EXPECT_EQ(verdict_to_json(back), verdict_to_json(v));
    }
}

TEST(Json, NumbersAreExactStrings)
{
    const json j = verdict_to_json(is_regular_singular(load_equation(data_file("slope_quarter"))));
    EXPECT_EQ(j.at("reason").at("slope"), "1/4");
    EXPECT_EQ(j.at("nu"), "3");
    EXPECT_TRUE(j.at("polygon").at("edges").at(2).at("slope").is_string());
}

struct CliRun {
    int status;
    std::string out;
};

CliRun run_cli(const std::string &args)
{
    const auto tmp = std::filesystem::temp_directory_path() / ("mahler_cli_test_" + std::to_string(::getpid()));
    const std::string cmd = std::string(MAHLER_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    std::filesystem::remove(tmp);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

TEST(Cli, DecideExitCodes)
{
    const CliRun a = run_cli("decide " + data_file("golden_direct"));
    EXPECT_EQ(a.status, 0) << a.out;
    EXPECT_NE(a.out.find("AllTruncatedSolutionsFound"), std::string::npos);
    EXPECT_NE(a.out.find("ν = 8"), std::string::npos);
    const CliRun b = run_cli("decide " + data_file("slope_quarter"));
    EXPECT_EQ(b.status, 1) << b.out;
    EXPECT_NE(b.out.find("SlopeDenominator"), std::string::npos);
    EXPECT_NE(b.out.find("1/4"), std::string::npos);
    EXPECT_EQ(run_cli("decide " + data_file("alpha2_inverse")).status, 1);
    EXPECT_EQ(run_cli("decide --parallel " + data_file("golden_inverse")).status, 0);
}

TEST(Cli, InputErrorsExitWithTwo)
{
    EXPECT_EQ(run_cli("decide /nonexistent/equation.json").status, 2);
    const CliRun f = run_cli("decide --expr '0.5*f(z^2) + f(z) = 0 ; p=2'");
    EXPECT_EQ(f.status, 2);
    EXPECT_NE(f.out.find("position"), std::string::npos) << f.out;
    const CliRun t = run_cli("decide --expr 'z^8*f(z^4) - (z^2+z^3+z^7)*f(z^2) + (1+O(z))*f(z) = 0 ; p=2'");
    EXPECT_EQ(t.status, 2);
    EXPECT_NE(t.out.find("a_0"), std::string::npos) << t.out;
    EXPECT_EQ(run_cli("frobnicate x").status, 2);
}

TEST(Cli, JsonOutputRoundTrips)
{
    const CliRun r = run_cli("decide --json " + data_file("golden_direct"));
    ASSERT_EQ(r.status, 0);
    const Verdict v = verdict_from_json(json::parse(r.out));
    EXPECT_TRUE(same_verdict(v, is_regular_singular(load_equation(data_file("golden_direct")))));
}

TEST(Cli, TraceTable)
{
    const CliRun r = run_cli("trace " + data_file("golden_direct"));
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("v = -2  α = -λ + 1  β = λ - 1  h = -1"), std::string::npos) << r.out;
}

TEST(Cli, PolygonExponentsPrefix)
{
    const CliRun poly = run_cli("polygon --json " + data_file("slope_quarter"));
    EXPECT_EQ(poly.status, 0);
    EXPECT_EQ(json::parse(poly.out).at("edges").size(), 3u);
    const CliRun ex = run_cli("exponents " + data_file("slope_quarter"));
    EXPECT_EQ(ex.status, 0);
    EXPECT_NE(ex.out.find("m_2 = 2"), std::string::npos) << ex.out;
    const CliRun pre = run_cli("prefix --order 9 --slope 1 " + data_file("slope_quarter"));
    EXPECT_EQ(pre.status, 0);
    EXPECT_NE(pre.out.find("z^3"), std::string::npos) << pre.out;
}

TEST(Cli, SweepAndOracle)
{
    const CliRun s = run_cli("sweep --p 5,7,11 " + data_file("two_slope_p5_true"));
    EXPECT_EQ(s.status, 0) << s.out;
    EXPECT_NE(s.out.find("all verdicts agree"), std::string::npos);
    EXPECT_EQ(run_cli("sweep --p 5,7 " + data_file("two_slope_p5_false")).status, 1);
    const CliRun o = run_cli("oracle-check " + data_file("alpha2_inverse"));
    EXPECT_EQ(o.status, 1) << o.out;
    EXPECT_EQ(o.out.find("DISAGREE"), std::string::npos);
    EXPECT_EQ(run_cli("oracle-check " + data_file("golden_direct")).status, 0);
}

TEST(Cli, DeterministicAcrossRuns)
{
    const CliRun a = run_cli("decide --json " + data_file("alpha2_inverse"));
    const CliRun b = run_cli("decide --json --parallel " + data_file("alpha2_inverse"));
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.out, b.out);
}

} // namespace
