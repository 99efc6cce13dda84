#ifndef MAHLER_IO_HPP
#define MAHLER_IO_HPP

#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include <mahler/decision.hpp>
#include <mahler/equation.hpp>
#include <mahler/oracle.hpp>

namespace mahler
{

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// One-line syntax, e.g. "z^8*f(z^4) - (z^2+z^3+z^7)*f(z^2) + (1+z)*f(z) = 0 ; p=2"

namespace detail
{
class LineParser
{
public:
    LineParser(std::string_view text, long p) : s_(text), p_(p)
    {
    }

    // key -1: terms without f; key i: coefficient of f(z^{p^i}).
    using Lin = std::map<int, Series>;

    Lin parse_equation()
    {
        Lin lhs = expr();
        skip();
        if (!eat('=')) {
            fail("expected '='");
        }
        Lin rhs = expr();
        skip();
        if (i_ != s_.size()) {
            fail("unexpected trailing input");
        }
        for (auto &[k, v] : rhs) {
            lhs[k] -= v;
        }
        return lhs;
    }

private:
    [[noreturn]] void fail(const std::string &msg) const
    {
        throw ParseError(msg, i_);
    }

    void skip()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            ++i_;
        }
    }

    bool eat(char c)
    {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    char peek()
    {
        skip();
        return i_ < s_.size() ? s_[i_] : '\0';
    }

    Integer integer()
    {
        skip();
        const std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
            ++i_;
        }
        if (start == i_) {
            fail("expected a number");
        }
        if (i_ < s_.size() && (s_[i_] == '.' || s_[i_] == 'e' || s_[i_] == 'E')) {
            fail("floating-point literals are not accepted; write fractions as n/d");
        }
        return Integer(std::string(s_.substr(start, i_ - start)));
    }

    // integer, -integer, or (±n/d)
    Rational exponent()
    {
        if (eat('(')) {
            bool neg = eat('-');
            Rational r(integer());
            if (eat('/')) {
                Integer den = integer();
                if (den == 0) {
                    fail("zero denominator in exponent");
                }
                r = make_rational(r.get_num(), den);
            }
            if (!eat(')')) {
                fail("expected ')' after exponent");
            }
            return neg ? Rational(-r) : r;
        }
        bool neg = eat('-');
        Rational r(integer());
        return neg ? Rational(-r) : r;
    }

    static Lin constant(const Series &s)
    {
        return Lin{{-1, s}};
    }

    Lin expr()
    {
        Lin acc;
        bool first = true;
        for (;;) {
            bool neg = false;
            if (eat('-')) {
                neg = true;
            } else if (!eat('+') && !first) {
                return acc;
            }
            Lin t = term();
            for (auto &[k, v] : t) {
                if (neg) {
                    acc[k] -= v;
                } else {
                    acc[k] += v;
                }
            }
            first = false;
        }
    }

    Lin term()
    {
        Lin acc = factor();
        for (;;) {
            if (eat('*')) {
                acc = multiply(acc, factor());
            } else if (peek() == '/') {
                ++i_;
                Integer den = integer();
                if (den == 0) {
                    fail("division by zero");
                }
                for (auto &[k, v] : acc) {
                    v = v.scaled(make_rational(Integer(1), den));
                }
            } else {
                return acc;
            }
        }
    }

    Lin multiply(const Lin &a, const Lin &b)
    {
        Lin out;
        for (const auto &[ka, va] : a) {
            for (const auto &[kb, vb] : b) {
                if (ka >= 0 && kb >= 0) {
                    fail("product of two unknown-function factors; the equation must be linear");
                }
                out[std::max(ka, kb)] += va * vb;
            }
        }
        return out;
    }

    Lin factor()
    {
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Series s;
            s.add_term(0, Rational(integer()));
            return constant(s);
        }
        if (c == '(') {
            ++i_;
            Lin inner = expr();
            if (!eat(')')) {
                fail("expected ')'");
            }
            if (eat('^')) {
                Integer e = integer();
                Lin out = constant(Series::monomial(Rational(1), 0));
                for (Integer k = 0; k < e; ++k) {
                    out = multiply(out, inner);
                }
                return out;
            }
            return inner;
        }
        if (c == 'z') {
            ++i_;
            Rational e = 1;
            if (eat('^')) {
                e = exponent();
            }
            return constant(Series::monomial(Rational(1), e));
        }
        if (c == 'O') {
            ++i_;
            if (!eat('(') || !eat('z')) {
                fail("expected O(z^e)");
            }
            Rational e = 1;
            if (eat('^')) {
                e = exponent();
            }
            if (!eat(')')) {
                fail("expected ')' after O(z^e)");
            }
            return constant(Series(e));
        }
        if (c == 'f') {
            ++i_;
            if (!eat('(') || !eat('z')) {
                fail("expected f(z) or f(z^k)");
            }
            Integer k = 1;
            if (eat('^')) {
                const std::size_t at = i_;
                k = integer();
                if (k < 1) {
                    i_ = at;
                    fail("f(z^k) needs k >= 1");
                }
            }
            if (!eat(')')) {
                fail("expected ')' after f(z^k)");
            }
            int idx = 0;
            Integer pk = 1;
            while (pk < k) {
                pk *= p_;
                ++idx;
            }
            if (pk != k) {
                fail("f(z^" + k.get_str() + ") is not of the form f(z^{p^i}) with p = " + std::to_string(p_));
            }
            return Lin{{idx, Series::monomial(Rational(1), 0)}};
        }
        if (c == '\0') {
            fail("unexpected end of input");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view s_;
    std::size_t i_ = 0;
    long p_;
};
} // namespace detail

inline MahlerEquation parse_equation_line(std::string_view text, std::optional<long> default_p = std::nullopt)
{
    std::string_view body = text;
    std::optional<long> p = default_p;
    const std::size_t semi = text.find(';');
    if (semi != std::string_view::npos) {
        body = text.substr(0, semi);
        std::string tail(text.substr(semi + 1));
        std::size_t k = 0;
        auto ws = [&] {
            while (k < tail.size() && std::isspace(static_cast<unsigned char>(tail[k]))) {
                ++k;
            }
        };
        ws();
        if (k >= tail.size() || tail[k] != 'p') {
            throw ParseError("expected 'p=<integer>' after ';'", semi + 1 + k);
        }
        ++k;
        ws();
        if (k >= tail.size() || tail[k] != '=') {
            throw ParseError("expected '=' after p", semi + 1 + k);
        }
        ++k;
        ws();
        const std::size_t start = k;
        while (k < tail.size() && std::isdigit(static_cast<unsigned char>(tail[k]))) {
            ++k;
        }
        if (k == start) {
            throw ParseError("expected an integer value for p", semi + 1 + k);
        }
        const long given = std::stol(tail.substr(start, k - start));
        ws();
        if (k != tail.size()) {
            throw ParseError("unexpected input after p", semi + 1 + k);
        }
        if (default_p && *default_p != given) {
            throw InvalidEquation("inconsistent p: the equation says p=" + std::to_string(given) + " but " +
                                  std::to_string(*default_p) + " was requested");
        }
        p = given;
    }
    if (!p) {
        throw ParseError("missing '; p=<integer>'", text.size());
    }
    if (*p < 2) {
        throw InvalidEquation("p must be at least 2");
    }
    auto lin = detail::LineParser(body, *p).parse_equation();
    if (auto it = lin.find(-1); it != lin.end() && !(it->second.empty() && !it->second.is_truncated())) {
        throw InvalidEquation("the equation has a term without f; only homogeneous equations are supported");
    }
    lin.erase(-1);
    MahlerEquation eq;
    eq.p = *p;
    int m = lin.empty() ? 0 : lin.rbegin()->first;
    eq.coefficients.resize(static_cast<std::size_t>(m) + 1);
    for (auto &[k, v] : lin) {
        eq.coefficients[static_cast<std::size_t>(k)] = v;
    }
    eq.validate();
    return eq;
}

// ---------------------------------------------------------------------------
// JSON equation documents

inline Series series_from_json(const json &j, std::size_t index)
{
    const std::string where = "coefficient a_" + std::to_string(index);
    if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array()) {
        throw InvalidEquation(where + ": expected an object with a \"terms\" array");
    }
    std::optional<Rational> trunc;
    if (j.contains("truncation_order") && !j.at("truncation_order").is_null()) {
        const json &t = j.at("truncation_order");
        if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
            t[1].get<long>() <= 0) {
            throw InvalidEquation(where + ": truncation_order must be [numerator, positive denominator]");
        }
        trunc = make_rational(t[0].get<long>(), t[1].get<long>());
    }
    Series s(trunc);
    for (const auto &term : j.at("terms")) {
        if (!term.is_array() || term.size() != 3 || !term[0].is_number_integer() || !term[1].is_number_integer() ||
            !term[2].is_string()) {
            throw InvalidEquation(where + ": each term must be [exponent_numerator, exponent_denominator, \"coefficient\"]");
        }
        if (term[1].get<long>() <= 0) {
            throw InvalidEquation(where + ": exponent denominator must be positive");
        }
        const Rational e = make_rational(term[0].get<long>(), term[1].get<long>());
        if (trunc && e >= *trunc) {
            throw InvalidEquation(where + ": term z^" + e.get_str() + " lies at or beyond the truncation order");
        }
        s.add_term(e, parse_rational(term[2].get<std::string>()));
    }
    return s;
}

inline json series_to_json(const Series &s)
{
    json terms = json::array();
    for (const auto &[e, c] : s.terms()) {
        terms.push_back(json::array({to_long(e.get_num()), to_long(e.get_den()), c.get_str()}));
    }
    json out{{"terms", terms}};
    if (s.truncation_order()) {
        out["truncation_order"] =
            json::array({to_long(s.truncation_order()->get_num()), to_long(s.truncation_order()->get_den())});
    }
    return out;
}

inline MahlerEquation equation_from_json(const json &j)
{
    if (!j.is_object()) {
        throw InvalidEquation("equation document must be a JSON object");
    }
    if (!j.contains("p") || !j.at("p").is_number_integer()) {
        throw InvalidEquation("equation document needs an integer \"p\"");
    }
    if (!j.contains("coefficients") || !j.at("coefficients").is_array()) {
        throw InvalidEquation("equation document needs a \"coefficients\" array (a_0 first)");
    }
    MahlerEquation eq;
    eq.p = j.at("p").get<long>();
    std::size_t i = 0;
    for (const auto &c : j.at("coefficients")) {
        eq.coefficients.push_back(series_from_json(c, i++));
    }
    if (j.contains("name") && j.at("name").is_string()) {
        eq.name = j.at("name").get<std::string>();
    }
    eq.validate();
    return eq;
}

inline json equation_to_json(const MahlerEquation &eq)
{
    json coeffs = json::array();
    for (const auto &a : eq.coefficients) {
        coeffs.push_back(series_to_json(a));
    }
    json out{{"p", eq.p}, {"coefficients", coeffs}};
    if (!eq.name.empty()) {
        out["name"] = eq.name;
    }
    return out;
}

// Accepts either a JSON document or the one-line syntax.
inline MahlerEquation parse_equation(std::string_view text, std::optional<long> default_p = std::nullopt)
{
    std::size_t k = 0;
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) {
        ++k;
    }
    if (k < text.size() && text[k] == '{') {
        json j;
        try {
            j = json::parse(text.begin(), text.end());
        } catch (const json::parse_error &e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
        }
        if (j.contains("p") && j.at("p").is_number_integer() && default_p && j.at("p").get<long>() != *default_p) {
            throw InvalidEquation("inconsistent p: the document says p=" + std::to_string(j.at("p").get<long>()));
        }
        if (!j.contains("p") && default_p) {
            j["p"] = *default_p;
        }
        for (auto &c : j.value("coefficients", json::array())) {
            for (auto &t : c.value("terms", json::array())) {
                if (t.is_array() && t.size() == 3 && t[2].is_number()) {
                    throw ParseError("coefficients must be exact strings such as \"-3/4\", not JSON numbers", 0);
                }
            }
        }
        return equation_from_json(j);
    }
    // Drop '#' comment lines so equation files can be annotated.
    std::string cleaned;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first != std::string::npos && line[first] == '#') {
            cleaned += std::string(line.size(), ' ');
        } else {
            cleaned += line;
        }
        cleaned += ' ';
    }
    return parse_equation_line(cleaned, default_p);
}

inline MahlerEquation load_equation(const std::string &path, std::optional<long> default_p = std::nullopt)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_equation(text, default_p);
}

// Human-readable form in the one-line syntax.
inline std::string equation_to_string(const MahlerEquation &eq)
{
    std::string out;
    for (int i = eq.order(); i >= 0; --i) {
        const Series &a = eq.a(i);
        if (a.empty() && !a.is_truncated()) {
            continue;
        }
        if (!out.empty()) {
            out += " + ";
        }
        Integer k = power_of(eq.p, i);
        out += "(" + a.to_string() + ")*f(z" + (k == 1 ? std::string() : "^" + k.get_str()) + ")";
    }
    return out + " = 0 ; p=" + std::to_string(eq.p);
}

// ---------------------------------------------------------------------------
// Verdict serialization. Every number is an exact string.

inline json poly_to_json(const Poly &p)
{
    json out = json::array();
    for (const auto &c : p.coefficients()) {
        out.push_back(c.get_str());
    }
    return out;
}

inline Poly poly_from_json(const json &j)
{
    std::vector<Rational> c;
    for (const auto &x : j) {
        c.push_back(parse_rational(x.get<std::string>()));
    }
    return Poly(std::move(c));
}

inline json local_to_json(const LocalElem &e)
{
    json coeffs = json::array();
    for (const auto &a : e.coefficients()) {
        coeffs.push_back(poly_to_json(a.rep()));
    }
    return json{{"modulus", e.modulus_order()}, {"coefficients", coeffs}, {"text", e.to_string()}};
}

inline LocalElem local_from_json(const json &j, const Modulus &mod)
{
    std::vector<AlgElem> c;
    for (const auto &x : j.at("coefficients")) {
        c.emplace_back(mod, poly_from_json(x));
    }
    if (static_cast<int>(c.size()) != j.at("modulus").get<int>()) {
        throw std::invalid_argument("local element with inconsistent modulus");
    }
    return LocalElem(mod, std::move(c));
}

inline json local_series_to_json(const LocalSeries &f)
{
    json terms = json::array();
    for (const auto &[e, c] : f.terms()) {
        terms.push_back(json{{"exponent", e.get_str()}, {"coefficient", local_to_json(c)}});
    }
    return json{{"terms", terms}, {"text", f.to_string()}};
}

inline LocalSeries local_series_from_json(const json &j, const Modulus &mod)
{
    LocalSeries f;
    for (const auto &t : j.at("terms")) {
        f.add_term(parse_rational(t.at("exponent").get<std::string>()), local_from_json(t.at("coefficient"), mod));
    }
    return f;
}

inline json class_to_json(const ExponentClass &c)
{
    json offsets = json::array();
    for (std::size_t j = 1; j <= c.slope_count(); ++j) {
        offsets.push_back(c.offset(j));
    }
    return json{{"defining", poly_to_json(c.defining())},
                {"defining_text", c.defining().to_string("λ")},
                {"multiplicities", c.multiplicities()},
                {"offsets", offsets}};
}

inline ExponentClass class_from_json(const json &j)
{
    return ExponentClass(poly_from_json(j.at("defining")), j.at("multiplicities").get<std::vector<int>>());
}

inline json polygon_to_json(const NewtonPolygon &np)
{
    json edges = json::array();
    for (const auto &e : np.edges) {
        edges.push_back(json{{"slope", e.slope.get_str()},
                             {"multiplicity", e.multiplicity()},
                             {"left", e.left},
                             {"right", e.right},
                             {"indices", e.indices},
                             {"charpoly", poly_to_json(e.charpoly)},
                             {"charpoly_text", e.charpoly.to_string("λ")},
                             {"theta", e.theta.get_str()}});
    }
    return json{{"d", np.d.get_str()}, {"edges", edges}};
}

inline NewtonPolygon polygon_from_json(const json &j)
{
    NewtonPolygon np;
    np.d = Integer(j.at("d").get<std::string>());
    for (const auto &x : j.at("edges")) {
        Edge e;
        e.slope = parse_rational(x.at("slope").get<std::string>());
        e.left = x.at("left").get<int>();
        e.right = x.at("right").get<int>();
        e.indices = x.at("indices").get<std::vector<int>>();
        e.charpoly = poly_from_json(x.at("charpoly"));
        e.theta = parse_rational(x.at("theta").get<std::string>());
        np.edges.push_back(std::move(e));
    }
    return np;
}

inline json trace_to_json(const SolverTrace &t)
{
    json steps = json::array();
    for (const auto &s : t.steps) {
        steps.push_back(json{{"v", s.v.get_str()},
                             {"alpha", local_to_json(s.alpha)},
                             {"beta", local_to_json(s.beta)},
                             {"h", local_to_json(s.h)}});
    }
    return json{{"defining", poly_to_json(t.defining)},
                {"slope", t.slope},
                {"modulus", t.modulus},
                {"outcome", to_string(t.outcome)},
                {"last_v", t.last_v ? json(t.last_v->get_str()) : json(nullptr)},
                {"steps", steps},
                {"f", local_series_to_json(t.f)}};
}

inline SolverTrace trace_from_json(const json &j)
{
    SolverTrace t;
    t.defining = poly_from_json(j.at("defining"));
    const Modulus mod = make_modulus(t.defining);
    t.slope = j.at("slope").get<std::size_t>();
    t.modulus = j.at("modulus").get<int>();
    const std::string o = j.at("outcome").get<std::string>();
    t.outcome = o == "Found" ? Outcome::Found : o == "FailedGrid" ? Outcome::FailedGrid : Outcome::FailedDivision;
    if (!j.at("last_v").is_null()) {
        t.last_v = parse_rational(j.at("last_v").get<std::string>());
    }
    for (const auto &s : j.at("steps")) {
        t.steps.push_back({parse_rational(s.at("v").get<std::string>()), local_from_json(s.at("alpha"), mod),
                           local_from_json(s.at("beta"), mod), local_from_json(s.at("h"), mod)});
    }
    t.f = local_series_from_json(j.at("f"), mod);
    return t;
}

inline json verdict_to_json(const Verdict &v)
{
    json reason{{"kind", to_string(v.reason)}};
    if (v.failing_slope) {
        reason["slope_index"] = *v.failing_slope;
        reason["slope"] = v.polygon.edge(*v.failing_slope).slope.get_str();
    }
    if (v.failing_pair) {
        const PairResult &pr = v.pairs[*v.failing_pair];
        reason["pair"] = *v.failing_pair;
        reason["slope_index"] = pr.slope;
        reason["class"] = pr.cls.defining().to_string("λ");
        reason["outcome"] = to_string(pr.representative().outcome);
        if (pr.representative().last_v) {
            reason["v"] = pr.representative().last_v->get_str();
        }
    }
    if (v.two_slope_result) {
        reason["result"] = *v.two_slope_result;
    }
    json classes = json::array();
    for (const auto &c : v.classes) {
        classes.push_back(class_to_json(c));
    }
    json pairs = json::array();
    for (const auto &pr : v.pairs) {
        json branches = json::array();
        for (const auto &b : pr.branches) {
            branches.push_back(trace_to_json(b));
        }
        pairs.push_back(
            json{{"slope", pr.slope}, {"class", class_to_json(pr.cls)}, {"found", pr.found()}, {"branches", branches}});
    }
    return json{{"regular_singular", v.regular_singular},
                {"reason", reason},
                {"p", v.p},
                {"nu", v.nu.get_str()},
                {"p_exceeds_nu", v.p_exceeds_nu},
                {"normalization", {{"delta", v.normalization.delta.get_str()}, {"shift", v.normalization.shift.get_str()}}},
                {"polygon", polygon_to_json(v.polygon)},
                {"classes", classes},
                {"pairs", pairs}};
}

inline ReasonKind reason_from_string(const std::string &s)
{
    for (ReasonKind r : {ReasonKind::SlopeDenominator, ReasonKind::TruncatedSolutionMissing,
                         ReasonKind::AllTruncatedSolutionsFound, ReasonKind::OneSlopeShortcut,
                         ReasonKind::TwoSlopeCriterion}) {
        if (s == to_string(r)) {
            return r;
        }
    }
    throw std::invalid_argument("unknown reason kind " + s);
}

inline Verdict verdict_from_json(const json &j)
{
    Verdict v;
    v.regular_singular = j.at("regular_singular").get<bool>();
    const json &reason = j.at("reason");
    v.reason = reason_from_string(reason.at("kind").get<std::string>());
    if (v.reason == ReasonKind::SlopeDenominator) {
        v.failing_slope = reason.at("slope_index").get<std::size_t>();
    }
    if (reason.contains("pair")) {
        v.failing_pair = reason.at("pair").get<std::size_t>();
    }
    if (reason.contains("result")) {
        v.two_slope_result = reason.at("result").get<bool>();
    }
    v.p = j.at("p").get<long>();
    v.nu = parse_rational(j.at("nu").get<std::string>());
    v.p_exceeds_nu = j.at("p_exceeds_nu").get<bool>();
    v.normalization.delta = Integer(j.at("normalization").at("delta").get<std::string>());
    v.normalization.shift = parse_rational(j.at("normalization").at("shift").get<std::string>());
    v.polygon = polygon_from_json(j.at("polygon"));
    for (const auto &c : j.at("classes")) {
        v.classes.push_back(class_from_json(c));
    }
    for (const auto &pj : j.at("pairs")) {
        PairResult pr;
        pr.slope = pj.at("slope").get<std::size_t>();
        pr.cls = class_from_json(pj.at("class"));
        for (const auto &b : pj.at("branches")) {
            pr.branches.push_back(trace_from_json(b));
        }
        v.pairs.push_back(std::move(pr));
    }
    return v;
}

// Structural comparison used by round-trip checks.
inline bool same_verdict(const Verdict &a, const Verdict &b)
{
    if (a.regular_singular != b.regular_singular || a.reason != b.reason || a.failing_slope != b.failing_slope ||
        a.failing_pair != b.failing_pair || a.two_slope_result != b.two_slope_result || a.p != b.p ||
        a.nu != b.nu || a.p_exceeds_nu != b.p_exceeds_nu || !(a.normalization == b.normalization) ||
        !(a.polygon == b.polygon) || a.classes != b.classes || a.pairs.size() != b.pairs.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.pairs.size(); ++k) {
        const auto &x = a.pairs[k];
        const auto &y = b.pairs[k];
        if (x.slope != y.slope || x.cls != y.cls || x.branches.size() != y.branches.size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.branches.size(); ++i) {
            const auto &s = x.branches[i];
            const auto &t = y.branches[i];
            if (s.defining != t.defining || s.slope != t.slope || s.modulus != t.modulus || s.outcome != t.outcome ||
                s.last_v != t.last_v || s.f != t.f || s.steps.size() != t.steps.size()) {
                return false;
            }
            for (std::size_t k2 = 0; k2 < s.steps.size(); ++k2) {
                const auto &u = s.steps[k2];
                const auto &w = t.steps[k2];
                if (u.v != w.v || u.alpha != w.alpha || u.beta != w.beta || u.h != w.h) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace mahler

#endif
