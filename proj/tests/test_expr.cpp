#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "weyl/expr.hpp"

using namespace weyl;

TEST_CASE("parse basic structure") {
    auto e = parse("x^2 + sin(y)");
    REQUIRE(e->kind == ExprKind::Add);
    REQUIRE(e->lhs->kind == ExprKind::Pow);
    REQUIRE(e->lhs->lhs->symbol == "x");
    REQUIRE(e->rhs->kind == ExprKind::Call);
    REQUIRE(e->rhs->func == Func::Sin);
}

TEST_CASE("syntax error carries byte offset") {
    try {
        parse("2*");
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        REQUIRE(err.offset() == 2);
    }
}

TEST_CASE("parameters parse like symbols") {
    auto e = parse("-(1-2*m/r)");
    REQUIRE(e->kind == ExprKind::Neg);
    std::vector<std::string> syms;
    collect_symbols(e, syms);
    REQUIRE(syms == std::vector<std::string>{"m", "r"});
}

TEST_CASE("precedence: caret binds tighter than unary minus") {
    EvalContext ctx{{"x"}, {}};
    const double x[] = {3.0};
    REQUIRE(eval(parse("-x^2"), ctx, x) == Catch::Approx(-9.0));
    REQUIRE(eval(parse("x^-2"), ctx, x) == Catch::Approx(1.0 / 9.0));
    REQUIRE(eval(parse("2*x^2"), ctx, x) == Catch::Approx(18.0));
    REQUIRE(eval(parse("-x*x"), ctx, x) == Catch::Approx(-9.0));
    REQUIRE(eval(parse("2^3^1"), ctx, x) == Catch::Approx(8.0));
    REQUIRE(eval(parse("pi"), ctx, x) == Catch::Approx(M_PI));
    REQUIRE(eval(parse("1e-2 + 2E3"), ctx, x) == Catch::Approx(2000.01));
}

TEST_CASE("non-smooth and unknown functions rejected at parse") {
    REQUIRE_THROWS_AS(parse("abs(x)"), ParseError);
    REQUIRE_THROWS_AS(parse("floor(x)"), ParseError);
    REQUIRE_THROWS_AS(parse("sign(x)"), ParseError);
    REQUIRE_THROWS_AS(parse("frobnicate(x)"), ParseError);
}

TEST_CASE("unknown identifier surfaces at evaluation") {
    EvalContext ctx{{"x"}, {{"m", 1.0}}};
    const double x[] = {2.0};
    REQUIRE_THROWS_AS(eval(parse("x + q"), ctx, x), SpecError);
    REQUIRE(eval(parse("x + m"), ctx, x) == Catch::Approx(3.0));
}

TEST_CASE("domain error names the offending subexpression") {
    EvalContext ctx{{"x"}, {}};
    const double x[] = {-2.0};
    std::string text = "1 + log(x)";
    try {
        eval_jet(parse(text), ctx, x, 2, text);
        FAIL("expected DomainError");
    } catch (const DomainError& err) {
        REQUIRE(err.subexpr() == "log(x)");
    }
}

TEST_CASE("parse-print round trip is structurally equal") {
    std::vector<std::string> cases = {
        "x^2 + sin(y)", "-(1-2*m/r)", "sqrt(x)/(1+y^2) - tanh(x*y)",
        "exp(-(x^2+y^2))*cos(3*x)", "1/(r^2*sin(t)^2)",
    };
    for (const auto& s : cases) {
        auto a = parse(s);
        auto b = parse(to_string(a));
        INFO(s << "  ->  " << to_string(a));
        REQUIRE(equal(a, b));
    }
}

TEST_CASE("eval_jet matches finite differences on expressions") {
    EvalContext ctx{{"x", "y"}, {{"m", 0.4}}};
    auto ast = parse("exp(x*y) + m*sqrt(x+2) - cos(y)/x");
    const double pt[] = {0.9, -0.6};
    auto fn = [&](std::span<const double> q) { return eval(ast, ctx, q); };
    Jet j = eval_jet(ast, ctx, pt, 4);
    const auto& tab = MultiIndexTable::get(2);
    for (int p = 0; p < Jet::simplex_size(2, 4); ++p) {
        auto e = tab.exponents(p);
        int alpha[2] = {e[0], e[1]};
        const double want = oracles::fd_partial(fn, pt, alpha);
        REQUIRE(oracles::rel_err(j.partial(std::span<const int>(alpha, 2)), want, 1e-6) < 1e-5);
    }
}

TEST_CASE("schwarzschild g_rr reciprocal jets match finite differences") {
    EvalContext ctx{{"r"}, {{"m", 1.0}}};
    auto grr = parse("1/(1-2*m/r)");
    const double pt[] = {5.0};
    Jet inv = 1.0 / eval_jet(grr, ctx, pt, 4);
    auto fn = [&](std::span<const double> q) { return 1.0 / eval(grr, ctx, q); };
    for (int k = 1; k <= 4; ++k) {
        std::vector<int> alpha = {k};
        const double want = oracles::fd_partial(fn, pt, alpha);
        REQUIRE(oracles::rel_err(inv.partial(alpha), want, 1e-8) < 1e-5);
    }
}
