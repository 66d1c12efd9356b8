#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "saddle/expr.hpp"

using namespace saddle;

TEST_CASE("arithmetic with the usual precedence and parentheses") {
    CHECK(Expression::parse("x - y").eval(0.75, 0.25) == 0.5);
    CHECK(Expression::parse("1 + 2 * 3").eval(0, 0) == 7.0);
    CHECK(Expression::parse("(1 + 2) * 3").eval(0, 0) == 9.0);
    CHECK(Expression::parse("2 * x + 3 * y").eval(2.0, 1.0) == 7.0);
    CHECK(Expression::parse("x / y").eval(1.0, 4.0) == 0.25);
    CHECK(Expression::parse("-x").eval(3.0, 0.0) == -3.0);
    CHECK(Expression::parse("--x").eval(3.0, 0.0) == 3.0);
    CHECK(Expression::parse("2 - 3 - 4").eval(0, 0) == -5.0); // left associative
    CHECK(Expression::parse("1e2 + 0.5").eval(0, 0) == 100.5);
}

TEST_CASE("bounded helpers are always available") {
    CHECK(Expression::parse("min(x, y)").eval(2.0, 3.0) == 2.0);
    CHECK(Expression::parse("max(x, y)").eval(2.0, 3.0) == 3.0);
    CHECK(Expression::parse("abs(x - y)").eval(1.0, 4.0) == 3.0);
    CHECK(Expression::parse("min(x, max(y, 0.5))").eval(2.0, 0.25) == 0.5);
}

TEST_CASE("transcendental functions require the float profile") {
    for (const std::string fn : {"sqrt(x)", "exp(x)", "log(x)", "sin(x)", "cos(x)",
                                 "pow(x, y)"}) {
        CHECK_THROWS_AS(Expression::parse(fn, false), input_error);
        CHECK_NOTHROW(Expression::parse(fn, true));
    }
    CHECK_THROWS_WITH(Expression::parse("exp(x)", false),
                      Catch::Matchers::ContainsSubstring("float profile"));
    const Expression e = Expression::parse("exp(x) + sin(y)", true);
    CHECK(e.eval(0.0, 0.0) == 1.0);
    CHECK(e.float_profile());
    CHECK(Expression::parse("pow(x, 2) - pow(y, 2)", true).eval(3.0, 2.0) == 5.0);
}

TEST_CASE("parse errors carry positions and names") {
    CHECK_THROWS_AS(Expression::parse("x +"), input_error);
    CHECK_THROWS_AS(Expression::parse("(x"), input_error);
    CHECK_THROWS_AS(Expression::parse("x y"), input_error);
    CHECK_THROWS_AS(Expression::parse(""), input_error);
    CHECK_THROWS_AS(Expression::parse("z + 1"), input_error);
    CHECK_THROWS_WITH(Expression::parse("z + 1"),
                      Catch::Matchers::ContainsSubstring("unknown identifier"));
    CHECK_THROWS_AS(Expression::parse("min(x)"), input_error);
    CHECK_THROWS_AS(Expression::parse("abs(x, y)"), input_error);
    CHECK_THROWS_AS(Expression::parse("1e999"), input_error);
}

TEST_CASE("deep nesting is bounded") {
    std::string deep;
    for (int i = 0; i < 300; ++i) deep += "(";
    deep += "x";
    for (int i = 0; i < 300; ++i) deep += ")";
    CHECK_THROWS_AS(Expression::parse(deep), input_error);
}

TEST_CASE("the original text round-trips") {
    const Expression e = Expression::parse("x - y");
    CHECK(e.text() == "x - y");
    CHECK_FALSE(e.float_profile());
}
