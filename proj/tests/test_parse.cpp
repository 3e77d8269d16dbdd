#include "sdclf/parse.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace sdclf;

TEST_CASE("parsing a full system definition") {
    ParsedSystem p = parse_system_spec("dim=2; f=[-x1*x2^2, 0]; g=[0,1]; V=x1^2+x2^2");
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);
    CHECK(p.system.dim() == 2);
    CHECK(p.system.f().component(0) == -1.0 * x1 * x2 * x2);
    CHECK(p.system.f().component(1).is_zero());
    CHECK(p.system.g().component(1) == Polynomial::constant(2, 1.0));
    CHECK(p.system.V() == x1 * x1 + x2 * x2);
    CHECK_FALSE(p.theta.has_value());
}

TEST_CASE("whitespace and newlines are insignificant") {
    ParsedSystem p = parse_system_spec("dim = 2\n"
                                       "f = [ -x1 * x2 ^ 2 ,\n 0 ]\n"
                                       "g = [0, 1]\n"
                                       "V = x1^2 + x2^2\n"
                                       "theta = 2*x1^2*x2^2\n");
    REQUIRE(p.theta.has_value());
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);
    CHECK(*p.theta == 2.0 * x1 * x1 * x2 * x2);
}

TEST_CASE("expression grammar") {
    auto poly = [](const std::string& e) {
        return parse_system_spec("dim=2; f=[0,0]; g=[0,1]; V=" + e).system.V();
    };
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);

    CHECK(poly("x1^2 - 2*x1*x2 + x2^2") == x1 * x1 - 2.0 * x1 * x2 + x2 * x2);
    CHECK(poly("(x1 + x2)^2") == x1 * x1 + 2.0 * x1 * x2 + x2 * x2);
    // unary minus binds looser than the power
    CHECK(poly("-x1^2 + x1^2 + x2^2") == x2 * x2);
    CHECK(poly("1.5e-1 * x1^2 + x2^2") == 0.15 * x1 * x1 + x2 * x2);
    CHECK(poly("x2^2 + - - x1^2") == x2 * x2 + x1 * x1);
}

TEST_CASE("positioned errors") {
    SUBCASE("arity mismatch") {
        try {
            parse_system_spec("dim=2; f=[-x1*x2^2]; g=[0,1]; V=x1^2+x2^2");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("f has 1 component(s), dim=2") != std::string::npos);
        }
    }
    SUBCASE("unknown identifier with position") {
        try {
            parse_system_spec("dim=2; f=[0,0]; g=[0,1];\nV = x1^2 + z");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
            CHECK(e.col == 12);
            CHECK(std::string(e.what()).find("unknown identifier 'z'") != std::string::npos);
        }
    }
    SUBCASE("variable out of range") {
        CHECK_THROWS_AS(parse_system_spec("dim=1; f=[0]; g=[1]; V=x2^2"), ParseError);
    }
    SUBCASE("missing pieces") {
        CHECK_THROWS_AS(parse_system_spec("dim=2; f=[0,0]; g=[0,1]"), ParseError);
        CHECK_THROWS_AS(parse_system_spec("f=[0,0]"), ParseError);
    }
    SUBCASE("fractional exponent") {
        CHECK_THROWS_AS(parse_system_spec("dim=1; f=[0]; g=[1]; V=x1^1.5"), ParseError);
    }
    SUBCASE("system contract violations surface from construction") {
        // f(0) != 0
        CHECK_THROWS_AS(parse_system_spec("dim=1; f=[1]; g=[1]; V=x1^2"), std::invalid_argument);
        // V with a linear term
        CHECK_THROWS_AS(parse_system_spec("dim=1; f=[x1]; g=[1]; V=x1"), std::invalid_argument);
    }
}

TEST_CASE("print-parse round trip is the identity on canonical forms") {
    testsup::Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        Polynomial v = rng.poly(2, 4, /*drop_constant=*/true) * rng.poly(2, 2, true);
        if (v.is_zero()) continue;
        std::string text = "dim=2; f=[0,0]; g=[0,1]; V=" + v.str();
        Polynomial back = parse_system_spec(text).system.V();
        CHECK(back == v);
    }
}
