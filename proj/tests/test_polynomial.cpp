#include "sdclf/polynomial.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace sdclf;

TEST_CASE("construction and invariants") {
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);

    Polynomial p = x1 * x1 + x2 * x2;
    CHECK(p.term_count() == 2);
    CHECK(p.dim() == 2);
    CHECK(p.degree() == 2);

    SUBCASE("cancellation removes the stored term") {
        Polynomial q = p - x1 * x1;
        CHECK(q.term_count() == 1);
        CHECK(q == x2 * x2);
    }
    SUBCASE("zero detection is structural") {
        Polynomial tiny = Polynomial::constant(2, 1e-13);
        CHECK(tiny.is_zero());
        CHECK_FALSE(Polynomial::constant(2, 1e-9).is_zero());
        CHECK(Polynomial(2).is_zero());
    }
    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS_AS(p + Polynomial::variable(3, 0), DimensionMismatch);
        CHECK_THROWS_AS(p.eval(Vec{1.0}), DimensionMismatch);
    }
    SUBCASE("bad constructions throw") {
        CHECK_THROWS(Polynomial::variable(2, 5));
        CHECK_THROWS(Polynomial::monomial(2, {1, -1}, 1.0));
        CHECK_THROWS(Polynomial(0));
    }
}

TEST_CASE("evaluation and derivatives") {
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);
    Polynomial p = 3.0 * x1 * x1 * x2 - 2.0 * x2;

    CHECK(p.eval(Vec{2.0, 1.0}) == doctest::Approx(10.0));
    CHECK(p.derivative(0) == 6.0 * x1 * x2);
    CHECK(p.derivative(1) == 3.0 * x1 * x1 - Polynomial::constant(2, 2.0));
    CHECK(p.derivative(0).derivative(1) == 6.0 * x1);
}

TEST_CASE("canonical printing uses graded-lex order") {
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);
    Polynomial p = x2 + x1 * x1 * x2 * (-2.0) + x1;
    CHECK(p.str() == "-2*x1^2*x2 + x1 + x2");
    CHECK(Polynomial(2).str() == "0");
    CHECK((x1 * x2).str() == "x1*x2");
}

TEST_CASE("arithmetic respects evaluation (randomized)") {
    testsup::Rng rng(42);
    for (int rep = 0; rep < 50; ++rep) {
        Polynomial a = rng.poly(3, 3);
        Polynomial b = rng.poly(3, 3);
        Vec x = rng.point(3);
        CHECK((a + b).eval(x) == doctest::Approx(a.eval(x) + b.eval(x)).epsilon(1e-12));
        CHECK((a * b).eval(x) == doctest::Approx(a.eval(x) * b.eval(x)).epsilon(1e-12));
        // Leibniz rule, exact on integer coefficients
        CHECK((a * b).derivative(0) == a.derivative(0) * b + a * b.derivative(0));
    }
}

TEST_CASE("embedding into a larger variable space") {
    auto x = Polynomial::variable(1, 0);
    Polynomial w = x * x;
    Polynomial lifted = w.embed(3);
    CHECK(lifted.dim() == 3);
    CHECK(lifted.eval(Vec{2.0, 9.0, -1.0}) == doctest::Approx(4.0));
    CHECK_THROWS_AS(w.embed(1, 1), DimensionMismatch);
}
