#include "sdclf/vector_field.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace sdclf;

namespace {

VectorField case3_f() {
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);
    return VectorField({-1.0 * x1 * x2 * x2, Polynomial(2)});
}

VectorField unit_g() {
    return VectorField({Polynomial(2), Polynomial::constant(2, 1.0)});
}

Polynomial sum_of_squares() {
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);
    return x1 * x1 + x2 * x2;
}

}  // namespace

TEST_CASE("field evaluation") {
    CHECK(case3_f().eval(Vec{2.0, 1.0}) == Vec{-2.0, 0.0});
    CHECK(unit_g().eval(Vec{7.0, -3.0}) == Vec{0.0, 1.0});

    // linear field A x, A = [[0,1],[0,0]]
    auto x2 = Polynomial::variable(2, 1);
    VectorField ax({x2, Polynomial(2)});
    CHECK(ax.eval(Vec{3.0, 4.0}) == Vec{4.0, 0.0});

    CHECK_THROWS_AS(ax.eval(Vec{1.0}), DimensionMismatch);
}

TEST_CASE("scalar Lie derivative") {
    Polynomial V = sum_of_squares();
    auto x2 = Polynomial::variable(2, 1);

    CHECK(lie_derivative(unit_g(), V) == 2.0 * x2);
    CHECK(lie_derivative(unit_g(), V).eval(Vec{1.0, 2.0}) == doctest::Approx(4.0));

    auto x1 = Polynomial::variable(2, 0);
    Polynomial fV = lie_derivative(case3_f(), V);
    CHECK(fV == -2.0 * x1 * x1 * x2 * x2);
    CHECK(fV.eval(Vec{1.0, 1.0}) == doctest::Approx(-2.0));
    CHECK(fV.eval(Vec{5.0, 0.0}) == 0.0);  // factor x2 vanishes exactly
}

TEST_CASE("Lie bracket") {
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);

    SUBCASE("[X,X] = 0") {
        VectorField f = case3_f();
        CHECK(lie_bracket(f, f).is_zero());
    }
    SUBCASE("drift against the unit field") {
        VectorField f({x1 * x2, Polynomial(2)});
        VectorField br = lie_bracket(f, unit_g());
        CHECK(br.component(0) == -1.0 * x1);
        CHECK(br.component(1).is_zero());
        CHECK(br.eval(Vec{1.0, 0.0}) == Vec{-1.0, 0.0});
    }
    SUBCASE("linear fields reduce to the matrix commutator") {
        // X = A x, Y = B x: [X,Y] = (BA - AB) x
        VectorField X({x2, Polynomial(2)});           // A = [[0,1],[0,0]]
        VectorField Y({Polynomial(2), x1});           // B = [[0,0],[1,0]]
        VectorField br = lie_bracket(X, Y);
        CHECK(br.eval(Vec{1.0, 1.0}) == Vec{-1.0, 1.0});
        CHECK(br.component(0) == -1.0 * x1);
        CHECK(br.component(1) == x2);
    }
}

TEST_CASE("iterated Lie derivatives") {
    Polynomial V = sum_of_squares();

    SUBCASE("empty list is V itself") {
        CHECK(iterated_lie_derivative_at({}, V, Vec{1.0, 2.0}) == doctest::Approx(5.0));
    }
    SUBCASE("g twice") {
        std::vector<VectorField> gg{unit_g(), unit_g()};
        CHECK(iterated_lie_derivative_at(gg, V, Vec{0.3, -0.7}) == doctest::Approx(2.0));
    }
    SUBCASE("f twice for the bilinear drift") {
        auto x1 = Polynomial::variable(2, 0);
        auto x2 = Polynomial::variable(2, 1);
        VectorField f({x1 * x2, Polynomial(2)});
        std::vector<VectorField> ff{f, f};
        Polynomial ffV = iterated_lie_derivative(ff, V);
        CHECK(ffV == 4.0 * x1 * x1 * x2 * x2);
        CHECK(ffV.eval(Vec{1.0, 1.0}) == doctest::Approx(4.0));
    }
}

TEST_CASE("bracket properties on random fields") {
    testsup::Rng rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        const int dim = 2 + rep % 2;
        VectorField X = rng.field(dim, 3);
        VectorField Y = rng.field(dim, 3);
        VectorField Z = rng.field(dim, 2);
        Polynomial V = rng.poly(dim, 3);

        VectorField xy = lie_bracket(X, Y);
        VectorField yx = lie_bracket(Y, X);
        VectorField jac = lie_bracket(xy, Z) + lie_bracket(lie_bracket(Y, Z), X) +
                          lie_bracket(lie_bracket(Z, X), Y);

        for (int pt = 0; pt < 10; ++pt) {
            Vec x = rng.point(dim);
            Vec a = xy.eval(x), b = yx.eval(x), j = jac.eval(x);
            for (int i = 0; i < dim; ++i) {
                CHECK(testsup::rel_err(a[i], -b[i]) < 1e-9);  // antisymmetry
                CHECK(std::abs(j[i]) < 1e-9);                 // Jacobi
            }
        }

        // derivation property, exact on integer coefficients
        Polynomial lhs = lie_derivative(xy, V);
        Polynomial rhs = lie_derivative(X, lie_derivative(Y, V)) -
                         lie_derivative(Y, lie_derivative(X, V));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("finite-difference consistency") {
    testsup::Rng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        VectorField X = rng.field(2, 3);
        Polynomial V = rng.poly(2, 3);
        Vec x = rng.point(2);

        // directional derivative along the frozen direction X(x)
        double want = testsup::central_derivative(
            [&](double t) {
                Vec xs = x;
                Vec dir = X.eval(x);
                for (int i = 0; i < 2; ++i) xs[i] += t * dir[i];
                return V.eval(xs);
            },
            0.0);
        double got = lie_derivative(X, V).eval(x);
        CHECK(testsup::rel_err(got, want) < 1e-6);

        // bracket against the finite-difference Jacobian oracle
        VectorField Y = rng.field(2, 3);
        Vec fd = testsup::fd_bracket(X, Y, x);
        Vec sym = lie_bracket(X, Y).eval(x);
        for (int i = 0; i < 2; ++i) CHECK(std::abs(sym[i] - fd[i]) < 1e-6 * std::max(1.0, std::abs(fd[i])));
    }
}
