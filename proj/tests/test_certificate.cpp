#include "sdclf/classify.hpp"

#include "sdclf/benchmarks.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace sdclf;

namespace {

System bench(const std::string& name) { return make_bench(name).system; }

/// No-early-exit reference classifier: evaluates every condition for every N
/// up to n_max, then applies the documented branch priority. Zero tests use
/// the same graded rule as the library: an order-d quantity is compared
/// against the largest derivative magnitude of order <= d.
Branch brute_force_branch(const SystemCalculus& calc, const Vec& x, const Tolerances& tol,
                          int n_max) {
    const double gv = calc.gV().eval(x);
    std::vector<double> fpow(n_max + 2, 0.0);
    for (int k = 1; k <= n_max + 1; ++k) fpow[k] = calc.f_power_V(k).eval(x);
    std::map<std::pair<int, int>, double> lam;
    for (int k = 2; k <= n_max + 1; ++k)
        for (int j = 1; j <= k - 1; ++j) lam[{k, j}] = calc.generator_scalar({k, j}).eval(x);

    std::vector<double> scale(n_max + 2, std::max(1.0, std::abs(gv)));
    for (int d = 1; d <= n_max + 1; ++d) {
        scale[d] = std::max(scale[d - 1], std::abs(fpow[d]));
        for (int j = 1; j <= d - 1; ++j) scale[d] = std::max(scale[d], std::abs(lam[{d, j}]));
    }

    auto zero = [&](double v, int d) { return std::abs(v) <= tol.zero_tol * scale[d]; };
    auto neg = [&](double v, int d) { return v < -tol.strict_tol * scale[d]; };

    if (!zero(gv, 1)) return Branch::GvNonzero;
    if (neg(fpow[1], 1)) return Branch::DriftNegative;

    auto layer_vanishes = [&](int n, int q) {
        for (const auto& t : enumerate_tuples(TupleBudget::order_exact_g_exact(n, q)))
            if (!zero(calc.tuple_value(t, x), n)) return false;
        return true;
    };
    auto all_low_vanish = [&](int N) {
        for (const auto& t : enumerate_tuples(TupleBudget::order_at_most(N)))
            if (!zero(calc.tuple_value(t, x), N)) return false;
        return true;
    };

    for (int N = 1; N <= n_max; ++N) {
        if (!all_low_vanish(N)) continue;
        if (neg(fpow[N + 1], N + 1)) return Branch::P1;
        if (fpow[N + 1] <= tol.zero_tol * scale[N + 1]) {
            for (int j = 1; j <= N; j += 2) {
                if (zero(lam[{N + 1, j}], N + 1)) continue;
                bool ok = true;
                for (int q = 2; q < j; q += 2) ok = ok && layer_vanishes(N + 1, q);
                if (ok) return Branch::P2i;
            }
            if (N % 2 == 1 && N > 2) {
                for (int j = 1; j <= N - 2; j += 2) {
                    if (zero(lam[{N + 1, j}], N + 1)) continue;
                    bool ok = true;
                    for (int q = j + 1; q < N; ++q)
                        if (q % 2 == 0) ok = ok && layer_vanishes(N + 1, q);
                    if (ok) return Branch::P2ii;
                }
            }
            if (N % 2 == 0 && neg(lam[{N + 1, N}], N + 1)) return Branch::P2iii;
        }
    }
    return Branch::Unclassified;
}

}  // namespace

TEST_CASE("classification of the benchmark points") {
    Tolerances tol;

    SUBCASE("drift alone") {
        Certificate c = classify_point(bench("case1"), Vec{1.0, 0.0}, tol);
        CHECK(c.branch == Branch::DriftNegative);
        CHECK(c.diagnostics.at("fV") == doctest::Approx(-2.0));
    }
    SUBCASE("first bracket level") {
        Certificate c = classify_point(bench("case2i"), Vec{1.0, 0.0}, tol);
        CHECK(c.branch == Branch::P2i);
        CHECK(c.N == 1);
        CHECK(c.j == 1);
        CHECK(c.diagnostics.at("L(2,1)V") == doctest::Approx(-2.0));
    }
    SUBCASE("second bracket level") {
        Certificate c = classify_point(bench("case3"), Vec{1.0, 0.0}, tol);
        CHECK(c.branch == Branch::P2iii);
        CHECK(c.N == 2);
        CHECK_FALSE(c.j.has_value());
        CHECK(c.diagnostics.at("L(3,2)V") == doctest::Approx(-4.0));
        CHECK(c.strengthened);
    }
    SUBCASE("off the axis the drive is live") {
        Certificate c = classify_point(bench("case3"), Vec{1.0, 1.0}, tol);
        CHECK(c.branch == Branch::GvNonzero);
        CHECK(c.diagnostics.at("gV") == doctest::Approx(2.0));
    }
    SUBCASE("origin is rejected") {
        CHECK_THROWS_AS(classify_point(bench("case3"), Vec{0.0, 0.0}, tol), std::invalid_argument);
    }
    SUBCASE("uncontrollable direction stays Unclassified") {
        // f = 0 gives no decrease mechanism anywhere on gV = 0
        System sys(VectorField::zero(2),
                   VectorField({Polynomial(2), Polynomial::constant(2, 1.0)}),
                   Polynomial::variable(2, 0).pow(2) + Polynomial::variable(2, 1).pow(2));
        Certificate c = classify_point(sys, Vec{1.0, 0.0}, tol, 4);
        CHECK(c.branch == Branch::Unclassified);
    }
}

TEST_CASE("vanishing checks") {
    Tolerances tol;
    SystemCalculus case3(bench("case3"));
    SystemCalculus case2i(bench("case2i"));
    Vec x{1.0, 0.0};

    SUBCASE("all low-order tuples vanish on the axis for case3") {
        CHECK(check_vanishing(case3, x, TupleBudget::order_at_most(2), tol).ok);
        CHECK(check_vanishing(case3, x, TupleBudget::order_exact_g_at_most(3, 1), tol).ok);
    }
    SUBCASE("case2i fails with the first bracket as witness") {
        VanishCheck v = check_vanishing(case2i, x, TupleBudget::order_at_most(2), tol);
        CHECK_FALSE(v.ok);
        REQUIRE(v.witness.has_value());
        CHECK(*v.witness == GeneratorTuple{{2, 1}});
        CHECK(v.witness_value == doctest::Approx(-2.0));
    }
    SUBCASE("monotone in the order bound") {
        for (int N = 1; N <= 4; ++N) {
            bool okN = check_vanishing(case3, x, TupleBudget::order_at_most(N), tol).ok;
            bool expected = N <= 2;  // (3,2) layer is live at order 3
            CHECK(okN == expected);
        }
    }
    SUBCASE("x = 0 rejected") {
        CHECK_THROWS_AS(check_vanishing(case3, Vec{0.0, 0.0}, TupleBudget::order_at_most(1), tol),
                        std::invalid_argument);
    }
}

TEST_CASE("branch soundness: stored diagnostics reproduce independently") {
    SystemCalculus calc(bench("case3"));
    Vec x{1.0, 0.0};
    Certificate c = classify_point(calc, x);
    REQUIRE(c.branch == Branch::P2iii);
    const int N = *c.N;
    CHECK(check_vanishing(calc, x, TupleBudget::order_at_most(N), Tolerances{}).ok);
    CHECK(calc.generator_scalar({N + 1, N}).eval(x) ==
          doctest::Approx(c.diagnostics.at("L(3,2)V")));
    CHECK(calc.f_power_V(N + 1).eval(x) == doctest::Approx(c.diagnostics.at("f^3V")));
}

TEST_CASE("branch is invariant under positive scaling of V") {
    for (const char* name : {"case1", "case2i", "case3"}) {
        System sys = bench(name);
        for (double cscale : {0.5, 3.0}) {
            System scaled(sys.f(), sys.g(), sys.V() * cscale);
            for (Vec x : {Vec{1.0, 0.0}, Vec{-0.7, 0.0}, Vec{0.4, 0.9}}) {
                Certificate a = classify_point(sys, x);
                Certificate b = classify_point(scaled, x);
                CHECK(a.branch == b.branch);
                CHECK(a.N == b.N);
                CHECK(a.j == b.j);
            }
        }
    }
}

TEST_CASE("agreement with the no-early-exit classifier on a small grid") {
    Tolerances tol;
    for (const char* name : {"case1", "case2i", "case3"}) {
        SystemCalculus calc(bench(name));
        for (double xv : {-1.5, -0.6, 0.4, 1.2}) {
            for (double yv : {-1.0, 0.0, 0.8}) {
                if (xv == 0.0 && yv == 0.0) continue;
                Vec x{xv, yv};
                CHECK(classify_point(calc, x, tol).branch == brute_force_branch(calc, x, tol, 6));
            }
        }
    }
}

TEST_CASE("growth bound checks") {
    Tolerances tol;
    SystemCalculus case3(bench("case3"));
    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);
    Box box{{-2.0, -2.0}, {2.0, 2.0}};

    SUBCASE("exact cancellation verifies with xi = 0") {
        Polynomial theta = 2.0 * x1 * x1 * x2 * x2;
        BoundednessWitness w = check_bounded_growth(case3, theta, Polynomial(1), box, 41, tol);
        CHECK(w.verified);
    }
    SUBCASE("zero theta with a linear xi verifies on the box") {
        Polynomial xi = 4.0 * Polynomial::variable(1, 0);
        BoundednessWitness w = check_bounded_growth(case3, Polynomial(2), xi, box, 41, tol);
        CHECK(w.verified);
    }
    SUBCASE("positive drift along gV = 0 is a counterexample") {
        System sys(VectorField({x1, Polynomial(2)}),
                   VectorField({Polynomial(2), Polynomial::constant(2, 1.0)}), x1 * x1 + x2 * x2);
        // a steep xi confines violations to the gV = 0 axis, where no xi helps
        Polynomial xi = 1000.0 * Polynomial::variable(1, 0);
        BoundednessWitness w = check_bounded_growth(sys, Polynomial(2), xi, box, 41, tol);
        CHECK_FALSE(w.verified);
        REQUIRE(w.counterexample.has_value());
        CHECK(std::abs((*w.counterexample)[1]) < 1e-12);  // on the gV = 0 axis
        CHECK(std::abs((*w.counterexample)[0]) > 0.0);
    }
    SUBCASE("invalid region throws") {
        Box bad{{1.0, 1.0}, {-1.0, -1.0}};
        CHECK_THROWS(check_bounded_growth(case3, Polynomial(2), Polynomial(1), bad, 5, tol));
    }
    SUBCASE("negative theta violates the precondition") {
        Polynomial theta = -1.0 * x1 * x1;
        CHECK_THROWS_AS(check_bounded_growth(case3, theta, Polynomial(1), box, 11, tol),
                        std::invalid_argument);
    }
}

TEST_CASE("sampled positivity diagnostic") {
    System sys = bench("case3");
    Box box{{-1.0, -1.0}, {1.0, 1.0}};
    CHECK(sys.sampled_positive(box, 11));

    auto x1 = Polynomial::variable(2, 0);
    auto x2 = Polynomial::variable(2, 1);
    // x1^2 - x2^2 is indefinite
    System bad(VectorField::zero(2), VectorField({Polynomial(2), Polynomial::constant(2, 1.0)}),
               x1 * x1 - x2 * x2);
    CHECK_FALSE(bad.sampled_positive(box, 11));
}

TEST_CASE("certificate record is deterministic") {
    Certificate c = classify_point(bench("case3"), Vec{1.0, 0.0});
    std::string rec = c.to_record();
    CHECK(rec == "# certificate\n"
                 "branch=P2iii\n"
                 "point=1,0\n"
                 "N=2\n"
                 "strengthened=true\n"
                 "diag.L(2,1)V=0\n"
                 "diag.L(3,1)V=0\n"
                 "diag.L(3,2)V=-4\n"
                 "diag.fV=0\n"
                 "diag.f^2V=0\n"
                 "diag.f^3V=0\n"
                 "diag.gV=0\n");
}
