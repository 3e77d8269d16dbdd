#pragma once

// Benchmark family and registry. The family couples an n-dimensional block x
// driven by four coefficient fields with an integrator state y:
//
//   d/dt (x, y) = ( a(x) + y b(x) + y^2 c(x) + y^3 d(x), 0 ) + u (0, 1)
//   V(x, y) = W(x) + y^2
//
// Each registry instance isolates one decrease mechanism: drift (case1), the
// first-order bracket (case2i), the second-order bracket (case3), the
// third-order bracket (case4) and the mixed bracket [a,d] (case5).

#include "sdclf/classify.hpp"

#include <array>
#include <functional>

namespace sdclf {

/// Coefficient data of one family instance. All four coefficients are vector
/// fields on the x-block (scalars when n = 1).
struct CaseFamily {
    int n = 1;
    VectorField a, beta, gamma, delta;
    Polynomial W;

    CaseFamily(int n_, VectorField a_, VectorField beta_, VectorField gamma_, VectorField delta_,
               Polynomial W_)
        : n(n_), a(std::move(a_)), beta(std::move(beta_)), gamma(std::move(gamma_)),
          delta(std::move(delta_)), W(std::move(W_)) {
        for (const VectorField* f : {&a, &beta, &gamma, &delta})
            if (f->dim() != n) throw DimensionMismatch("CaseFamily: coefficient dimension != n");
        if (W.dim() != n) throw DimensionMismatch("CaseFamily: W dimension != n");
        const Polynomial::Exponents zero(n, 0);
        for (int i = 0; i < n; ++i)
            if (std::abs(a.component(i).coefficient(zero)) > 1e-12)
                throw std::invalid_argument("CaseFamily: a(0) != 0");
        if (std::abs(W.coefficient(zero)) > 1e-12)
            throw std::invalid_argument("CaseFamily: W(0) != 0");
        for (int i = 0; i < n; ++i) {
            Polynomial::Exponents lin(n, 0);
            lin[i] = 1;
            if (std::abs(W.coefficient(lin)) > 1e-12)
                throw std::invalid_argument("CaseFamily: W has a linear term");
        }
    }
};

/// Assemble the (n+1)-dimensional system with V = W + y^2.
inline System build_case_system(const CaseFamily& fam, const std::string& name = "") {
    const int m = fam.n + 1;
    Polynomial y = Polynomial::variable(m, fam.n);
    std::vector<Polynomial> fcomp;
    for (int i = 0; i < fam.n; ++i) {
        Polynomial ci = fam.a.component(i).embed(m);
        ci += y * fam.beta.component(i).embed(m);
        ci += y * y * fam.gamma.component(i).embed(m);
        ci += y * y * y * fam.delta.component(i).embed(m);
        fcomp.push_back(std::move(ci));
    }
    fcomp.push_back(Polynomial(m));
    std::vector<Polynomial> gcomp(m, Polynomial(m));
    gcomp[fam.n] = Polynomial::constant(m, 1.0);
    Polynomial V = fam.W.embed(m) + y * y;
    return System(name, VectorField(std::move(fcomp)), VectorField(std::move(gcomp)), std::move(V));
}

/// The family's natural smooth-feedback offset theta = -(aW), lifted to the
/// full state space. Nonnegative whenever aW <= 0, which every registry
/// instance satisfies.
inline Polynomial family_theta(const CaseFamily& fam) {
    return (-1.0 * lie_derivative(fam.a, fam.W)).embed(fam.n + 1);
}

enum class ESet { E1, E2, E3, E4, E5, None };

inline std::string to_string(ESet e) {
    switch (e) {
        case ESet::E1: return "E1";
        case ESet::E2: return "E2";
        case ESet::E3: return "E3";
        case ESet::E4: return "E4";
        case ESet::E5: return "E5";
        case ESet::None: return "None";
    }
    return "?";
}

/// Classify a nonzero x-block point into the family's case sets, first match
/// wins:
///   E1: (aW) < 0
///   E2: (aW) <= 0 and (bW) != 0
///   E3: (aW) = (bW) = 0 and (cW) < 0
///   E4: (aW) = (bW) = (cW) = 0 and (dW) != 0
///   E5: ... all above zero, ([[a,c],a]W) = 0 and ([a,d]W) != 0
inline ESet classify_case_set(const CaseFamily& fam, const Vec& x, const Tolerances& tol = {}) {
    if (static_cast<int>(x.size()) != fam.n) throw DimensionMismatch("classify_case_set: point");
    if (norm2(x) <= 1e-15)
        throw std::invalid_argument("classify_case_set: the origin is excluded");

    const double aW = lie_derivative(fam.a, fam.W).eval(x);
    const double bW = lie_derivative(fam.beta, fam.W).eval(x);
    const double cW = lie_derivative(fam.gamma, fam.W).eval(x);
    const double dW = lie_derivative(fam.delta, fam.W).eval(x);
    const double scale = std::max({1.0, std::abs(aW), std::abs(bW), std::abs(cW), std::abs(dW)});
    const double z = tol.zero_tol * scale;
    const double s = tol.strict_tol * scale;

    if (aW < -s) return ESet::E1;
    if (aW <= z && std::abs(bW) > z) return ESet::E2;
    if (std::abs(aW) <= z && std::abs(bW) <= z && cW < -s) return ESet::E3;
    if (std::abs(aW) <= z && std::abs(bW) <= z && std::abs(cW) <= z && std::abs(dW) > z)
        return ESet::E4;
    if (std::abs(aW) <= z && std::abs(bW) <= z && std::abs(cW) <= z && std::abs(dW) <= z) {
        const double acaW =
            lie_derivative(lie_bracket(lie_bracket(fam.a, fam.gamma), fam.a), fam.W).eval(x);
        const double adW = lie_derivative(lie_bracket(fam.a, fam.delta), fam.W).eval(x);
        if (std::abs(acaW) <= z && std::abs(adW) > z) return ESet::E5;
    }
    return ESet::None;
}

/// Cross-check of the family's generator identities on a y = 0 grid:
///   (L(2,1)V) = -(bW),  (L(3,2)V) = 2(cW),  (L(4,3)V) = -6(dW),
///   (L(5,3)V) = 6([a,d]W).
/// Reports the max absolute mismatch per identity over the grid.
struct CaseClaimsReport {
    std::array<double, 4> max_mismatch{};
    std::array<std::string, 4> label{
        "L(2,1)V vs -(beta W)",
        "L(3,2)V vs 2(gamma W)",
        "L(4,3)V vs -6(delta W)",
        "L(5,3)V vs 6([a,delta] W)",
    };
};

inline CaseClaimsReport verify_case_claims(const CaseFamily& fam, const Box& region, int grid,
                                           const Tolerances& tol = {}) {
    (void)tol;
    if (!region.valid() || region.dim() != fam.n)
        throw std::invalid_argument("verify_case_claims: region must be an x-block box");

    System sys = build_case_system(fam);
    SystemCalculus calc(sys);
    const Polynomial bW = lie_derivative(fam.beta, fam.W);
    const Polynomial cW = lie_derivative(fam.gamma, fam.W);
    const Polynomial dW = lie_derivative(fam.delta, fam.W);
    const Polynomial adW = lie_derivative(lie_bracket(fam.a, fam.delta), fam.W);

    CaseClaimsReport rep;
    detail::for_each_grid_point(region, grid, [&](const Vec& xb) {
        Vec x(fam.n + 1, 0.0);
        for (int i = 0; i < fam.n; ++i) x[i] = xb[i];

        auto lam = [&](int k, int j) { return calc.generator_scalar({k, j}).eval(x); };
        const double rhs[4] = {-bW.eval(xb), 2.0 * cW.eval(xb), -6.0 * dW.eval(xb),
                               6.0 * adW.eval(xb)};
        const double lhs[4] = {lam(2, 1), lam(3, 2), lam(4, 3), lam(5, 3)};
        for (int i = 0; i < 4; ++i)
            rep.max_mismatch[i] = std::max(rep.max_mismatch[i], std::abs(lhs[i] - rhs[i]));
    });
    return rep;
}

struct BenchEntry {
    CaseFamily family;
    System system;
    Polynomial theta;
};

namespace detail {

inline CaseFamily scalar_family(const Polynomial& a, const Polynomial& beta,
                                const Polynomial& gamma, const Polynomial& delta,
                                const Polynomial& W) {
    return CaseFamily(1, VectorField({a}), VectorField({beta}), VectorField({gamma}),
                      VectorField({delta}), W);
}

}  // namespace detail

/// Registry instances. x, W = x^2 on the scalar block unless noted.
///   case1:  a = -x^3            drift alone decreases V
///   case2i: beta = x            first bracket level
///   case3:  gamma = -x          second bracket level, bounded regime
///   case4:  delta = -x          third bracket level
///   case5:  n = 2, a = rotation, delta = (0, x1): mixed bracket [a,delta]
inline BenchEntry make_bench(const std::string& name) {
    auto x = Polynomial::variable(1, 0);
    auto zero1 = Polynomial(1);
    auto W1 = x * x;

    std::optional<CaseFamily> fam;
    if (name == "case1") fam = detail::scalar_family(-1.0 * x.pow(3), zero1, zero1, zero1, W1);
    else if (name == "case2i") fam = detail::scalar_family(zero1, x, zero1, zero1, W1);
    else if (name == "case3") fam = detail::scalar_family(zero1, zero1, -1.0 * x, zero1, W1);
    else if (name == "case4") fam = detail::scalar_family(zero1, zero1, zero1, -1.0 * x, W1);
    else if (name == "case5") {
        auto x1 = Polynomial::variable(2, 0);
        auto x2 = Polynomial::variable(2, 1);
        auto zero2 = Polynomial(2);
        fam = CaseFamily(2, VectorField({-1.0 * x2, x1}), VectorField::zero(2),
                         VectorField::zero(2), VectorField({zero2, x1}), x1 * x1 + x2 * x2);
    } else {
        throw std::invalid_argument("make_bench: unknown benchmark '" + name +
                                    "' (known: case1, case2i, case3, case4, case5)");
    }
    return BenchEntry{*fam, build_case_system(*fam, name), family_theta(*fam)};
}

inline const std::vector<std::string>& bench_names() {
    static const std::vector<std::string> names = {"case1", "case2i", "case3", "case4", "case5"};
    return names;
}

}  // namespace sdclf
