#pragma once

// Point-wise classification of a system against the stabilizability
// hypotheses. At a nonzero state x the certificate names which mechanism
// makes V decrease achievable:
//
//   GvNonzero      (gV)(x) != 0, smooth feedback applies
//   DriftNegative  (gV)(x) = 0 and (fV)(x) < 0, zero control decreases V
//   P1             all generator tuples of total order <= N vanish at x and
//                  (f^{N+1}V)(x) < 0
//   P2i            ... and some odd j <= N has (lam_{N+1,j}V)(x) != 0 with the
//                  even-q tuple layer below j vanishing
//   P2ii           N odd > 2, odd j <= N-2 as above with the even-q layers
//                  between j and N vanishing
//   P2iii          N even and (lam_{N+1,N}V)(x) < 0
//   Unclassified   nothing closed up to n_max
//
// Zero tests are relative: |v| <= zero_tol * max(1, scale) where scale tracks
// the largest derivative magnitude seen at x during classification.

#include "sdclf/record.hpp"
#include "sdclf/system.hpp"

#include <algorithm>
#include <optional>

namespace sdclf {

enum class Branch { GvNonzero, DriftNegative, P1, P2i, P2ii, P2iii, Unclassified };

inline std::string to_string(Branch b) {
    switch (b) {
        case Branch::GvNonzero: return "GvNonzero";
        case Branch::DriftNegative: return "DriftNegative";
        case Branch::P1: return "P1";
        case Branch::P2i: return "P2i";
        case Branch::P2ii: return "P2ii";
        case Branch::P2iii: return "P2iii";
        case Branch::Unclassified: return "Unclassified";
    }
    return "?";
}

struct Certificate {
    Branch branch = Branch::Unclassified;
    std::optional<int> N;
    std::optional<int> j;
    /// True when additionally every tuple with total order N+1 and total
    /// g-order <= N-1 vanishes at x (the bounded-feedback regime).
    bool strengthened = false;
    Vec point;
    std::map<std::string, double> diagnostics;

    std::string to_record() const {
        Record r("certificate");
        r.set("branch", to_string(branch));
        r.set("point", point);
        if (N) r.set("N", *N);
        if (j) r.set("j", *j);
        if (branch == Branch::P1 || branch == Branch::P2i || branch == Branch::P2ii ||
            branch == Branch::P2iii)
            r.set("strengthened", strengthened);
        for (const auto& [k, v] : diagnostics) r.set("diag." + k, v);
        return r.str();
    }
};

struct VanishCheck {
    bool ok = true;
    double max_abs = 0.0;
    std::optional<GeneratorTuple> witness;
    double witness_value = 0.0;
};

/// True iff every tuple value under the budget is zero within
/// zero_tol * max(1, scale). The witness is the first failing tuple.
inline VanishCheck check_vanishing(const SystemCalculus& calc, const Vec& x,
                                   const TupleBudget& budget, const Tolerances& tol,
                                   double scale = 1.0) {
    if (norm2(x) <= 1e-15) throw std::invalid_argument("check_vanishing: x must be nonzero");
    VanishCheck out;
    const double thresh = tol.zero_tol * std::max(1.0, scale);
    for (const GeneratorTuple& t : enumerate_tuples(budget)) {
        double v = calc.tuple_value(t, x);
        out.max_abs = std::max(out.max_abs, std::abs(v));
        if (std::abs(v) > thresh && !out.witness) {
            out.ok = false;
            out.witness = t;
            out.witness_value = v;
        }
    }
    return out;
}

inline VanishCheck check_vanishing(const System& sys, const Vec& x, const TupleBudget& budget,
                                   const Tolerances& tol, double scale = 1.0) {
    SystemCalculus calc(sys);
    return check_vanishing(calc, x, budget, tol, scale);
}

/// Zero and sign tests during classification are relative to the largest
/// derivative magnitude of comparable depth: an order-d quantity is compared
/// against max(1, |gV|, |f^k V| and |lam_{k,j} V| for k <= d) at x. Derivative
/// magnitudes grow quickly with order, and low-order tests must not be
/// swamped by them.
class DerivativeScale {
public:
    DerivativeScale(const SystemCalculus& calc, const Vec& x) : calc_(calc), x_(x) {
        byorder_.push_back(std::max(1.0, std::abs(calc.gV().eval(x))));
    }

    double at(int d) {
        while (static_cast<int>(byorder_.size()) <= d) {
            const int k = static_cast<int>(byorder_.size());
            double s = byorder_.back();
            s = std::max(s, std::abs(calc_.f_power_V(k).eval(x_)));
            for (int j = 1; j <= k - 1; ++j)
                s = std::max(s, std::abs(calc_.generator_scalar({k, j}).eval(x_)));
            byorder_.push_back(s);
        }
        return byorder_[d];
    }

private:
    const SystemCalculus& calc_;
    const Vec& x_;
    std::vector<double> byorder_;  // byorder_[d]: orders up to d, byorder_[0] = base
};

namespace detail {

/// Even-q vanishing layers required by the odd-j branches: for every even q
/// in [q_lo, q_hi], all tuples with total order n and total g-order q vanish.
inline bool even_layers_vanish(const SystemCalculus& calc, const Vec& x, int n, int q_lo, int q_hi,
                               const Tolerances& tol, double scale) {
    for (int q = q_lo + (q_lo % 2); q <= q_hi; q += 2) {
        if (q < 2) continue;
        if (!check_vanishing(calc, x, TupleBudget::order_exact_g_exact(n, q), tol, scale).ok)
            return false;
    }
    return true;
}

}  // namespace detail

inline Certificate classify_point(const SystemCalculus& calc, const Vec& x, const Tolerances& tol = {},
                                  int n_max = 6) {
    if (static_cast<int>(x.size()) != calc.system().dim())
        throw DimensionMismatch("classify_point: point dimension");
    if (norm2(x) <= 1e-15)
        throw std::invalid_argument("classify_point: the origin is excluded (x != 0 required)");
    if (n_max < 1) throw std::invalid_argument("classify_point: n_max >= 1 required");

    Certificate cert;
    cert.point = x;

    DerivativeScale scales(calc, x);
    auto note = [&](const std::string& key, double v) { cert.diagnostics[key] = v; };

    const double gv = calc.gV().eval(x);
    note("gV", gv);
    if (std::abs(gv) > tol.zero_tol * scales.at(1)) {
        cert.branch = Branch::GvNonzero;
        return cert;
    }

    const double fv = calc.f_power_V(1).eval(x);
    note("fV", fv);
    if (fv < -tol.strict_tol * scales.at(1)) {
        cert.branch = Branch::DriftNegative;
        return cert;
    }

    for (int N = 1; N <= n_max; ++N) {
        VanishCheck low = check_vanishing(calc, x, TupleBudget::order_at_most(N), tol, scales.at(N));
        if (!low.ok) break;  // fails for every larger N as well

        const double top_scale = scales.at(N + 1);
        const double fN1 = calc.f_power_V(N + 1).eval(x);
        note("f^" + std::to_string(N + 1) + "V", fN1);

        auto close_branch = [&](Branch b, std::optional<int> j) {
            cert.branch = b;
            cert.N = N;
            cert.j = j;
            cert.strengthened =
                check_vanishing(calc, x, TupleBudget::order_exact_g_at_most(N + 1, N - 1), tol,
                                top_scale)
                    .ok;
        };

        if (fN1 < -tol.strict_tol * top_scale) {
            close_branch(Branch::P1, std::nullopt);
            return cert;
        }
        if (fN1 <= tol.zero_tol * top_scale) {
            // P2(i): smallest odd j <= N with a live generator and the even
            // layers below j vanishing.
            for (int j = 1; j <= N; j += 2) {
                double lam = calc.generator_scalar({N + 1, j}).eval(x);
                note("L(" + std::to_string(N + 1) + "," + std::to_string(j) + ")V", lam);
                if (std::abs(lam) <= tol.zero_tol * top_scale) continue;
                if (j > 2 && !detail::even_layers_vanish(calc, x, N + 1, 2, j - 1, tol, top_scale))
                    continue;
                close_branch(Branch::P2i, j);
                return cert;
            }
            // P2(ii): N odd > 2, odd j <= N-2, even layers between j and N.
            if (N > 2 && N % 2 == 1) {
                for (int j = 1; j <= N - 2; j += 2) {
                    double lam = calc.generator_scalar({N + 1, j}).eval(x);
                    if (std::abs(lam) <= tol.zero_tol * top_scale) continue;
                    if (!detail::even_layers_vanish(calc, x, N + 1, j + 1, N - 1, tol, top_scale))
                        continue;
                    close_branch(Branch::P2ii, j);
                    return cert;
                }
            }
            // P2(iii): N even with strictly negative top generator.
            if (N % 2 == 0) {
                double lam = calc.generator_scalar({N + 1, N}).eval(x);
                note("L(" + std::to_string(N + 1) + "," + std::to_string(N) + ")V", lam);
                if (lam < -tol.strict_tol * top_scale) {
                    close_branch(Branch::P2iii, std::nullopt);
                    return cert;
                }
            }
        }
    }
    cert.branch = Branch::Unclassified;
    return cert;
}

inline Certificate classify_point(const System& sys, const Vec& x, const Tolerances& tol = {},
                                  int n_max = 6) {
    SystemCalculus calc(sys);
    return classify_point(calc, x, tol, n_max);
}

struct BoundednessWitness {
    Polynomial theta;
    Polynomial xi;  // one-variable polynomial evaluated at |omega|
    bool verified = false;
    std::optional<Vec> counterexample;
    double max_violation = 0.0;
};

/// Sampled check of |(fV)(w) + theta(w)| <= xi(|w|) |(gV)(w)| on a grid.
/// Requires theta, xi >= 0 on the sampled region.
inline BoundednessWitness check_bounded_growth(const SystemCalculus& calc, const Polynomial& theta,
                                               const Polynomial& xi, const Box& region, int grid,
                                               const Tolerances& tol = {}) {
    if (!region.valid() || region.dim() != calc.system().dim())
        throw std::invalid_argument("check_bounded_growth: invalid region");
    if (xi.dim() != 1) throw DimensionMismatch("check_bounded_growth: xi must be one-variable");

    const Polynomial& fV = calc.f_power_V(1);
    const Polynomial& gV = calc.gV();

    BoundednessWitness w{theta, xi, true, std::nullopt, 0.0};
    detail::for_each_grid_point(region, grid, [&](const Vec& x) {
        double th = theta.eval(x);
        double xv = xi.eval(Vec{norm2(x)});
        if (th < -tol.zero_tol || xv < -tol.zero_tol)
            throw std::invalid_argument("check_bounded_growth: theta and xi must be nonnegative");
        double lhs = std::abs(fV.eval(x) + th);
        double rhs = xv * std::abs(gV.eval(x));
        double slack = tol.zero_tol * std::max(1.0, std::max(lhs, rhs));
        if (lhs > rhs + slack) {
            w.max_violation = std::max(w.max_violation, lhs - rhs);
            if (w.verified) {
                w.verified = false;
                w.counterexample = x;
            }
        }
    });
    return w;
}

inline BoundednessWitness check_bounded_growth(const System& sys, const Polynomial& theta,
                                               const Polynomial& xi, const Box& region, int grid,
                                               const Tolerances& tol = {}) {
    SystemCalculus calc(sys);
    return check_bounded_growth(calc, theta, xi, region, grid, tol);
}

}  // namespace sdclf
