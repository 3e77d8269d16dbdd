#pragma once

// Controller construction at a classified point.
//
// Smooth branch: u(x) = -((fV + theta)/(gV)^2 + 1) gV where gV != 0, and
// u = 0 where gV = 0 with fV < 0.
//
// Bracket branch: a two-phase constant schedule. With X = f + u1 g and
// Y = f + u2 g, u2 = -rho u1, run Y for time t then X for rho t. Writing
// m(t) = V(X_{rho t}(Y_t(x))), the derivatives at zero have the closed form
//
//   m^(n)(0) = sum_{k=0..n} C(n,k) rho^k (Y^{n-k} X^k V)(x),
//
// computed exactly on polynomial data. The pair search looks for
// m^(n)(0) = 0 for n <= N and m^(N+1)(0) < 0; the schedule duration is then
// shrunk by bisection until V actually decreases with the inter-sample bound
// V <= 2 V(x) observed along the way.

#include "sdclf/classify.hpp"
#include "sdclf/integrate.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>

namespace sdclf {

struct BracketPair {
    double rho;  // in (0,1]
    double u1;
    double u2;   // always -rho * u1

    static BracketPair make(double rho, double u1) { return {rho, u1, -rho * u1}; }
};

struct ControlSchedule {
    double switch_time;   // t
    double first_value;   // u2 on [0, t]
    double second_value;  // u1 on (t, end_time]
    double end_time;      // t + rho t, stored exactly as the requested epsilon

    ControlSignal signal(double t0 = 0.0) const {
        if (first_value == second_value)
            return ControlSignal{{t0, t0 + end_time}, {first_value}};
        return ControlSignal{{t0, t0 + switch_time, t0 + end_time}, {first_value, second_value}};
    }
};

struct SearchPolicy {
    std::vector<double> rho_grid = {1.0, 0.5, 0.25, 0.125};
    double u_min = 0x1p-20;
    double u_max = 0x1p20;
    int max_derivative_order = 8;
};

struct DerivValue {
    double value = 0.0;
    double scale = 1.0;  // max(1, sum of |term| magnitudes), for relative zero tests
};

namespace detail {

inline double ipow(double base, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= base;
    return r;
}

}  // namespace detail

/// n-th derivative at t=0 of V along the composed two-phase flow, expanded
/// over words in {f,g}^n: with Y-slots outermost (first n-k applications) and
/// X-slots innermost, each word contributes u2^(g's in Y-slots) *
/// u1^(g's in X-slots) times its cached scalar evaluated at x.
inline DerivValue composed_flow_derivative(const SystemCalculus& calc, const Vec& x,
                                           const BracketPair& pair, int n, int max_order = 8) {
    if (n < 1) throw std::invalid_argument("composed_flow_derivative: n >= 1 required");
    if (n > max_order)
        throw std::invalid_argument("composed_flow_derivative: order " + std::to_string(n) +
                                    " exceeds configured max " + std::to_string(max_order));
    const std::uint32_t end = 1u << n;
    std::vector<double> word_value(end, 0.0);
    for (std::uint32_t m = 0; m < end; ++m) {
        const Polynomial& p = calc.word_scalar(n, m);
        if (!p.terms().empty()) word_value[m] = p.eval(x);
    }

    DerivValue out;
    double binom = 1.0;
    double rho_pow = 1.0;
    for (int k = 0; k <= n; ++k) {
        const std::uint32_t x_slots = (k == 0) ? 0u : ((1u << k) - 1u);
        for (std::uint32_t m = 0; m < end; ++m) {
            if (word_value[m] == 0.0) continue;
            const int g_in_y = std::popcount(m >> k);
            const int g_in_x = std::popcount(m & x_slots);
            const double contrib = binom * rho_pow * detail::ipow(pair.u2, g_in_y) *
                                   detail::ipow(pair.u1, g_in_x) * word_value[m];
            out.value += contrib;
            out.scale = std::max(out.scale, std::abs(contrib));
        }
        binom = binom * (n - k) / (k + 1);
        rho_pow *= pair.rho;
    }
    return out;
}

inline DerivValue composed_flow_derivative(const System& sys, const Vec& x, const BracketPair& pair,
                                           int n, int max_order = 8) {
    SystemCalculus calc(sys);
    return composed_flow_derivative(calc, x, pair, n, max_order);
}

/// Smooth stabilizing feedback. theta must be a nonnegative continuous
/// offset (zero is always admissible). Throws NotApplicable where the
/// formula has no defined branch.
inline double sontag_feedback(const SystemCalculus& calc, const Polynomial& theta, const Vec& x,
                              const Tolerances& tol = {}) {
    const double gv = calc.gV().eval(x);
    const double fv = calc.f_power_V(1).eval(x);
    const double scale = std::max({1.0, std::abs(gv), std::abs(fv)});
    if (std::abs(gv) > tol.zero_tol * scale)
        return -((fv + theta.eval(x)) / (gv * gv) + 1.0) * gv;
    if (fv < -tol.strict_tol * scale) return 0.0;
    throw NotApplicable("sontag_feedback: gV = 0 and fV >= 0 at this state; use a bracket schedule");
}

inline double sontag_feedback(const System& sys, const Polynomial& theta, const Vec& x,
                              const Tolerances& tol = {}) {
    SystemCalculus calc(sys);
    return sontag_feedback(calc, theta, x, tol);
}

namespace detail {

/// Candidate magnitudes for u1. Both branches start from min(1, u_max); the
/// small-control branches walk down the ladder first, the large-control
/// branches walk up first, each with the opposite direction as fallback.
inline std::vector<double> u1_ladder(bool small_first, const SearchPolicy& pol) {
    std::vector<double> down, up;
    const double start = std::min(1.0, pol.u_max);
    for (double m = start; m >= pol.u_min; m /= 2.0) down.push_back(m);
    for (double m = start * 2.0; m <= pol.u_max; m *= 2.0) up.push_back(m);
    std::vector<double> out;
    if (small_first) {
        out = down;
        out.insert(out.end(), up.begin(), up.end());
    } else {
        out.push_back(start);
        out.insert(out.end(), up.begin(), up.end());
        out.insert(out.end(), down.begin() + (down.empty() ? 0 : 1), down.end());
    }
    return out;
}

}  // namespace detail

/// Search for (rho, u1) with m^(n)(0) ~ 0 for n <= N and m^(N+1)(0) < 0.
inline BracketPair synthesize_pair(const SystemCalculus& calc, const Vec& x, const Certificate& cert,
                                   const SearchPolicy& policy = {}, const Tolerances& tol = {}) {
    if (cert.branch != Branch::P1 && cert.branch != Branch::P2i && cert.branch != Branch::P2ii &&
        cert.branch != Branch::P2iii)
        throw WrongBranch("synthesize_pair: certificate branch " + to_string(cert.branch) +
                          " does not call for a bracket schedule");
    const int N = cert.N.value();

    // Sign preference: for odd N pick u1 so the top generator term is
    // negative when it is decisive; otherwise positive first.
    double lam_top = calc.generator_scalar({N + 1, N}).eval(x);
    std::vector<double> signs = {1.0, -1.0};
    if (N % 2 == 1 && std::abs(lam_top) > tol.zero_tol) {
        signs = lam_top > 0 ? std::vector<double>{-1.0, 1.0} : std::vector<double>{1.0, -1.0};
    }

    const bool small_first = cert.branch == Branch::P1 || cert.branch == Branch::P2i;
    std::vector<double> magnitudes = detail::u1_ladder(small_first, policy);

    auto admissible = [&](const BracketPair& pair) -> bool {
        for (int n = 1; n <= N; ++n) {
            DerivValue d = composed_flow_derivative(calc, x, pair, n, policy.max_derivative_order);
            if (std::abs(d.value) > tol.zero_tol * d.scale) return false;
        }
        return true;
    };

    double best_margin = std::numeric_limits<double>::infinity();
    auto try_pair = [&](const BracketPair& pair) -> bool {
        DerivValue top = composed_flow_derivative(calc, x, pair, N + 1, policy.max_derivative_order);
        best_margin = std::min(best_margin, top.value / top.scale);
        return top.value < -tol.strict_tol * top.scale && admissible(pair);
    };

    for (double rho : policy.rho_grid) {
        if (cert.branch == Branch::P1) {
            BracketPair pair = BracketPair::make(rho, 0.0);
            if (try_pair(pair)) return pair;
        }
        for (double mag : magnitudes) {
            for (double s : signs) {
                BracketPair pair = BracketPair::make(rho, s * mag);
                if (try_pair(pair)) return pair;
            }
        }
    }
    throw SearchExhausted("synthesize_pair: no (rho,u1) in the search grid achieved the sign "
                          "condition; best scaled margin " +
                              detail::format_double(best_margin),
                          best_margin);
}

inline BracketPair synthesize_pair(const System& sys, const Vec& x, const Certificate& cert,
                                   const SearchPolicy& policy = {}, const Tolerances& tol = {}) {
    SystemCalculus calc(sys);
    return synthesize_pair(calc, x, cert, policy, tol);
}

/// Two-phase schedule on [0, epsilon]: u2 on [0, eps/(1+rho)], then u1.
inline ControlSchedule build_schedule(const BracketPair& pair, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("build_schedule: epsilon must be positive");
    return ControlSchedule{epsilon / (1.0 + pair.rho), pair.u2, pair.u1, epsilon};
}

struct SynthesisOutcome {
    enum class Kind { SmoothFeedback, Schedule };

    Kind kind = Kind::Schedule;
    double u_value = 0.0;                      // SmoothFeedback
    std::optional<ControlSchedule> schedule;   // Schedule
    double epsilon = 0.0;
    double decrease_margin = 0.0;   // V(x) - V(end)
    double intersample_peak = 0.0;  // max_s V / V(x)

    std::string to_record() const {
        Record r("synthesis");
        r.set("kind", std::string(kind == Kind::SmoothFeedback ? "SmoothFeedback" : "Schedule"));
        if (kind == Kind::SmoothFeedback) r.set("u", u_value);
        if (schedule) {
            r.set("u1", schedule->second_value);
            r.set("u2", schedule->first_value);
            r.set("switch_time", schedule->switch_time);
        }
        r.set("epsilon", epsilon);
        r.set("decrease_margin", decrease_margin);
        r.set("intersample_peak", intersample_peak);
        return r.str();
    }
};

namespace detail {

template <typename MakeSignal>
SynthesisOutcome epsilon_bisection(const SystemCalculus& calc, const Vec& x, double sigma,
                                   const IntegratorConfig& integ, MakeSignal&& make_signal,
                                   int max_halvings = 30) {
    if (!(sigma > 0.0)) throw std::invalid_argument("select_epsilon: sigma must be positive");
    const Polynomial& V = calc.system().V();
    const double v0 = V.eval(x);
    double eps = sigma;
    for (int k = 0; k <= max_halvings; ++k, eps *= 0.5) {
        ControlSignal sig = make_signal(eps);
        Trajectory traj = integrate(calc.system(), sig, x, integ);
        double v_end = V.eval(traj.samples.back().x);
        double peak = v0;
        for (const auto& p : traj.dense) peak = std::max(peak, V.eval(p.x));
        if (v_end < v0 && peak <= 2.0 * v0 * (1.0 + 1e-12)) {
            SynthesisOutcome out;
            out.epsilon = eps;
            out.decrease_margin = v0 - v_end;
            out.intersample_peak = v0 > 0 ? peak / v0 : 1.0;
            return out;
        }
    }
    throw NoDecrease("select_epsilon: no epsilon in (sigma*2^-30, sigma] gave a V decrease with "
                     "the inter-sample bound; check the certificate and tolerances");
}

}  // namespace detail

/// Shrink epsilon from sigma by halving until the simulated schedule
/// strictly decreases V with max_s V(pi(s)) <= 2 V(x).
inline SynthesisOutcome select_epsilon(const SystemCalculus& calc, const Vec& x,
                                       const BracketPair& pair, double sigma,
                                       const IntegratorConfig& integ = {}) {
    SynthesisOutcome out = detail::epsilon_bisection(
        calc, x, sigma, integ, [&](double eps) { return build_schedule(pair, eps).signal(); });
    out.kind = SynthesisOutcome::Kind::Schedule;
    out.schedule = build_schedule(pair, out.epsilon);
    return out;
}

/// Same acceptance loop for a constant smooth-feedback value.
inline SynthesisOutcome select_epsilon(const SystemCalculus& calc, const Vec& x, double u,
                                       double sigma, const IntegratorConfig& integ = {}) {
    SynthesisOutcome out = detail::epsilon_bisection(
        calc, x, sigma, integ, [&](double eps) { return ControlSignal::constant(u, 0.0, eps); });
    out.kind = SynthesisOutcome::Kind::SmoothFeedback;
    out.u_value = u;
    return out;
}

inline SynthesisOutcome select_epsilon(const System& sys, const Vec& x, const BracketPair& pair,
                                       double sigma, const IntegratorConfig& integ = {}) {
    SystemCalculus calc(sys);
    return select_epsilon(calc, x, pair, sigma, integ);
}

}  // namespace sdclf
