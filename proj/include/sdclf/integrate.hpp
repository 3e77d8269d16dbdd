#pragma once

// ODE integration for the closed loop: classical fixed-step RK4 and an
// embedded adaptive 4(5) pair. Control inputs are piecewise constant;
// integration always restarts exactly at switch times, so a step never
// straddles a control discontinuity.

#include "sdclf/system.hpp"

#include <algorithm>
#include <cmath>

namespace sdclf {

struct IntegratorConfig {
    enum class Method { RK4, RK45 };

    Method method = Method::RK4;
    double step = 1e-2;      // fixed-step size (RK4)
    double rel_tol = 1e-9;   // adaptive tolerances (RK45)
    double abs_tol = 1e-12;
    double max_norm = 1e6;   // blow-up detection threshold
    bool record_dense = true;

    void validate() const {
        if (step <= 0 || rel_tol <= 0 || abs_tol <= 0 || max_norm <= 0)
            throw std::invalid_argument("IntegratorConfig: step/tolerances must be positive");
    }
};

/// Piecewise-constant control: value values[i] on [knots[i], knots[i+1]).
struct ControlSignal {
    std::vector<double> knots;   // strictly increasing, size = values.size() + 1
    std::vector<double> values;

    static ControlSignal constant(double u, double t0, double t1) {
        return ControlSignal{{t0, t1}, {u}};
    }

    double t0() const { return knots.front(); }
    double t1() const { return knots.back(); }

    double operator()(double t) const {
        for (std::size_t i = 0; i + 1 < knots.size(); ++i)
            if (t < knots[i + 1]) return values[i];
        return values.back();
    }

    void validate() const {
        if (knots.size() < 2 || values.size() + 1 != knots.size())
            throw std::invalid_argument("ControlSignal: knots/values sizes");
        for (std::size_t i = 0; i + 1 < knots.size(); ++i)
            if (!(knots[i] < knots[i + 1]))
                throw std::invalid_argument("ControlSignal: knots must increase");
    }
};

struct TrajectoryPoint {
    double t;
    Vec x;
    double u;
};

struct Trajectory {
    std::vector<TrajectoryPoint> samples;  // controller sampling instants
    std::vector<TrajectoryPoint> dense;    // fine-grid states for inter-sample checks
};

namespace detail {

inline void check_norm(const Vec& x, double t, double max_norm) {
    if (!(norm2(x) <= max_norm))  // catches NaN as well
        throw BlowUp("integrate: state norm exceeded " + format_double(max_norm) + " at t=" +
                         format_double(t) + " (finite escape)",
                     t);
}

inline Vec rk4_step(const System& sys, const Vec& x, double u, double h) {
    const int n = sys.dim();
    Vec k1 = sys.rhs(x, u);
    Vec tmp(n);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    Vec k2 = sys.rhs(tmp, u);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    Vec k3 = sys.rhs(tmp, u);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    Vec k4 = sys.rhs(tmp, u);
    Vec out(n);
    for (int i = 0; i < n; ++i)
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Fehlberg 4(5) embedded pair.
inline Vec rkf45_step(const System& sys, const Vec& x, double u, double h, double& err) {
    static constexpr double a2 = 1.0 / 4, a3 = 3.0 / 8, a4 = 12.0 / 13, a6 = 1.0 / 2;
    static constexpr double b21 = 1.0 / 4;
    static constexpr double b31 = 3.0 / 32, b32 = 9.0 / 32;
    static constexpr double b41 = 1932.0 / 2197, b42 = -7200.0 / 2197, b43 = 7296.0 / 2197;
    static constexpr double b51 = 439.0 / 216, b52 = -8.0, b53 = 3680.0 / 513,
                            b54 = -845.0 / 4104;
    static constexpr double b61 = -8.0 / 27, b62 = 2.0, b63 = -3544.0 / 2565,
                            b64 = 1859.0 / 4104, b65 = -11.0 / 40;
    static constexpr double c1 = 16.0 / 135, c3 = 6656.0 / 12825, c4 = 28561.0 / 56430,
                            c5 = -9.0 / 50, c6 = 2.0 / 55;
    static constexpr double d1 = 25.0 / 216, d3 = 1408.0 / 2565, d4 = 2197.0 / 4104,
                            d5 = -1.0 / 5;
    (void)a2;
    (void)a3;
    (void)a4;
    (void)a6;

    const int n = sys.dim();
    Vec k1 = sys.rhs(x, u), tmp(n);
    auto at = [&](auto&&... terms) {
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * (terms[i] + ...);
        return sys.rhs(tmp, u);
    };
    auto scaled = [&](double c, const Vec& k) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = c * k[i];
        return v;
    };
    Vec k2 = at(scaled(b21, k1));
    Vec k3 = at(scaled(b31, k1), scaled(b32, k2));
    Vec k4 = at(scaled(b41, k1), scaled(b42, k2), scaled(b43, k3));
    Vec k5 = at(scaled(b51, k1), scaled(b52, k2), scaled(b53, k3), scaled(b54, k4));
    Vec k6 = at(scaled(b61, k1), scaled(b62, k2), scaled(b63, k3), scaled(b64, k4),
                scaled(b65, k5));

    Vec x5(n);
    err = 0.0;
    for (int i = 0; i < n; ++i) {
        x5[i] = x[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c5 * k5[i] + c6 * k6[i]);
        double x4 = x[i] + h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i]);
        double d = std::abs(x5[i] - x4);
        if (std::isnan(d)) {
            err = d;  // poison the estimate so the step is rejected
            return x5;
        }
        if (d > err) err = d;
    }
    return x5;
}

/// Integrate one constant-control segment, appending step states to `dense`.
inline Vec integrate_segment(const System& sys, Vec x, double u, double a, double b,
                             const IntegratorConfig& cfg, std::vector<TrajectoryPoint>* dense) {
    const double span = b - a;
    if (span == 0.0) return x;
    if (cfg.method == IntegratorConfig::Method::RK4) {
        const double mag = std::abs(span);
        int nsteps = std::max(1, static_cast<int>(std::ceil(mag / cfg.step - 1e-12)));
        const double h = span / nsteps;
        for (int s = 0; s < nsteps; ++s) {
            x = rk4_step(sys, x, u, h);
            const double t = (s + 1 == nsteps) ? b : a + (s + 1) * h;
            check_norm(x, t, cfg.max_norm);
            if (dense) dense->push_back({t, x, u});
        }
        return x;
    }
    // adaptive 4(5)
    double t = a;
    const double dir = span > 0 ? 1.0 : -1.0;
    double h = dir * std::min(std::abs(span), cfg.step);
    const double h_min = std::abs(span) * 1e-14;
    while (dir * (b - t) > 1e-300) {
        if (std::abs(h) > std::abs(b - t)) h = b - t;
        double err = 0.0;
        Vec trial = rkf45_step(sys, x, u, h, err);
        double tol_here = cfg.abs_tol + cfg.rel_tol * norm2(x);
        if (err <= tol_here) {  // NaN error never passes
            t += h;
            x = std::move(trial);
            check_norm(x, t, cfg.max_norm);
            if (dense) dense->push_back({t, x, u});
        }
        double factor = 0.1;
        if (err > 0.0 && std::isfinite(err)) factor = 0.9 * std::pow(tol_here / err, 0.2);
        else if (err == 0.0) factor = 4.0;
        h *= std::clamp(factor, 0.1, 4.0);
        if (!(std::abs(h) >= h_min))
            throw StepUnderflow("integrate: adaptive step underflow at t=" + format_double(t));
    }
    return x;
}

}  // namespace detail

/// Solve dx/dt = f(x) + u(t) g(x) over the control's span. Steps restart at
/// every control knot. Throws BlowUp past cfg.max_norm.
inline Trajectory integrate(const System& sys, const ControlSignal& control, const Vec& x0,
                            const IntegratorConfig& cfg = {}) {
    cfg.validate();
    control.validate();
    if (static_cast<int>(x0.size()) != sys.dim())
        throw DimensionMismatch("integrate: x0 dimension");

    Trajectory traj;
    Vec x = x0;
    traj.samples.push_back({control.t0(), x, control.values.front()});
    if (cfg.record_dense) traj.dense.push_back({control.t0(), x, control.values.front()});
    detail::check_norm(x, control.t0(), cfg.max_norm);

    for (std::size_t i = 0; i + 1 < control.knots.size(); ++i) {
        x = detail::integrate_segment(sys, x, control.values[i], control.knots[i],
                                      control.knots[i + 1], cfg,
                                      cfg.record_dense ? &traj.dense : nullptr);
    }
    traj.samples.push_back({control.t1(), x, control.values.back()});
    return traj;
}

}  // namespace sdclf
