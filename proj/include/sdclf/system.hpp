#pragma once

// Single-input affine system dx/dt = f(x) + u g(x) together with a candidate
// Lyapunov function V, plus the cached symbolic calculus used by the
// classifier and the controller search.

#include "sdclf/generators.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace sdclf {

struct Tolerances {
    double zero_tol = 1e-9;
    double strict_tol = 1e-9;
};

struct Box {
    Vec lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }

    bool valid() const {
        if (lo.size() != hi.size() || lo.empty()) return false;
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] <= hi[i])) return false;
        return true;
    }

    bool contains(const Vec& x) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

inline double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

class System {
public:
    System(std::string name, VectorField f, VectorField g, Polynomial V)
        : name_(std::move(name)), f_(std::move(f)), g_(std::move(g)), V_(std::move(V)) {
        const int n = f_.dim();
        if (g_.dim() != n || V_.dim() != n)
            throw DimensionMismatch("System: f, g, V dimensions disagree");
        const Polynomial::Exponents zero_exp(n, 0);
        for (int i = 0; i < n; ++i) {
            if (std::abs(f_.component(i).coefficient(zero_exp)) > 1e-12)
                throw std::invalid_argument("System: f(0) != 0 (component " + std::to_string(i + 1) +
                                            " has a constant term)");
        }
        if (std::abs(V_.coefficient(zero_exp)) > 1e-12)
            throw std::invalid_argument("System: V(0) != 0");
        for (int i = 0; i < n; ++i) {
            Polynomial::Exponents lin(n, 0);
            lin[i] = 1;
            if (std::abs(V_.coefficient(lin)) > 1e-12)
                throw std::invalid_argument("System: V has a linear term (not positive definite)");
        }
    }

    System(VectorField f, VectorField g, Polynomial V)
        : System("", std::move(f), std::move(g), std::move(V)) {}

    const std::string& name() const { return name_; }
    int dim() const { return f_.dim(); }
    const VectorField& f() const { return f_; }
    const VectorField& g() const { return g_; }
    const Polynomial& V() const { return V_; }

    Vec rhs(const Vec& x, double u) const {
        Vec fx = f_.eval(x);
        Vec gx = g_.eval(x);
        for (int i = 0; i < dim(); ++i) fx[i] += u * gx[i];
        return fx;
    }

    /// Diagnostic only: sample V > 0 on a grid over a box (positive
    /// definiteness away from 0 is the caller's obligation).
    bool sampled_positive(const Box& region, int grid) const;

private:
    std::string name_;
    VectorField f_, g_;
    Polynomial V_;
};

namespace detail {

template <typename Fn>
void for_each_grid_point(const Box& region, int grid, Fn&& fn) {
    if (!region.valid()) throw std::invalid_argument("grid sweep: invalid region");
    if (grid < 2) throw std::invalid_argument("grid sweep: need at least 2 points per axis");
    const int n = region.dim();
    std::vector<int> idx(n, 0);
    Vec x(n);
    while (true) {
        for (int i = 0; i < n; ++i)
            x[i] = region.lo[i] + (region.hi[i] - region.lo[i]) * idx[i] / (grid - 1);
        fn(x);
        int i = 0;
        for (; i < n; ++i) {
            if (++idx[i] < grid) break;
            idx[i] = 0;
        }
        if (i == n) return;
    }
}

}  // namespace detail

inline bool System::sampled_positive(const Box& region, int grid) const {
    bool ok = true;
    detail::for_each_grid_point(region, grid, [&](const Vec& x) {
        if (norm2(x) > 1e-12 && V_.eval(x) <= 0.0) ok = false;
    });
    return ok;
}

/// Cached Lie calculus for one system: generator fields, the scalars they
/// produce from V, and composed tuple scalars. Insert-once caches behind a
/// mutex; safe for concurrent readers.
class SystemCalculus {
public:
    explicit SystemCalculus(System sys)
        : sys_(std::move(sys)), gens_(sys_.f(), sys_.g()), gV_(lie_derivative(sys_.g(), sys_.V())) {}

    const System& system() const { return sys_; }
    const GeneratorSet& generators() const { return gens_; }

    const Polynomial& gV() const { return gV_; }

    /// (f^k V) as a polynomial, k >= 0.
    const Polynomial& f_power_V(int k) const {
        std::scoped_lock lk(mu_);
        if (f_pow_.empty()) f_pow_.push_back(sys_.V());
        while (static_cast<int>(f_pow_.size()) <= k)
            f_pow_.push_back(lie_derivative(sys_.f(), f_pow_.back()));
        return f_pow_[k];
    }

    /// (lambda V) for one generator.
    const Polynomial& generator_scalar(GeneratorId id) const {
        std::scoped_lock lk(mu_);
        auto it = gen_scalar_.find(id);
        if (it != gen_scalar_.end()) return it->second;
        Polynomial s = lie_derivative(gens_.field(id), sys_.V());
        return gen_scalar_.emplace(id, std::move(s)).first->second;
    }

    /// (D1 ... Dk V) for a tuple of generators, suffix-memoized.
    const Polynomial& tuple_scalar(const GeneratorTuple& tuple) const {
        std::scoped_lock lk(mu_);
        return tuple_scalar_locked(tuple);
    }

    /// ((s_len ... s_1) V) for a word over {f, g}: bit p of `bits` selects g
    /// for the slot applied p-th from the right (so the top bit is the
    /// outermost application). Suffix-memoized per system.
    const Polynomial& word_scalar(int len, std::uint32_t bits) const {
        std::scoped_lock lk(mu_);
        return word_scalar_locked(len, bits);
    }

    double tuple_value(const GeneratorTuple& tuple, const Vec& x) const {
        return tuple_scalar(tuple).eval(x);
    }

private:
    const Polynomial& tuple_scalar_locked(const GeneratorTuple& tuple) const {
        if (tuple.empty()) return sys_.V();
        auto it = tuple_cache_.find(tuple);
        if (it != tuple_cache_.end()) return it->second;
        GeneratorTuple tail(tuple.begin() + 1, tuple.end());
        const Polynomial& rest = tuple_scalar_locked(tail);
        Polynomial s = lie_derivative(gens_.field(tuple.front()), rest);
        return tuple_cache_.emplace(tuple, std::move(s)).first->second;
    }

    const Polynomial& word_scalar_locked(int len, std::uint32_t bits) const {
        if (len <= 0) return sys_.V();
        auto key = std::make_pair(len, bits);
        auto it = word_cache_.find(key);
        if (it != word_cache_.end()) return it->second;
        const int top = len - 1;
        const VectorField& field = ((bits >> top) & 1u) ? sys_.g() : sys_.f();
        const Polynomial& rest = word_scalar_locked(top, bits & ((1u << top) - 1u));
        Polynomial s = lie_derivative(field, rest);
        return word_cache_.emplace(key, std::move(s)).first->second;
    }

    System sys_;
    GeneratorSet gens_;
    Polynomial gV_;

    mutable std::recursive_mutex mu_;
    mutable std::deque<Polynomial> f_pow_;  // deque: stable references across growth
    mutable std::map<GeneratorId, Polynomial> gen_scalar_;
    mutable std::map<GeneratorTuple, Polynomial> tuple_cache_;
    mutable std::map<std::pair<int, std::uint32_t>, Polynomial> word_cache_;
};

}  // namespace sdclf
