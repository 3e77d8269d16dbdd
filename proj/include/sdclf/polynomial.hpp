#pragma once

// Sparse multivariate polynomials with exact partial derivatives.
// Terms are kept in graded-lexicographic order (highest total degree first)
// so printing and structural comparison are reproducible.

#include "sdclf/errors.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sdclf {

using Vec = std::vector<double>;

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

class Polynomial {
public:
    using Exponents = std::vector<int>;

    struct GradedLexDesc {
        bool operator()(const Exponents& a, const Exponents& b) const {
            int da = 0, db = 0;
            for (int e : a) da += e;
            for (int e : b) db += e;
            if (da != db) return da > db;
            return a > b;
        }
    };

    using TermMap = std::map<Exponents, double, GradedLexDesc>;

    explicit Polynomial(int dim) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("Polynomial: dimension must be positive");
    }

    static Polynomial constant(int dim, double c) {
        Polynomial p(dim);
        p.add_term(Exponents(dim, 0), c);
        return p;
    }

    static Polynomial variable(int dim, int index) {
        if (index < 0 || index >= dim) throw std::invalid_argument("Polynomial: variable index out of range");
        Polynomial p(dim);
        Exponents e(dim, 0);
        e[index] = 1;
        p.add_term(e, 1.0);
        return p;
    }

    static Polynomial monomial(int dim, Exponents e, double c) {
        if (static_cast<int>(e.size()) != dim) throw DimensionMismatch("Polynomial: exponent length != dimension");
        for (int k : e)
            if (k < 0) throw std::invalid_argument("Polynomial: negative exponent");
        Polynomial p(dim);
        p.add_term(std::move(e), c);
        return p;
    }

    int dim() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    /// Structural zero test: every stored coefficient below `eps` in magnitude.
    bool is_zero(double eps = 1e-12) const {
        for (const auto& [e, c] : terms_)
            if (std::abs(c) > eps) return false;
        return true;
    }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int k : e) s += k;
            if (s > d) d = s;
        }
        return d;
    }

    double eval(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_) throw DimensionMismatch("Polynomial::eval: point dimension");
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = c;
            for (int i = 0; i < dim_; ++i) {
                for (int k = 0; k < e[i]; ++k) t *= x[i];
            }
            acc += t;
        }
        return acc;
    }

    double eval(const Vec& x) const { return eval(std::span<const double>(x)); }

    Polynomial derivative(int var) const {
        if (var < 0 || var >= dim_) throw std::invalid_argument("Polynomial::derivative: bad variable");
        Polynomial out(dim_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponents d = e;
            d[var] -= 1;
            out.add_term(std::move(d), c * e[var]);
        }
        return out;
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o) {
        check_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    Polynomial& operator*=(double s) {
        if (s == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_dim(b);
        Polynomial out(a.dim_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(a.dim_);
                for (int i = 0; i < a.dim_; ++i) e[i] = ea[i] + eb[i];
                out.add_term(std::move(e), ca * cb);
            }
        }
        return out;
    }

    Polynomial pow(int n) const {
        if (n < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
        Polynomial out = constant(dim_, 1.0);
        for (int k = 0; k < n; ++k) out = out * (*this);
        return out;
    }

    /// Exact term-map equality.
    bool operator==(const Polynomial& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

    /// Equality up to round-off: coefficients agree within `tol` relative to
    /// the largest coefficient of either side.
    bool approx_equal(const Polynomial& o, double tol = 1e-12) const {
        if (dim_ != o.dim_) return false;
        double scale = 1.0;
        for (const auto& [e, c] : terms_) scale = std::max(scale, std::abs(c));
        for (const auto& [e, c] : o.terms_) scale = std::max(scale, std::abs(c));
        Polynomial diff = *this - o;
        return diff.is_zero(tol * scale);
    }

    /// Canonical rendering, e.g. "-2*x1^2*x2^2 + x1".
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            double coef = c;
            if (first) {
                if (coef < 0) {
                    out += "-";
                    coef = -coef;
                }
            } else {
                out += coef < 0 ? " - " : " + ";
                if (coef < 0) coef = -coef;
            }
            first = false;
            bool has_var = false;
            for (int k : e)
                if (k > 0) has_var = true;
            if (!has_var || coef != 1.0) out += detail::format_double(coef);
            bool star = !has_var || coef != 1.0;
            for (int i = 0; i < dim_; ++i) {
                if (e[i] == 0) continue;
                if (star) out += "*";
                out += "x" + std::to_string(i + 1);
                if (e[i] > 1) out += "^" + std::to_string(e[i]);
                star = true;
            }
        }
        return out;
    }

    /// Re-embed into a space with `new_dim >= dim()` variables; variable i maps
    /// to variable i + offset.
    Polynomial embed(int new_dim, int offset = 0) const {
        if (new_dim < dim_ + offset) throw DimensionMismatch("Polynomial::embed: target too small");
        Polynomial out(new_dim);
        for (const auto& [e, c] : terms_) {
            Exponents ne(new_dim, 0);
            for (int i = 0; i < dim_; ++i) ne[i + offset] = e[i];
            out.add_term(std::move(ne), c);
        }
        return out;
    }

    double coefficient(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? 0.0 : it->second;
    }

private:
    void check_dim(const Polynomial& o) const {
        if (dim_ != o.dim_) throw DimensionMismatch("Polynomial: dimension mismatch");
    }

    void add_term(Exponents e, double c) {
        if (c == 0.0) return;
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    int dim_;
    TermMap terms_;
};

}  // namespace sdclf
