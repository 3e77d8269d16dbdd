#pragma once

// Polynomial vector fields on R^n and the exact calculus used throughout:
// evaluation, Lie derivatives of scalars, Lie brackets, iterated derivatives.
//
// Conventions. For a vector field X and scalar V, the Lie derivative is
// (XV)(x) = DV(x) X(x). The bracket is [X,Y] = (DY)X - (DX)Y, so that
// ([X,Y]V) = X(YV) - Y(XV). Iterated derivatives (D1 D2 ... Dk V) apply the
// rightmost field to V first.
//
// Every value here is immutable after construction; all functions are pure.

#include "sdclf/polynomial.hpp"

#include <span>
#include <vector>

namespace sdclf {

class VectorField {
public:
    explicit VectorField(std::vector<Polynomial> components) : comp_(std::move(components)) {
        if (comp_.empty()) throw std::invalid_argument("VectorField: no components");
        dim_ = static_cast<int>(comp_.size());
        for (const auto& p : comp_)
            if (p.dim() != dim_) throw DimensionMismatch("VectorField: component dimension != field dimension");
    }

    static VectorField zero(int dim) {
        return VectorField(std::vector<Polynomial>(dim, Polynomial(dim)));
    }

    int dim() const { return dim_; }
    const Polynomial& component(int i) const { return comp_.at(i); }
    const std::vector<Polynomial>& components() const { return comp_; }

    Vec eval(const Vec& x) const {
        if (static_cast<int>(x.size()) != dim_) throw DimensionMismatch("VectorField::eval: point dimension");
        Vec out(dim_);
        for (int i = 0; i < dim_; ++i) out[i] = comp_[i].eval(x);
        return out;
    }

    bool is_zero(double eps = 1e-12) const {
        for (const auto& p : comp_)
            if (!p.is_zero(eps)) return false;
        return true;
    }

    VectorField& operator+=(const VectorField& o) {
        check_dim(o);
        for (int i = 0; i < dim_; ++i) comp_[i] += o.comp_[i];
        return *this;
    }

    VectorField& operator*=(double s) {
        for (auto& p : comp_) p *= s;
        return *this;
    }

    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator*(double s, VectorField a) { return a *= s; }

private:
    void check_dim(const VectorField& o) const {
        if (dim_ != o.dim_) throw DimensionMismatch("VectorField: dimension mismatch");
    }

    int dim_;
    std::vector<Polynomial> comp_;
};

/// (XV) = DV * X, exactly.
inline Polynomial lie_derivative(const VectorField& X, const Polynomial& V) {
    if (X.dim() != V.dim()) throw DimensionMismatch("lie_derivative: dimensions");
    Polynomial out(V.dim());
    for (int i = 0; i < X.dim(); ++i) out += X.component(i) * V.derivative(i);
    return out;
}

/// [X,Y] = (DY)X - (DX)Y, exactly.
inline VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    if (X.dim() != Y.dim()) throw DimensionMismatch("lie_bracket: dimensions");
    const int n = X.dim();
    std::vector<Polynomial> comp;
    comp.reserve(n);
    for (int i = 0; i < n; ++i) {
        Polynomial ci(n);
        for (int j = 0; j < n; ++j) {
            ci += X.component(j) * Y.component(i).derivative(j);
            ci -= Y.component(j) * X.component(i).derivative(j);
        }
        comp.push_back(std::move(ci));
    }
    return VectorField(std::move(comp));
}

/// (D1 D2 ... Dk V) as a polynomial, rightmost field applied first.
inline Polynomial iterated_lie_derivative(std::span<const VectorField> fields, const Polynomial& V) {
    Polynomial out = V;
    for (auto it = fields.rbegin(); it != fields.rend(); ++it) out = lie_derivative(*it, out);
    return out;
}

/// (D1 D2 ... Dk V)(x); an empty list yields V(x).
inline double iterated_lie_derivative_at(std::span<const VectorField> fields, const Polynomial& V,
                                         const Vec& x) {
    return iterated_lie_derivative(fields, V).eval(x);
}

}  // namespace sdclf
