#pragma once

// Formal bracket words over the symbols {f,g} and the indexed generator
// family built from them. A generator of order k and g-order j is the sum,
// over all compositions r1+...+rj = k-j-1 into nonnegative parts, of the
// nested word
//
//   [ ... [[ ... [[f,g], f]...f ], g], ... , g], f]...f ]
//            r_j times                      r_1 times
//
// i.e. innermost [f,g], then r_j f-brackets, then a g-bracket, ... down to
// r_2 f-brackets, a g-bracket, and finally r_1 f-brackets. The (1,0)
// generator is the bare symbol f. Order equals leaf count and g-order the
// number of g leaves.

#include "sdclf/errors.hpp"
#include "sdclf/vector_field.hpp"

#include <compare>
#include <string>
#include <vector>

namespace sdclf {

class BracketWord {
public:
    enum class Leaf { F, G };

    static BracketWord leaf(Leaf s) {
        BracketWord w;
        w.leaf_ = s;
        w.order_ = 1;
        w.g_order_ = (s == Leaf::G) ? 1 : 0;
        return w;
    }

    static BracketWord bracket(BracketWord left, BracketWord right) {
        BracketWord w;
        w.order_ = left.order_ + right.order_;
        w.g_order_ = left.g_order_ + right.g_order_;
        w.children_.push_back(std::move(left));
        w.children_.push_back(std::move(right));
        return w;
    }

    bool is_leaf() const { return children_.empty(); }
    Leaf leaf_symbol() const { return leaf_; }
    const BracketWord& left() const { return children_[0]; }
    const BracketWord& right() const { return children_[1]; }

    int order() const { return order_; }
    int g_order() const { return g_order_; }

    /// Canonical text form, e.g. "[[f,g],f]".
    std::string str() const {
        if (is_leaf()) return leaf_ == Leaf::F ? "f" : "g";
        return "[" + left().str() + "," + right().str() + "]";
    }

    /// Evaluate the word on concrete fields.
    VectorField instantiate(const VectorField& f, const VectorField& g) const {
        if (is_leaf()) return leaf_ == Leaf::F ? f : g;
        return lie_bracket(left().instantiate(f, g), right().instantiate(f, g));
    }

    bool operator==(const BracketWord& o) const { return str() == o.str(); }

private:
    BracketWord() = default;

    Leaf leaf_ = Leaf::F;
    int order_ = 0;
    int g_order_ = 0;
    std::vector<BracketWord> children_;  // empty or exactly two
};

struct GeneratorId {
    int order;    // leaf count k >= 1
    int g_order;  // g leaves j; 0 only for (1,0)

    bool valid() const {
        if (order == 1) return g_order == 0;
        return order >= 2 && g_order >= 1 && g_order <= order - 1;
    }

    auto operator<=>(const GeneratorId&) const = default;

    std::string str() const {
        return "(" + std::to_string(order) + "," + std::to_string(g_order) + ")";
    }
};

namespace detail {

/// All compositions of `total` into `parts` nonnegative integers, in
/// lexicographically ascending order.
inline void compositions(int total, int parts, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int r = 0; r <= total; ++r) {
        cur.push_back(r);
        compositions(total - r, parts - 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

/// The summand words of one generator, one per composition.
inline std::vector<BracketWord> generator_words(GeneratorId id) {
    if (!id.valid()) throw std::invalid_argument("generator_words: invalid index " + id.str());
    const auto F = BracketWord::leaf(BracketWord::Leaf::F);
    const auto G = BracketWord::leaf(BracketWord::Leaf::G);
    if (id.order == 1) return {F};

    const int j = id.g_order;
    std::vector<std::vector<int>> comps;
    std::vector<int> cur;
    detail::compositions(id.order - j - 1, j, cur, comps);

    std::vector<BracketWord> words;
    words.reserve(comps.size());
    for (const auto& r : comps) {
        BracketWord w = BracketWord::bracket(F, G);
        for (int i = j; i >= 2; --i) {
            for (int k = 0; k < r[i - 1]; ++k) w = BracketWord::bracket(std::move(w), F);
            w = BracketWord::bracket(std::move(w), G);
        }
        for (int k = 0; k < r[0]; ++k) w = BracketWord::bracket(std::move(w), F);
        words.push_back(std::move(w));
    }
    return words;
}

}  // namespace sdclf
