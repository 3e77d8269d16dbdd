#pragma once

// Instantiated generator sums and tuple enumeration under order budgets.
//
// The memo caches are insert-once behind a mutex: concurrent readers are safe
// and a generator field is computed at most once per (id, f, g) instance.

#include "sdclf/bracket_words.hpp"

#include <map>
#include <mutex>
#include <vector>

namespace sdclf {

struct GeneratorSum {
    GeneratorId id;
    std::vector<BracketWord> words;
    VectorField field;
};

/// Memoized generator family over one concrete pair (f, g).
class GeneratorSet {
public:
    GeneratorSet(VectorField f, VectorField g) : f_(std::move(f)), g_(std::move(g)) {
        if (f_.dim() != g_.dim()) throw DimensionMismatch("GeneratorSet: f/g dimensions");
    }

    const VectorField& f() const { return f_; }
    const VectorField& g() const { return g_; }
    int dim() const { return f_.dim(); }

    const VectorField& field(GeneratorId id) const {
        std::scoped_lock lk(mu_);
        auto it = cache_.find(id);
        if (it != cache_.end()) return it->second;
        VectorField sum = VectorField::zero(dim());
        for (const auto& w : generator_words(id)) sum += w.instantiate(f_, g_);
        return cache_.emplace(id, std::move(sum)).first->second;
    }

    GeneratorSum sum(GeneratorId id) const {
        return GeneratorSum{id, generator_words(id), field(id)};
    }

private:
    VectorField f_, g_;
    mutable std::mutex mu_;
    mutable std::map<GeneratorId, VectorField> cache_;
};

/// All valid generator indices with order <= max_order, ordered by (order, g-order).
inline std::vector<GeneratorId> generator_ids_up_to(int max_order) {
    if (max_order < 1) throw std::invalid_argument("generator_ids_up_to: max_order >= 1 required");
    std::vector<GeneratorId> ids;
    ids.push_back({1, 0});
    for (int k = 2; k <= max_order; ++k)
        for (int j = 1; j <= k - 1; ++j) ids.push_back({k, j});
    return ids;
}

inline std::vector<GeneratorSum> generator_basis(int max_order, const GeneratorSet& gens) {
    std::vector<GeneratorSum> out;
    for (GeneratorId id : generator_ids_up_to(max_order)) out.push_back(gens.sum(id));
    return out;
}

/// Budget for tuples (D1,...,Dk) of generators.
struct TupleBudget {
    enum class Kind {
        OrderAtMost,       // sum of orders <= order
        OrderExactGExact,  // sum of orders == order, sum of g-orders == g
        OrderExactGAtMost  // sum of orders == order, sum of g-orders <= g
    };

    Kind kind;
    int order;
    int g;

    static TupleBudget order_at_most(int n) {
        if (n < 1) throw std::invalid_argument("TupleBudget: order bound >= 1 required");
        return {Kind::OrderAtMost, n, 0};
    }
    static TupleBudget order_exact_g_exact(int n, int q) {
        if (n < 1 || q < 0) throw std::invalid_argument("TupleBudget: bad parameters");
        return {Kind::OrderExactGExact, n, q};
    }
    static TupleBudget order_exact_g_at_most(int n, int qmax) {
        if (n < 1 || qmax < 0) throw std::invalid_argument("TupleBudget: bad parameters");
        return {Kind::OrderExactGAtMost, n, qmax};
    }
};

using GeneratorTuple = std::vector<GeneratorId>;

namespace detail {

inline void enumerate_tuples_rec(const TupleBudget& b, const std::vector<GeneratorId>& ids,
                                 int order_left, int g_used, GeneratorTuple& cur,
                                 std::vector<GeneratorTuple>& out) {
    if (!cur.empty()) {
        switch (b.kind) {
            case TupleBudget::Kind::OrderAtMost:
                out.push_back(cur);
                break;
            case TupleBudget::Kind::OrderExactGExact:
                if (order_left == 0 && g_used == b.g) out.push_back(cur);
                break;
            case TupleBudget::Kind::OrderExactGAtMost:
                if (order_left == 0 && g_used <= b.g) out.push_back(cur);
                break;
        }
    }
    for (const GeneratorId& id : ids) {
        if (id.order > order_left) break;  // ids sorted by order
        if (b.kind == TupleBudget::Kind::OrderExactGExact && g_used + id.g_order > b.g) continue;
        if (b.kind == TupleBudget::Kind::OrderExactGAtMost && g_used + id.g_order > b.g) continue;
        cur.push_back(id);
        enumerate_tuples_rec(b, ids, order_left - id.order, g_used + id.g_order, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

/// All ordered tuples of generator indices satisfying the budget.
inline std::vector<GeneratorTuple> enumerate_tuples(const TupleBudget& budget) {
    std::vector<GeneratorId> ids = generator_ids_up_to(budget.order);
    std::vector<GeneratorTuple> out;
    GeneratorTuple cur;
    detail::enumerate_tuples_rec(budget, ids, budget.order, 0, cur, out);
    return out;
}

/// Same tuples with the generator sums instantiated on (f, g).
inline std::vector<std::vector<GeneratorSum>> instantiate_tuples(const TupleBudget& budget,
                                                                 const GeneratorSet& gens) {
    std::vector<std::vector<GeneratorSum>> out;
    for (const GeneratorTuple& ids : enumerate_tuples(budget)) {
        std::vector<GeneratorSum> tuple;
        tuple.reserve(ids.size());
        for (GeneratorId id : ids) tuple.push_back(gens.sum(id));
        out.push_back(std::move(tuple));
    }
    return out;
}

}  // namespace sdclf
