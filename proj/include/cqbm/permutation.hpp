#pragma once

// Exact sparse backend. Every CQBM timestep permutes computational basis
// states, so a state is kept as a map from basis index to amplitude and each
// primitive is applied through its declared semantics.

#include <map>
#include <span>
#include <string>

#include "cqbm/error.hpp"
#include "cqbm/primitive.hpp"

namespace cqbm {

using SparseState = std::map<BasisIndex, Amplitude>;

inline BasisIndex permute_basis(BasisIndex index, std::span<const Primitive> circuit) {
    for (const auto& p : circuit) {
        if (!has_permutation(p.semantics))
            throw Error("primitive '" + p.label + "' has no permutation semantics");
        index = permute(p.semantics, index);
    }
    return index;
}

inline void apply_permutation(SparseState& state, const Primitive& p, GateLedger* ledger = nullptr) {
    if (!has_permutation(p.semantics))
        throw Error("primitive '" + p.label + "' has no permutation semantics");
    if (!std::holds_alternative<semantics::Identity>(p.semantics)) {
        SparseState next;
        for (const auto& [index, amp] : state) {
            auto [it, fresh] = next.emplace(permute(p.semantics, index), amp);
            if (!fresh) throw Error("primitive '" + p.label + "' is not a bijection on the state support");
        }
        state.swap(next);
    }
    if (ledger) ledger->charge(p.label, p.cnots);
}

inline SparseState run_permutation_backend(const SparseState& state, std::span<const Primitive> circuit,
                                           GateLedger* ledger = nullptr) {
    // Two entries that collide at any intermediate primitive also collide at
    // the end, so checking the final images is enough.
    SparseState next;
    for (const auto& [index, amp] : state) {
        auto [it, fresh] = next.emplace(permute_basis(index, circuit), amp);
        if (!fresh) throw Error("circuit is not a bijection on the state support");
    }
    if (ledger) charge(*ledger, circuit);
    return next;
}

}  // namespace cqbm
