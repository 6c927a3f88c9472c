#pragma once

// A CircuitPrimitive bundles the gates the dense simulator executes, the
// CNOT charge of the cost model, and (when it has one) the basis permutation
// it implements. The permutation backend runs on the declared semantics
// only; tests check that both views agree.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cqbm/error.hpp"
#include "cqbm/gate.hpp"
#include "cqbm/ledger.hpp"

namespace cqbm {

/// Reads the integer held by `qubits` (qubits[0] least significant).
inline BasisIndex read_register(BasisIndex index, std::span<const Qubit> qubits) {
    BasisIndex v = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j) v |= ((index >> qubits[j]) & 1) << j;
    return v;
}

inline BasisIndex write_register(BasisIndex index, std::span<const Qubit> qubits, BasisIndex value) {
    for (std::size_t j = 0; j < qubits.size(); ++j) {
        index &= ~bit(qubits[j]);
        index |= ((value >> j) & 1) << qubits[j];
    }
    return index;
}

namespace semantics {

/// target ^= 1 where all controls hold (X, CNOT, MCX).
struct XorFlip {
    Qubit target = 0;
    std::vector<Control> controls;
};

/// register += k (mod 2^n) where all controls hold.
struct AddConst {
    std::vector<Qubit> range;
    BasisIndex k = 0;
    std::vector<Control> controls;
};

/// register += 1 where `plus` holds, register -= 1 where `minus` holds.
/// The two control sets must be mutually exclusive.
struct ControlledMove {
    std::vector<Qubit> range;
    std::vector<Control> plus;
    std::vector<Control> minus;
};

enum class CompareOp { Less, GreaterEqual, LessEqual };

/// result ^= (register OP k). With `require_clean` the result qubit must be
/// |0> on entry (a computing comparator as opposed to an uncomputing one).
struct CompareMark {
    std::vector<Qubit> range;
    BasisIndex k = 0;
    Qubit result = 0;
    CompareOp op = CompareOp::Less;
    bool require_clean = true;
};

/// target ^= (register value is one of `values`).
struct RegisterMatch {
    std::vector<Qubit> range;
    std::vector<BasisIndex> values;
    Qubit target = 0;
};

struct Identity {};

}  // namespace semantics

using Semantics = std::variant<std::monostate, semantics::Identity, semantics::XorFlip,
                               semantics::AddConst, semantics::ControlledMove,
                               semantics::CompareMark, semantics::RegisterMatch>;

inline bool has_permutation(const Semantics& s) { return !std::holds_alternative<std::monostate>(s); }

/// Image of one basis index. Every declared primitive here is a pure
/// permutation (unit phase), so no phase is returned.
inline BasisIndex permute(const Semantics& s, BasisIndex index) {
    using namespace semantics;
    struct Visitor {
        BasisIndex index;
        BasisIndex operator()(const std::monostate&) const {
            throw Error("primitive has no declared permutation semantics");
        }
        BasisIndex operator()(const Identity&) const { return index; }
        BasisIndex operator()(const XorFlip& f) const {
            return ControlMask::of(f.controls).matches(index) ? index ^ bit(f.target) : index;
        }
        BasisIndex operator()(const AddConst& a) const {
            if (!ControlMask::of(a.controls).matches(index)) return index;
            const BasisIndex mod_mask = (BasisIndex{1} << a.range.size()) - 1;
            return write_register(index, a.range, (read_register(index, a.range) + a.k) & mod_mask);
        }
        BasisIndex operator()(const ControlledMove& m) const {
            const BasisIndex mod_mask = (BasisIndex{1} << m.range.size()) - 1;
            const BasisIndex v = read_register(index, m.range);
            if (ControlMask::of(m.plus).matches(index)) return write_register(index, m.range, (v + 1) & mod_mask);
            if (ControlMask::of(m.minus).matches(index)) return write_register(index, m.range, (v - 1) & mod_mask);
            return index;
        }
        BasisIndex operator()(const CompareMark& c) const {
            if (c.require_clean && (index & bit(c.result)))
                throw Error("comparator result qubit " + std::to_string(c.result) + " is not |0>");
            const BasisIndex v = read_register(index, c.range);
            bool r = false;
            switch (c.op) {
                case CompareOp::Less: r = v < c.k; break;
                case CompareOp::GreaterEqual: r = v >= c.k; break;
                case CompareOp::LessEqual: r = v <= c.k; break;
            }
            return r ? index ^ bit(c.result) : index;
        }
        BasisIndex operator()(const RegisterMatch& m) const {
            const BasisIndex v = read_register(index, m.range);
            const bool hit = std::find(m.values.begin(), m.values.end(), v) != m.values.end();
            return hit ? index ^ bit(m.target) : index;
        }
    };
    return std::visit(Visitor{index}, s);
}

inline Semantics inverse(const Semantics& s) {
    using namespace semantics;
    if (auto* a = std::get_if<AddConst>(&s)) {
        AddConst inv = *a;
        const BasisIndex mod_mask = (BasisIndex{1} << a->range.size()) - 1;
        inv.k = (mod_mask + 1 - a->k) & mod_mask;
        return inv;
    }
    if (auto* m = std::get_if<ControlledMove>(&s)) {
        ControlledMove inv = *m;
        std::swap(inv.plus, inv.minus);
        return inv;
    }
    if (auto* c = std::get_if<CompareMark>(&s)) {
        CompareMark inv = *c;
        inv.require_clean = false;
        return inv;
    }
    return s;
}

struct Primitive {
    std::string label;
    std::vector<Gate> gates;
    std::uint64_t cnots = 0;  // cost-model charge
    Semantics semantics;
    std::vector<std::string> parts;  // structural pieces, e.g. "qft", "ladder+", "qft_dagger"

    Primitive inverse() const {
        Primitive p;
        p.label = label;
        p.cnots = cnots;
        p.semantics = cqbm::inverse(semantics);
        p.gates.reserve(gates.size());
        for (auto it = gates.rbegin(); it != gates.rend(); ++it) p.gates.push_back(it->inverse());
        p.parts.assign(parts.rbegin(), parts.rend());
        return p;
    }
};

using Circuit = std::vector<Primitive>;

inline void append(Circuit& into, const Circuit& more) { into.insert(into.end(), more.begin(), more.end()); }

inline Circuit inverse(const Circuit& c) {
    Circuit inv;
    inv.reserve(c.size());
    for (auto it = c.rbegin(); it != c.rend(); ++it) inv.push_back(it->inverse());
    return inv;
}

inline void charge(GateLedger& ledger, std::span<const Primitive> circuit) {
    for (const auto& p : circuit) ledger.charge(p.label, p.cnots);
}

inline GateLedger ledger_of(std::span<const Primitive> circuit) {
    GateLedger l;
    charge(l, circuit);
    return l;
}

inline std::size_t gate_count(std::span<const Primitive> circuit) {
    std::size_t n = 0;
    for (const auto& p : circuit) n += p.gates.size();
    return n;
}

/// Gate trace of a whole circuit, each primitive introduced by a comment line.
inline void dump_trace(std::ostream& os, std::span<const Primitive> circuit) {
    for (const auto& p : circuit) {
        os << "# " << p.label << " cnots=" << p.cnots << '\n';
        dump_trace(os, std::span<const Gate>(p.gates));
    }
}

}  // namespace cqbm
