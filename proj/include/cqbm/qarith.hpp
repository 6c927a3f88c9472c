#pragma once

// Fourier-basis arithmetic on a register of qubits (element 0 least
// significant): QFT, phase ladders, cyclic +-1, constant addition and the
// constant comparators built from subtract-then-add.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "cqbm/error.hpp"
#include "cqbm/gate.hpp"
#include "cqbm/ledger.hpp"
#include "cqbm/primitive.hpp"

namespace cqbm {

namespace detail {

inline std::vector<Gate> qft_gates(std::span<const Qubit> q) {
    const std::size_t k = q.size();
    std::vector<Gate> g;
    for (std::size_t j = k; j-- > 0;) {
        g.push_back(Gate::h(q[j]));
        for (std::size_t m = j; m-- > 0;)
            g.push_back(Gate::phase(q[j], std::numbers::pi / static_cast<double>(BasisIndex{1} << (j - m)), {on(q[m])}));
    }
    for (std::size_t i = 0; i < k / 2; ++i) g.push_back(Gate::swap(q[i], q[k - 1 - i]));
    return g;
}

inline std::vector<Gate> inverse_gates(const std::vector<Gate>& gates) {
    std::vector<Gate> inv;
    inv.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) inv.push_back(it->inverse());
    return inv;
}

// Fourier-basis phases adding k (mod 2^n): qubit m gets 2*pi*((k*2^m) mod 2^n)/2^n.
// Zero angles are dropped.
inline std::vector<Gate> add_phases(std::span<const Qubit> q, BasisIndex k, const std::vector<Control>& controls) {
    const std::size_t n = q.size();
    const BasisIndex modulus = BasisIndex{1} << n;
    std::vector<Gate> g;
    for (std::size_t m = 0; m < n; ++m) {
        const BasisIndex step = (k << m) & (modulus - 1);
        if (step == 0) continue;
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(step) / static_cast<double>(modulus);
        g.push_back(Gate::phase(q[m], theta > std::numbers::pi ? theta - 2.0 * std::numbers::pi : theta, controls));
    }
    return g;
}

inline void append_gates(std::vector<Gate>& into, const std::vector<Gate>& more) {
    into.insert(into.end(), more.begin(), more.end());
}

inline void require_register(std::span<const Qubit> q) {
    if (q.empty()) throw Error("arithmetic register must have at least one qubit");
    if (q.size() > 62) throw Error("arithmetic register too wide");
}

inline std::vector<Qubit> to_vec(std::span<const Qubit> q) { return {q.begin(), q.end()}; }

}  // namespace detail

/// Angle applied to qubit j of an n-qubit +1 ladder: pi / 2^(n-1-j).
inline double ladder_angle(std::size_t n, std::size_t j) {
    return std::numbers::pi / static_cast<double>(BasisIndex{1} << (n - 1 - j));
}

inline Primitive qft(std::span<const Qubit> targets) {
    detail::require_register(targets);
    Primitive p;
    p.label = "qft";
    p.gates = detail::qft_gates(targets);
    p.cnots = cost::qft(targets.size());
    p.parts = {"qft"};
    return p;
}

inline Primitive inverse_qft(std::span<const Qubit> targets) {
    Primitive p = qft(targets).inverse();
    p.label = "qft_dagger";
    p.parts = {"qft_dagger"};
    return p;
}

/// P(sign * theta_j) on qubit j, every gate carrying `controls`.
inline Primitive phase_ladder(std::span<const Qubit> targets, int sign, const std::vector<Control>& controls = {}) {
    detail::require_register(targets);
    if (sign != 1 && sign != -1) throw Error("phase ladder sign must be +1 or -1");
    Primitive p;
    p.label = "phase_ladder";
    for (std::size_t j = 0; j < targets.size(); ++j)
        p.gates.push_back(Gate::phase(targets[j], sign * ladder_angle(targets.size(), j), controls));
    p.cnots = targets.size() * cost::controlled_phase(controls.size());
    p.parts = {sign > 0 ? "ladder+" : "ladder-"};
    return p;
}

namespace detail {

inline Primitive shift_by_one(std::span<const Qubit> targets, int sign, const std::vector<Control>& controls) {
    require_register(targets);
    Primitive p;
    p.label = sign > 0 ? "increment" : "decrement";
    append_gates(p.gates, qft_gates(targets));
    append_gates(p.gates, phase_ladder(targets, sign, controls).gates);
    append_gates(p.gates, inverse_gates(qft_gates(targets)));
    p.cnots = cost::adder_basis_change(targets.size()) + targets.size() * cost::controlled_phase(controls.size());
    const BasisIndex mask = (BasisIndex{1} << targets.size()) - 1;
    p.semantics = semantics::AddConst{to_vec(targets), sign > 0 ? BasisIndex{1} : mask, controls};
    p.parts = {"qft", sign > 0 ? "ladder+" : "ladder-", "qft_dagger"};
    return p;
}

}  // namespace detail

/// |j> -> |j+1 mod 2^n> where the controls hold; only the ladder is controlled.
inline Primitive increment(std::span<const Qubit> targets, const std::vector<Control>& controls = {}) {
    return detail::shift_by_one(targets, +1, controls);
}

inline Primitive decrement(std::span<const Qubit> targets, const std::vector<Control>& controls = {}) {
    return detail::shift_by_one(targets, -1, controls);
}

inline Primitive add_const(std::span<const Qubit> targets, BasisIndex k) {
    detail::require_register(targets);
    const BasisIndex modulus = BasisIndex{1} << targets.size();
    if (k >= modulus) throw Error("constant must satisfy 0 <= k < 2^n");
    Primitive p;
    p.label = "add_const";
    detail::append_gates(p.gates, detail::qft_gates(targets));
    detail::append_gates(p.gates, detail::add_phases(targets, k, {}));
    detail::append_gates(p.gates, detail::inverse_gates(detail::qft_gates(targets)));
    p.cnots = cost::adder_basis_change(targets.size());
    p.semantics = semantics::AddConst{detail::to_vec(targets), k, {}};
    p.parts = {"qft", "phases", "qft_dagger"};
    return p;
}

inline Primitive sub_const(std::span<const Qubit> targets, BasisIndex k) {
    const BasisIndex modulus = BasisIndex{1} << targets.size();
    if (k >= modulus) throw Error("constant must satisfy 0 <= k < 2^n");
    Primitive p = add_const(targets, (modulus - k) & (modulus - 1));
    p.label = "sub_const";
    return p;
}

/// result ^= (value < k). The result qubit is the most significant bit of
/// an (n+1)-qubit subtraction of k, followed by adding k back to the value.
inline Primitive compare_lt(std::span<const Qubit> value, BasisIndex k, Qubit result) {
    detail::require_register(value);
    const std::size_t n = value.size();
    if (k >= (BasisIndex{1} << n)) throw Error("comparator constant must satisfy 0 <= k <= 2^n - 1");
    for (auto q : value)
        if (q == result) throw Error("comparator result qubit overlaps the value register");
    std::vector<Qubit> wide = detail::to_vec(value);
    wide.push_back(result);
    const BasisIndex wide_mod = BasisIndex{1} << (n + 1);

    Primitive p;
    p.label = "compare_lt";
    detail::append_gates(p.gates, detail::qft_gates(wide));
    detail::append_gates(p.gates, detail::add_phases(wide, (wide_mod - k) & (wide_mod - 1), {}));
    detail::append_gates(p.gates, detail::inverse_gates(detail::qft_gates(wide)));
    detail::append_gates(p.gates, detail::qft_gates(value));
    detail::append_gates(p.gates, detail::add_phases(value, k, {}));
    detail::append_gates(p.gates, detail::inverse_gates(detail::qft_gates(value)));
    p.cnots = cost::comparator(n);
    p.semantics = semantics::CompareMark{detail::to_vec(value), k, result, semantics::CompareOp::Less, true};
    p.parts = {"sub_const", "add_const"};
    return p;
}

/// result ^= (value >= k): compare_lt followed by X on the result.
inline Primitive compare_geq(std::span<const Qubit> value, BasisIndex k, Qubit result) {
    Primitive p = compare_lt(value, k, result);
    p.label = "compare_geq";
    p.gates.push_back(Gate::x(result));
    std::get<semantics::CompareMark>(p.semantics).op = semantics::CompareOp::GreaterEqual;
    p.parts.push_back("x");
    return p;
}

/// result ^= (value <= k): a bare X when k = 2^n - 1, else value < k+1.
inline Primitive compare_leq(std::span<const Qubit> value, BasisIndex k, Qubit result) {
    detail::require_register(value);
    const BasisIndex top = (BasisIndex{1} << value.size()) - 1;
    if (k > top) throw Error("comparator constant must satisfy 0 <= k <= 2^n - 1");
    Primitive p;
    if (k == top) {
        p.gates = {Gate::x(result)};
        p.cnots = 0;
        p.semantics = semantics::CompareMark{detail::to_vec(value), k, result, semantics::CompareOp::LessEqual, true};
        p.parts = {"x"};
    } else {
        p = compare_lt(value, k + 1, result);
        auto& s = std::get<semantics::CompareMark>(p.semantics);
        s.op = semantics::CompareOp::LessEqual;
        s.k = k;
    }
    p.label = "compare_leq";
    return p;
}

/// register +1 where `plus` holds and -1 where `minus` holds, sharing one
/// QFT / QFT^dagger pair between the two controlled ladders.
inline Primitive controlled_move(std::span<const Qubit> targets, const std::vector<Control>& plus,
                                 const std::vector<Control>& minus) {
    detail::require_register(targets);
    Primitive p;
    p.label = "move";
    detail::append_gates(p.gates, detail::qft_gates(targets));
    detail::append_gates(p.gates, phase_ladder(targets, +1, plus).gates);
    detail::append_gates(p.gates, phase_ladder(targets, -1, minus).gates);
    detail::append_gates(p.gates, detail::inverse_gates(detail::qft_gates(targets)));
    p.cnots = cost::adder_basis_change(targets.size()) +
              targets.size() * (cost::controlled_phase(plus.size()) + cost::controlled_phase(minus.size()));
    p.semantics = semantics::ControlledMove{detail::to_vec(targets), plus, minus};
    p.parts = {"qft", "ladder+", "ladder-", "qft_dagger"};
    return p;
}

}  // namespace cqbm
